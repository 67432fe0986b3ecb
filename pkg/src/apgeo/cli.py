"""Command-line front end: ``apgeo <subcommand> ...`` or ``python -m apgeo``.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 cap exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from pathlib import Path
from typing import TextIO

from . import CapExceededError
from .exact_core import IntMatrix, format_matrix, matrix_to_json, parse_matrix
from .filtration import AdmissibleElement, build_admissible, kernel_order_check, n_of_brute, n_table
from .geodesics import abs_prim_root, classify, find_root, is_absolutely_primitive, length_class
from .progressions import (
    DEFAULT_PRIME_BOUND,
    ProgressionWitness,
    VerificationReport,
    build_progression,
    build_progression_containing,
    prime_density_report,
    verify_witness,
)
from .ramsey import TransferMap, TransferredProgression, transfer_progression, verify_transferred, vdw_number

log = logging.getLogger("apgeo")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3
DEFAULT_CACHE = "./.apgeo-cache.jsonl"


class UsageError(Exception):
    pass


class NCache:
    """n-values keyed by (matrix, admissible element, level) in an append-only
    JSON-lines file.  A speed-up only: every witness is re-checked by the
    brute-force walk before it is emitted."""

    def __init__(self, path: str | os.PathLike | None):
        self.path = Path(path) if path else None
        self.values: dict[tuple[str, int, int], int] = {}
        if self.path and self.path.exists():
            self._load()

    @staticmethod
    def key(gamma: IntMatrix, eta: AdmissibleElement) -> str:
        blob = json.dumps([format_matrix(gamma), eta.group_type,
                           [str(a) for a in eta.alpha]], separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def _load(self) -> None:
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    e = json.loads(line)
                    self.values[(e["gamma_hash"], int(e["v"]), int(e["r"]))] = int(e["n_value"])
                except (ValueError, KeyError, TypeError):
                    log.warning("skipping corrupt cache line %d in %s", lineno, self.path)

    def __call__(self, gamma: IntMatrix, eta: AdmissibleElement, r: int) -> int:
        h = self.key(gamma, eta)
        hit = self.values.get((h, eta.v, r))
        if hit is not None:
            return hit
        fresh = n_table(gamma, eta, r)
        new = [(s, n) for s, n in fresh.items() if (h, eta.v, s) not in self.values]
        for s, n in new:
            self.values[(h, eta.v, s)] = n
        if self.path and new:
            with open(self.path, "a", encoding="utf-8") as fh:
                for s, n in new:
                    fh.write(json.dumps({"gamma_hash": h, "v": eta.v, "r": s, "n_value": str(n)}) + "\n")
        return fresh[r]


def _matrix(text: str) -> IntMatrix:
    try:
        return parse_matrix(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _emit(doc, out: TextIO, path: str | None = None) -> None:
    text = json.dumps(doc, indent=2)
    if path:
        Path(path).write_text(text + "\n", encoding="utf-8")
    else:
        out.write(text + "\n")


def _build_opts(args, cache) -> dict:
    return {"prime_bound": args.prime_bound, "cap": args.cap, "n_func": cache}


def cmd_progression(args, out, cache) -> int:
    w = build_progression(args.gamma, args.k, **_build_opts(args, cache))
    _emit(w.to_json(), out, args.out)
    return EXIT_OK


def cmd_contains(args, out, cache) -> int:
    w = build_progression_containing(args.gamma, args.k, **_build_opts(args, cache))
    _emit(w.to_json(), out, args.out)
    return EXIT_OK


def _load_document(data) -> tuple[object, VerificationReport | None]:
    try:
        if "transfer" in data:
            return TransferredProgression.from_json(data), None
        return ProgressionWitness.from_json(data), None
    except (KeyError, ValueError, TypeError, IndexError) as exc:
        rep = VerificationReport()
        rep.add("parse", False, f"malformed witness: {exc!r}")
        return None, rep


def cmd_verify(args, out, cache) -> int:
    data = _read_json(args.file)
    if not isinstance(data, dict):
        raise UsageError(f"{args.file} does not hold a witness object")
    doc, rep = _load_document(data)
    if rep is None:
        rep = verify_transferred(doc) if isinstance(doc, TransferredProgression) else verify_witness(doc)
    _emit(rep.to_json(), out)
    for c in rep.failures:
        print(f"FAILED {c['name']}: {c['detail']}", file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_absprim(args, out, cache) -> int:
    c = classify(args.gamma)
    doc = {"gamma": matrix_to_json(args.gamma), "kind": c.kind}
    if c.element is not None:
        g = c.element
        lc = length_class(g)
        mu, m = abs_prim_root(g)
        doc.update({
            "length": lc.to_json(),
            "length_numeric": str(lc.numeric()),
            "primitive": find_root(g) is None,
            "absolutely_primitive": is_absolutely_primitive(g),
            "root": matrix_to_json(mu.matrix),
            "m": m,
        })
    _emit(doc, out)
    return EXIT_OK


def cmd_nfun(args, out, cache) -> int:
    eta = build_admissible("A1", 2, args.prime, (1, 2))
    classify(args.gamma)  # rejects anything outside SL(2, Z)
    n = n_of_brute(args.gamma, eta, args.r) if args.brute else cache(args.gamma, eta, args.r)
    out.write(f"{n}\n")
    return EXIT_OK


def cmd_kernel_check(args, out, cache) -> int:
    mode = "exhaustive" if args.exhaustive else "sampled"
    rep = kernel_order_check(args.n, args.p, args.i, mode, args.samples, args.seed)
    _emit(rep.to_json(), out)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_vdw(args, out, cache) -> int:
    res = vdw_number(args.colors, args.k, args.cap)
    _emit(res.to_json(), out)
    return EXIT_OK if res.N is not None else EXIT_CAP


def cmd_transfer(args, out, cache) -> int:
    data = _read_json(args.witness)
    try:
        w = ProgressionWitness.from_json(data)
        tm = TransferMap.from_json(_read_json(args.map), args.dm, args.dmp)
        if args.d is not None or args.d_prime is not None:
            tm = TransferMap(tm.d_M, tm.d_Mp, tm.assignment,
                             args.d if args.d is not None else tm.d,
                             args.d_prime if args.d_prime is not None else tm.d_prime)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed input: {exc!r}") from exc
    tp = transfer_progression(w, tm, args.k, **_build_opts(args, cache))
    _emit(tp.to_json(), out, args.out)
    return EXIT_OK


def cmd_density(args, out, cache) -> int:
    _emit(prime_density_report(args.disc, args.bound).to_json(), out)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="apgeo", description="Arithmetic progressions of primitive geodesic lengths.")
    parser.add_argument("--no-cache", action="store_true", help="ignore and do not write the n-value cache")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def builder_flags(p):
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--prime-bound", type=int, default=DEFAULT_PRIME_BOUND)
        p.add_argument("--cap", type=int, default=8, help="largest level tried for stability")
        p.add_argument("--out", help="write JSON here instead of stdout")

    p = sub.add_parser("progression", help="certified progression for an absolutely primitive gamma")
    p.add_argument("--gamma", type=_matrix, required=True)
    builder_flags(p)
    p.set_defaults(func=cmd_progression)

    p = sub.add_parser("contains", help="progression containing the length of a primitive gamma")
    p.add_argument("--gamma", type=_matrix, required=True)
    builder_flags(p)
    p.set_defaults(func=cmd_contains)

    p = sub.add_parser("verify", help="re-check a witness file")
    p.add_argument("file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("absprim", help="length class and primitivity of gamma")
    p.add_argument("--gamma", type=_matrix, required=True)
    p.set_defaults(func=cmd_absprim)

    p = sub.add_parser("nfun", help="n(gamma, eta_p^r) for the A1 element at p")
    p.add_argument("--gamma", type=_matrix, required=True)
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--brute", action="store_true", help="use the direct walk")
    p.set_defaults(func=cmd_nfun)

    p = sub.add_parser("kernel-check", help="order checks on the congruence kernel layers")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--i", type=int, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_kernel_check)

    p = sub.add_parser("vdw", help="Van der Waerden number by exhaustive search")
    p.add_argument("--colors", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--cap", type=int, required=True)
    p.set_defaults(func=cmd_vdw)

    p = sub.add_parser("transfer", help="carry a progression across a simulated cover")
    p.add_argument("--witness", required=True)
    p.add_argument("--dm", type=int, required=True)
    p.add_argument("--dmp", type=int, required=True)
    p.add_argument("--map", required=True, help="JSON array of [p, q] pairs, applied cyclically")
    p.add_argument("--d", type=int)
    p.add_argument("--d-prime", type=int)
    builder_flags(p)
    p.set_defaults(func=cmd_transfer)

    p = sub.add_parser("density", help="share of split primes for a real quadratic field")
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--bound", type=int, required=True)
    p.set_defaults(func=cmd_density)
    return parser


def run(argv: list[str] | None = None, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    cache_path = None if args.no_cache else os.environ.get("APGEO_CACHE", DEFAULT_CACHE)
    try:
        cache = NCache(cache_path)
        return args.func(args, out, cache)
    except CapExceededError as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    logging.basicConfig(format="%(levelname)s: %(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()
