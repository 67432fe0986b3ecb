"""Van der Waerden colorings and the transfer of progressions across covers.

A cover X of M and M' (degrees d_M, d_M') rescales each length of M by some
p/q with p | d_M and q | d_M'.  Coloring the terms of a long progression by
that ratio and taking a monochromatic sub-progression yields a progression
on M'.  The cover itself is not modelled: ``TransferMap`` supplies the ratio
for each index directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Callable, Sequence

from sympy import divisors

from . import CapExceededError
from .progressions import ProgressionWitness, VerificationReport, build_progression_containing, verify_witness

MAX_TRANSFER_N = 6


@dataclass(frozen=True)
class Coloring:
    colors: tuple[int, ...]
    r: int

    def __post_init__(self):
        object.__setattr__(self, "colors", tuple(int(c) for c in self.colors))
        if self.r < 1:
            raise ValueError("need at least one color")
        if any(not 0 <= c < self.r for c in self.colors):
            raise ValueError(f"colors must lie in [0, {self.r})")

    @classmethod
    def of(cls, colors: Sequence) -> "Coloring":
        """Relabel arbitrary hashable colors as 0, 1, ... in order of appearance."""
        labels: dict = {}
        idx = [labels.setdefault(c, len(labels)) for c in colors]
        return cls(tuple(idx), max(len(labels), 1))

    @property
    def N(self) -> int:
        return len(self.colors)

    def color(self, i: int) -> int:
        """Color of the 1-based index i."""
        return self.colors[i - 1]


def find_mono_ap(c: Coloring, k: int) -> tuple[int, int] | None:
    """Least (start, difference), 1-based, of a monochromatic k-term progression."""
    if k < 1:
        raise ValueError("k must be positive")
    n = c.N
    for start in range(1, n + 1):
        if k == 1:
            return start, 1
        col = c.color(start)
        for diff in range(1, (n - start) // (k - 1) + 1):
            if all(c.color(start + i * diff) == col for i in range(1, k)):
                return start, diff
    return None


@dataclass(frozen=True)
class VdwResult:
    r: int
    k: int
    cap: int
    N: int | None  # None: every N <= cap admits an avoiding coloring
    certificate: Coloring | None  # avoiding coloring of length N - 1 (or cap)

    def to_json(self) -> dict:
        return {
            "r": self.r, "k": self.k, "cap": self.cap,
            "N": self.N if self.N is not None else f"unknown above {self.cap}",
            "certificate": list(self.certificate.colors) if self.certificate else None,
        }


def _avoiding_coloring(n: int, r: int, k: int) -> list[int] | None:
    """First r-coloring of {1..n} (lexicographic) with no monochromatic k-AP."""
    colors: list[int] = []

    def closes_ap(pos: int) -> bool:
        # any k-AP ending at pos (0-based) with all terms the same color
        col = colors[pos]
        for diff in range(1, pos // (k - 1) + 1):
            if all(colors[pos - i * diff] == col for i in range(1, k)):
                return True
        return False

    def extend(pos: int, used: int) -> bool:
        if pos == n:
            return True
        # colors are interchangeable: never open more than one new color at a time
        for col in range(min(r, used + 1)):
            colors.append(col)
            if not (k == 1 or closes_ap(pos)) and extend(pos + 1, max(used, col + 1)):
                return True
            colors.pop()
        return False

    return colors if extend(0, 0) else None


def vdw_number(r: int, k: int, cap: int) -> VdwResult:
    """W(r, k) by exhaustive search over N = 1..cap."""
    if r < 1 or k < 1:
        raise ValueError("r and k must be positive")
    best: list[int] = []
    for n in range(1, cap + 1):
        found = _avoiding_coloring(n, r, k)
        if found is None:
            return VdwResult(r, k, cap, n, Coloring(tuple(best), r))
        best = found
    return VdwResult(r, k, cap, None, Coloring(tuple(best), r))


@dataclass(frozen=True)
class TransferMap:
    """Ratio p/q (p | d_M, q | d_M') picked up by the i-th term when moved to M'.

    ``assignment`` is applied cyclically to indices 1, 2, ...; ``d`` and
    ``d_prime`` relate the lengths by l = d' * l' / d.
    """

    d_M: int
    d_Mp: int
    assignment: tuple[tuple[int, int], ...]
    d: int = 1
    d_prime: int = 1

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple((int(p), int(q)) for p, q in self.assignment))
        if self.d_M < 1 or self.d_Mp < 1:
            raise ValueError("cover degrees must be positive")
        if not self.assignment:
            raise ValueError("empty assignment")
        for p, q in self.assignment:
            if p < 1 or q < 1 or self.d_M % p or self.d_Mp % q:
                raise ValueError(f"pair ({p}, {q}) does not divide ({self.d_M}, {self.d_Mp})")
        if self.d < 1 or self.d_prime < 1 or self.d_M % self.d or self.d_Mp % self.d_prime:
            raise ValueError("d must divide d_M and d' must divide d_M'")

    @property
    def D(self) -> int:
        return prod(divisors(self.d_M)) * prod(divisors(self.d_Mp))

    def pair(self, i: int) -> tuple[int, int]:
        return self.assignment[(i - 1) % len(self.assignment)]

    def coloring(self, n: int) -> Coloring:
        return Coloring.of([self.pair(i) for i in range(1, n + 1)])

    def to_json(self) -> dict:
        return {"d_M": self.d_M, "d_Mp": self.d_Mp, "d": self.d, "d_prime": self.d_prime,
                "assignment": [list(pq) for pq in self.assignment]}

    @classmethod
    def from_json(cls, data, d_M: int | None = None, d_Mp: int | None = None) -> "TransferMap":
        """Accepts the full object or a bare array of [p, q] pairs."""
        if isinstance(data, list):
            data = {"assignment": data}
        d_M = d_M if d_M is not None else data.get("d_M")
        d_Mp = d_Mp if d_Mp is not None else data.get("d_Mp")
        if d_M is None or d_Mp is None:
            raise ValueError("cover degrees missing")
        return cls(int(d_M), int(d_Mp), tuple(tuple(pq) for pq in data["assignment"]),
                   int(data.get("d", 1)), int(data.get("d_prime", 1)))


@dataclass
class TransferredProgression:
    witness: ProgressionWitness
    tm: TransferMap
    N: int
    start: int
    difference: int
    k: int
    multipliers: list[int] = field(default_factory=list)

    @property
    def indices(self) -> list[int]:
        return [self.start + i * self.difference for i in range(self.k)]

    @property
    def ratio(self) -> tuple[int, int]:
        return self.tm.pair(self.start)

    def to_json(self) -> dict:
        out = self.witness.to_json()
        p, q = self.ratio
        out["transfer"] = {
            **self.tm.to_json(),
            "D": str(self.tm.D),
            "p": p, "q": q,
            "N": self.N,
            "start": self.start, "difference": self.difference, "k": self.k,
            "indices": self.indices,
            "multipliers": [str(m) for m in self.multipliers],
        }
        return out

    @classmethod
    def from_json(cls, data: dict) -> "TransferredProgression":
        t = data["transfer"]
        return cls(ProgressionWitness.from_json(data), TransferMap.from_json(t), int(t["N"]),
                   int(t["start"]), int(t["difference"]), int(t["k"]),
                   [int(m) for m in t["multipliers"]])


def _transferred_multipliers(w: ProgressionWitness, tm: TransferMap, indices: list[int]) -> list[int]:
    p, q = tm.pair(indices[0])
    c_target = w.C // w.j
    out = []
    for t in indices:
        num = c_target * tm.d_prime * p * w.primes[t - 1]
        den = q * tm.d
        if num % den:
            raise ArithmeticError(f"transferred multiplier {num}/{den} is not an integer")
        out.append(num // den)
    return out


def transfer_progression(w: ProgressionWitness, tm: TransferMap, k: int, *,
                         n_cap: int = MAX_TRANSFER_N,
                         builder: Callable[..., ProgressionWitness] | None = None,
                         **build_opts) -> TransferredProgression:
    """Move a progression containing the target length across the cover.

    N grows from k until the ratio coloring of {1..N} has a monochromatic
    k-term progression; the witness is rebuilt with N terms and D cleared
    from its constant when the given one is too short or lacks D.
    """
    if k < 1:
        raise ValueError("k must be positive")
    builder = builder or build_progression_containing
    for n in range(k, n_cap + 1):
        found = find_mono_ap(tm.coloring(n), k)
        if found is not None:
            break
    else:
        raise CapExceededError(f"no monochromatic {k}-term progression for N <= {n_cap}")
    start, diff = found

    D = tm.D
    if w.k < n or (w.C // w.j) % D:
        target = w.target if w.target is not None else w.gamma_abs
        w = builder(target, n, extra_clear=D, **build_opts)
    indices = [start + i * diff for i in range(k)]
    return TransferredProgression(w, tm, n, start, diff, k, _transferred_multipliers(w, tm, indices))


def verify_transferred(tp: TransferredProgression) -> VerificationReport:
    """Witness checks plus checks on the transfer block."""
    rep = verify_witness(tp.witness)
    w, tm = tp.witness, tp.tm
    D = tm.D
    rep.add("transfer.D", (w.C // w.j) % D == 0 and w.C % w.j == 0, f"D = {D} divides C' = {w.C // w.j}")
    idx = tp.indices
    in_range = tp.difference >= 1 and idx[0] >= 1 and idx[-1] <= min(tp.N, w.k)
    rep.add("transfer.indices", in_range, f"{idx} within 1..{tp.N}")
    if not in_range:
        return rep
    mono = len({tm.pair(i) for i in idx}) == 1
    least = find_mono_ap(tm.coloring(tp.N), tp.k) == (tp.start, tp.difference)
    rep.add("transfer.monochromatic", mono and least, f"ratio {tm.pair(idx[0])}")
    try:
        expected = _transferred_multipliers(w, tm, idx)
        ok = expected == tp.multipliers and all(m > 0 for m in expected)
        diffs = {b - a for a, b in zip(expected, expected[1:])}
        rep.add("transfer.multipliers", ok and len(diffs) <= 1, "integral arithmetic progression")
    except ArithmeticError as exc:
        rep.add("transfer.multipliers", False, str(exc))
    return rep
