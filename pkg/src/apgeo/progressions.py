"""Certified arithmetic progressions of primitive lengths.

Pipeline for an absolutely primitive gamma and k terms:

1. find k primes p_i = a*i + b (a sieve search below a bound);
2. put an A1 admissible element eta_p at each prime and pick a common level R
   past every stability radius;
3. C = lcm_p n(gamma, eta_p**R); raising the level at p_i alone to R+1 must
   give n = C*p_i, which is checked against the brute-force walk;
4. theta_i = (prod eta_p**r_p) gamma**(C*p_i) (prod eta_p**r_p)**-1 is an
   integral, primitive matrix whose length is C*p_i times the base length.

Every witness can be re-checked by ``verify_witness`` without trusting any of
the above.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from sympy import isprime, primefactors, primerange

from . import CapExceededError
from .exact_core import IntMatrix, mat_pow, matrix_from_json, matrix_to_json
from .filtration import (
    AdmissibleElement,
    StabilityError,
    build_admissible,
    conjugate_multi,
    n_of,
    n_of_multi,
    n_of_multi_brute,
    stability_radius,
)
from .geodesics import (
    LengthClass,
    abs_prim_root,
    hyperbolic,
    is_absolutely_primitive,
    is_primitive,
    length_class,
)
from .quad_units import kronecker, is_fundamental_discriminant

NFunc = Callable[[IntMatrix, AdmissibleElement, int], int]

DEFAULT_PRIME_BOUND = 10 ** 4
DEFAULT_CAP = 8
DEFAULT_MAX_MULTIPLIER = 2 * 10 ** 5
MAX_TERMS = 6


@dataclass(frozen=True)
class PrimeAP:
    a: int
    b: int
    k: int
    primes: tuple[int, ...]


def prime_ap_search(k: int, bound: int = DEFAULT_PRIME_BOUND,
                    exclude: Sequence[int] = (2,)) -> PrimeAP:
    """k primes p_i = a*i + b below ``bound``, least first term, then least
    difference.  For k = 1 the difference is recorded as 0."""
    if k < 1 or bound < 3:
        raise ValueError("need k >= 1 and bound >= 3")
    banned = set(exclude)
    primes = [p for p in primerange(2, bound + 1) if p not in banned]
    pool = set(primes)
    for p1 in primes:
        if k == 1:
            return PrimeAP(0, p1, 1, (p1,))
        step = 2 if p1 % 2 else 1
        a = step
        while p1 + (k - 1) * a <= bound:
            if all(p1 + i * a in pool for i in range(1, k)):
                return PrimeAP(a, p1 - a, k, tuple(p1 + i * a for i in range(k)))
            a += step
    raise CapExceededError(f"no {k}-term progression of admissible primes below {bound}")


def glue_constant(gamma_abs: IntMatrix, etas: Sequence[AdmissibleElement], R: int,
                  cap: int = DEFAULT_CAP, n_func: NFunc | None = None) -> int:
    """C = lcm of n(gamma, eta**R) over the given elements, all at level R."""
    n_func = n_func or n_of
    for eta in etas:
        radius = stability_radius(gamma_abs, eta, cap, n_func=n_func).R
        if R < radius:
            raise StabilityError(f"R = {R} is below the stability radius {radius} at v = {eta.v}")
    return n_of_multi(gamma_abs, [(eta, R) for eta in etas], n_func)


def clear_denominator(j: int, gamma: IntMatrix, R: int, etas: Sequence[AdmissibleElement] = (),
                      cap: int = DEFAULT_CAP, n_func: NFunc | None = None
                      ) -> list[tuple[AdmissibleElement, int]]:
    """Extra admissible elements at the primes u | j, each at a level r_u >= R + z_u
    (u**z_u exactly dividing j), raised until u**z_u divides n(gamma, zeta_u**r_u)."""
    if j < 1:
        raise ValueError("j must be positive")
    n_func = n_func or n_of
    taken = {eta.v for eta in etas}
    out = []
    for u in primefactors(j):
        if u in taken:
            raise ValueError(f"prime {u} is already used by the progression")
        z = 0
        while j % u ** (z + 1) == 0:
            z += 1
        zeta = build_admissible("A1", 2, u, (1, 2))
        r = max(R + z, 2 if u == 2 else 1)
        limit = R + z + cap
        while n_func(gamma, zeta, r) % u ** z:
            r += 1
            if r > limit:
                raise CapExceededError(f"could not clear {u}^{z} below level {limit}")
        out.append((zeta, r))
    return out


@dataclass
class Term:
    multiplier: int
    theta: IntMatrix
    exponents: dict[int, int]


@dataclass
class ProgressionWitness:
    base: LengthClass
    gamma_abs: IntMatrix
    C: int
    a: int
    b: int
    k: int
    primes: list[int]
    R: int
    terms: list[Term]
    clearing: dict[int, int] = field(default_factory=dict)
    target: IntMatrix | None = None  # gamma whose length the progression contains
    j: int = 1  # multiplier of the target length over the base length

    @property
    def multipliers(self) -> list[int]:
        return [t.multiplier for t in self.terms]

    def to_json(self) -> dict:
        out = {
            "base": self.base.to_json(),
            "gamma_abs": matrix_to_json(self.gamma_abs),
            "C": str(self.C),
            "a": self.a,
            "b": self.b,
            "k": self.k,
            "primes": list(self.primes),
            "R": self.R,
            "terms": [
                {
                    "multiplier": str(t.multiplier),
                    "theta": matrix_to_json(t.theta),
                    "exponents": {str(p): r for p, r in sorted(t.exponents.items())},
                }
                for t in self.terms
            ],
        }
        if self.clearing:
            out["clearing"] = {str(u): r for u, r in sorted(self.clearing.items())}
        if self.target is not None:
            out["target"] = {"gamma": matrix_to_json(self.target), "j": self.j}
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ProgressionWitness":
        target = data.get("target")
        return cls(
            base=LengthClass.from_json(data["base"]),
            gamma_abs=matrix_from_json(data["gamma_abs"]),
            C=int(data["C"]),
            a=int(data["a"]),
            b=int(data["b"]),
            k=int(data["k"]),
            primes=[int(p) for p in data["primes"]],
            R=int(data["R"]),
            terms=[
                Term(int(t["multiplier"]), matrix_from_json(t["theta"]),
                     {int(p): int(r) for p, r in t.get("exponents", {}).items()})
                for t in data["terms"]
            ],
            clearing={int(u): int(r) for u, r in data.get("clearing", {}).items()},
            target=matrix_from_json(target["gamma"]) if target else None,
            j=int(target["j"]) if target else 1,
        )


def _transpose_entry_nonzero(gamma: IntMatrix) -> None:
    # the A1 element scaling entry (1,2) puts its conditions on entry (2,1)
    if gamma[1, 0] == 0:
        raise ValueError("entry (2,1) vanishes; gamma is not hyperbolic")


def build_progression(gamma_abs: IntMatrix, k: int, *, prime_bound: int = DEFAULT_PRIME_BOUND,
                      cap: int = DEFAULT_CAP, max_multiplier: int = DEFAULT_MAX_MULTIPLIER,
                      clear: int = 1, n_func: NFunc | None = None,
                      target: IntMatrix | None = None, j: int = 1) -> ProgressionWitness:
    """A certified k-term progression {C*p_i * base length} for an absolutely
    primitive gamma_abs; ``clear`` forces clear | C / j (denominator clearing)."""
    if not 1 <= k <= MAX_TERMS:
        raise ValueError(f"k must lie in 1..{MAX_TERMS}")
    n_func = n_func or n_of
    g = hyperbolic(gamma_abs)
    if not is_absolutely_primitive(g):
        raise ValueError("input is not absolutely primitive")
    _transpose_entry_nonzero(gamma_abs)
    need = clear * j
    ap = prime_ap_search(k, prime_bound, exclude={2, *primefactors(need)})
    etas = {p: build_admissible("A1", 2, p, (1, 2)) for p in ap.primes}
    start = max(stability_radius(gamma_abs, eta, cap, n_func=n_func).R for eta in etas.values())

    for R in range(start, cap + 1):
        clearing = clear_denominator(need, gamma_abs, R, list(etas.values()), cap, n_func)
        base_powers = [(etas[p], R) for p in ap.primes] + clearing
        C = n_of_multi(gamma_abs, base_powers, n_func)
        term_powers = []
        for p in ap.primes:
            powers = [(eta, r + 1 if eta.v == p else r) for eta, r in base_powers]
            if n_of_multi(gamma_abs, powers, n_func) != C * p:
                break
            term_powers.append(powers)
        else:
            break
    else:
        raise CapExceededError(f"no common level R <= {cap} separates the primes {ap.primes}")

    if C % need:
        raise RuntimeError(f"{need} does not divide C = {C}")
    if C * ap.primes[-1] > max_multiplier:
        raise CapExceededError(f"multiplier {C * ap.primes[-1]} exceeds {max_multiplier}")

    terms = []
    for p, powers in zip(ap.primes, term_powers):
        m = C * p
        # independent walk over gamma**j modulo the full composite modulus
        if n_of_multi_brute(gamma_abs, powers) != m:
            raise RuntimeError(f"brute-force n disagrees with {m} at p = {p}")
        theta = conjugate_multi(powers, mat_pow(gamma_abs, m))
        if not theta.integral:
            raise RuntimeError(f"theta for p = {p} is not integral")
        theta = theta.as_int()
        if theta.det() != 1 or not is_primitive(hyperbolic(theta, g.d0)):
            raise RuntimeError(f"theta for p = {p} is not a primitive element")
        terms.append(Term(m, theta, {eta.v: r for eta, r in powers}))

    return ProgressionWitness(
        base=length_class(g), gamma_abs=gamma_abs, C=C, a=ap.a, b=ap.b, k=k,
        primes=list(ap.primes), R=R, terms=terms,
        clearing={eta.v: r for eta, r in clearing}, target=target, j=j,
    )


def build_progression_containing(gamma: IntMatrix, k: int, *, extra_clear: int = 1,
                                 **opts) -> ProgressionWitness:
    """Progression {C'(a*i + b) * length(gamma)} for a primitive gamma.

    gamma's eigenvalue is lam_mu**j for an absolutely primitive mu; the
    progression is built on mu with j cleared from its constant.
    """
    g = hyperbolic(gamma)
    if not is_primitive(g):
        raise ValueError("input is not primitive")
    if is_absolutely_primitive(g):
        w = build_progression(gamma, k, clear=extra_clear, **opts)
        if extra_clear > 1:
            w.target = gamma
        return w
    mu, j = abs_prim_root(g)
    return build_progression(mu.matrix, k, clear=extra_clear, target=gamma, j=j, **opts)


# -- verification ----------------------------------------------------------

@dataclass
class VerificationReport:
    checks: list[dict] = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append({"name": name, "pass": bool(ok), "detail": detail})

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    @property
    def failures(self) -> list[dict]:
        return [c for c in self.checks if not c["pass"]]

    def to_json(self) -> dict:
        return {"checks": self.checks, "passed": self.passed}


def _traces_of_powers(t: int, wanted: set[int]) -> dict[int, int]:
    """trace(g**m) for m in wanted via t_{m+1} = t*t_m - t_{m-1}, t_0 = 2."""
    out = {}
    prev, cur = 2, t
    if 0 in wanted:
        out[0] = 2
    top = max(wanted)
    for m in range(1, top + 1):
        if m in wanted:
            out[m] = cur
        prev, cur = cur, t * cur - prev
    return out


def _is_ap(xs: Sequence[int]) -> bool:
    return len({y - x for x, y in zip(xs, xs[1:])}) <= 1


def verify_witness(w: ProgressionWitness) -> VerificationReport:
    """Re-derive every statement in the witness from the matrices themselves."""
    rep = VerificationReport()
    try:
        g = hyperbolic(w.gamma_abs)
        lc = length_class(g)
        rep.add("base", lc == w.base and is_absolutely_primitive(g),
                f"recomputed {lc.to_json()}")
    except ValueError as exc:
        rep.add("base", False, str(exc))
        return rep

    rep.add("primes", all(isprime(p) for p in w.primes)
            and w.primes == [w.a * i + w.b for i in range(1, w.k + 1)]
            and len(w.terms) == w.k, f"{w.primes} = {w.a}*i + {w.b}")
    ms = w.multipliers
    rep.add("multipliers", ms == [w.C * p for p in w.primes] and _is_ap(ms)
            and all(m > 0 for m in ms), f"differences {w.C * w.a}")

    traces = _traces_of_powers(w.gamma_abs.trace(), {m for m in ms if m > 0} or {1})
    for i, term in enumerate(w.terms, 1):
        theta = term.theta
        t = theta.trace()
        shape_ok = theta.n == 2 and theta.det() == 1 and abs(t) > 2
        rep.add(f"theta[{i}].integral", shape_ok, f"det {theta.det()}, trace digits {len(str(abs(t)))}")
        rep.add(f"theta[{i}].trace", traces.get(term.multiplier) == t,
                "matches trace of gamma_abs^m")
        if not shape_ok:
            continue
        try:
            h = hyperbolic(theta, w.base.d0)
            mult = length_class(h).multiplier
            rep.add(f"theta[{i}].length", mult == term.multiplier * w.base.multiplier,
                    f"multiplier {mult}")
            rep.add(f"theta[{i}].primitive", is_primitive(h))
        except ValueError as exc:
            rep.add(f"theta[{i}].length", False, str(exc))
            rep.add(f"theta[{i}].primitive", False, str(exc))

    if w.target is not None:
        try:
            lt = length_class(hyperbolic(w.target))
            ok = (lt.d0 == w.base.d0 and lt.multiplier == w.j * w.base.multiplier
                  and w.C % w.j == 0 and is_primitive(hyperbolic(w.target)))
            rep.add("target", ok, f"C' = C/{w.j} = {w.C // w.j if w.j else '?'}")
        except ValueError as exc:
            rep.add("target", False, str(exc))
    return rep


# -- density of split primes ------------------------------------------------

@dataclass(frozen=True)
class DensityReport:
    d0: int
    bound: int
    primes: int
    split: int

    @property
    def proportion(self) -> float:
        return self.split / self.primes

    def to_json(self) -> dict:
        return {"d0": self.d0, "bound": self.bound, "primes": self.primes,
                "split": self.split, "proportion": self.proportion}


def prime_density_report(d0: int, bound: int) -> DensityReport:
    """Share of primes <= bound that split in Q(sqrt(d0))."""
    if d0 <= 0 or not is_fundamental_discriminant(d0):
        raise ValueError(f"{d0} is not a positive fundamental discriminant")
    if bound < 100:
        raise ValueError("bound must be >= 100")
    total = split = 0
    for p in primerange(2, bound + 1):
        total += 1
        split += kronecker(d0, p) == 1
    return DensityReport(d0, bound, total, split)
