"""Admissible diagonal elements and the conjugation-integrality function n.

An admissible element eta = diag(v**alpha_1, ..., v**alpha_n) is never built
as a matrix.  Only its conjugation action is stored: entry (i, j) of
eta A eta^-1 is v**(-beta_ij) * a_ij with beta_ij = alpha_j - alpha_i.
Hence eta**r gamma**j eta**-r is integral exactly when v**(r*beta_ij) divides
(gamma**j)_ij for every (i, j) with beta_ij > 0.

Index pairs in the public API are 1-based, as in matrix notation.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import NamedTuple, Sequence

from sympy import isprime

from . import CapExceededError
from .exact_core import IntMatrix, det, mat_pow, pow_rows_mod, _mul_rows

GROUP_TYPES = ("A1", "1A", "2A", "B/1D", "C", "2D")
DEFAULT_MAX_ITER = 10 ** 7


class StabilityError(CapExceededError):
    """No stability radius was found below the cap."""


@dataclass(frozen=True)
class AdmissibleElement:
    v: int
    n: int
    alpha: tuple[Fraction, ...]
    beta: tuple[tuple[int, ...], ...]
    beta_eta: int
    T: tuple[tuple[int, int], ...]  # 1-based positions with beta > 0
    group_type: str

    @property
    def max_beta(self) -> int:
        return max(self.beta[i - 1][j - 1] for i, j in self.T)

    def conditions(self, r: int) -> list[tuple[int, int, int]]:
        """(row, col, modulus) triples, 0-based, that must divide (gamma**j)."""
        return [(i - 1, j - 1, self.v ** (r * self.beta[i - 1][j - 1])) for i, j in self.T]

    def to_json(self) -> dict:
        return {
            "v": self.v,
            "n": self.n,
            "alpha": [str(a) for a in self.alpha],
            "beta": [list(row) for row in self.beta],
            "beta_eta": self.beta_eta,
            "T": [list(p) for p in self.T],
            "group_type": self.group_type,
        }

    @classmethod
    def from_json(cls, data: dict) -> "AdmissibleElement":
        return cls(
            v=int(data["v"]),
            n=int(data["n"]),
            alpha=tuple(Fraction(a) for a in data["alpha"]),
            beta=tuple(tuple(int(x) for x in row) for row in data["beta"]),
            beta_eta=int(data["beta_eta"]),
            T=tuple(tuple(p) for p in data["T"]),
            group_type=data["group_type"],
        )


def beta_from_alpha(alpha: Sequence[Fraction]) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(aj) - Fraction(ai) for aj in alpha) for ai in alpha)


def _involution(group_type: str, n: int, p: int | None, q: int | None):
    """Index pairing i -> sigma(i) (0-based) under which root subgroups pair
    position (i, j) with (sigma(j), sigma(i)); None for split SL_n."""
    if group_type in ("A1", "1A"):
        return None
    if group_type == "2D":
        return lambda i: n - 1 - i
    if group_type == "C":
        half = n // 2
        return lambda i: i + half if i < half else i - half
    # 2A, B/1D: anisotropic block of size q - p fixed, rest paired by i -> 2q + 1 - i
    aniso = q - p
    return lambda i: i if i < aniso else 2 * q - 1 - i


def _form_params(group_type: str, n: int, p: int | None, q: int | None):
    if group_type == "C":
        if p is None or q is None or 2 * (p + q) != n:
            raise ValueError("type C needs p, q with n = 2(p + q)")
    elif group_type in ("2A", "B/1D"):
        if p is None or q is None or p + q != n or q < p:
            raise ValueError(f"type {group_type} needs p <= q with n = p + q")


def is_admissible(beta, group_type: str = "1A", p: int | None = None, q: int | None = None) -> bool:
    """Integral exponents constant on root subgroups, with T non-empty."""
    n = len(beta)
    try:
        b = [[Fraction(x) for x in row] for row in beta]
    except (TypeError, ValueError):
        return False
    if any(x.denominator != 1 for row in b for x in row):
        return False
    if not any(x > 0 for row in b for x in row):
        return False
    sigma = _involution(group_type, n, p, q)
    if sigma is not None:
        for i in range(n):
            for j in range(n):
                if i != j and b[i][j] != b[sigma(j)][sigma(i)]:
                    return False
    return True


def build_admissible(group_type: str, n: int, v: int, kk: tuple[int, int],
                     p: int | None = None, q: int | None = None) -> AdmissibleElement:
    """The recipe element for the given classical type, normalised so that
    conjugation multiplies entry kk by a positive power of v (beta[kk] < 0)
    and divides its transpose.

    ``p``, ``q`` describe the form for types C (n = 2(p+q)) and 2A, B/1D
    (n = p + q, q >= p).
    """
    if group_type not in GROUP_TYPES:
        raise ValueError(f"unknown group type {group_type!r}")
    if not isprime(v):
        raise ValueError(f"{v} is not prime")
    k, k2 = kk
    if k == k2:
        raise ValueError("kk must be an off-diagonal pair")
    if not (1 <= k <= n and 1 <= k2 <= n):
        raise ValueError(f"pair {kk} out of range for n = {n}")
    _form_params(group_type, n, p, q)
    m = [Fraction(0)] * (n + 1)  # 1-based exponents

    if group_type == "A1":
        if n != 2:
            raise ValueError("type A1 recipe is 2x2")
        m[1], m[2] = (Fraction(1, 2), Fraction(-1, 2)) if kk == (1, 2) else (Fraction(-1, 2), Fraction(1, 2))
    elif group_type in ("1A", "2D"):
        partner = n - k + 1
        if partner == k:
            raise ValueError(f"index {k} is self-paired for n = {n}")
        m[k], m[partner] = Fraction(1), Fraction(-1)
    elif group_type == "C":
        block = set(range(1, p + 1)) | set(range(p + q + 1, 2 * p + q + 1))
        if (k in block) == (k2 in block):
            raise ValueError(f"type C: {k} and {k2} lie together in "
                             f"{{1..{p}, {p + q + 1}..{2 * p + q}}} or its complement")
        half = n // 2
        m[k2] = Fraction(1)
        m[k2 + half if k2 <= half else k2 - half] = Fraction(-1)
    else:  # 2A, B/1D
        aniso = q - p
        if k <= aniso and k2 <= aniso:
            raise ValueError(f"both {k} and {k2} lie in the anisotropic block 1..{aniso}")
        if k == 2 * q - k2 + 1:
            raise ValueError("k = 2q - k' + 1 makes a power of gamma diagonal")
        if k <= p:
            idx, partner, sgn = k2, 2 * q - k2 + 1, 1
        else:
            idx, partner, sgn = k, 2 * q - k + 1, -1
        if not (aniso < idx <= n and aniso < partner <= n):
            raise ValueError(f"recipe index {idx} falls outside the isotropic block")
        m[idx], m[partner] = Fraction(sgn), Fraction(-sgn)

    alpha = tuple(m[1:])
    beta = beta_from_alpha(alpha)
    if beta[k - 1][k2 - 1] > 0:
        alpha = tuple(-a for a in alpha)
        beta = beta_from_alpha(alpha)
    if beta[k - 1][k2 - 1] == 0:
        raise ValueError(f"recipe leaves entry {kk} unscaled")
    if not is_admissible(beta, group_type, p, q):
        raise ValueError("recipe produced a non-admissible element")
    ibeta = tuple(tuple(int(x) for x in row) for row in beta)
    T = tuple((i + 1, j + 1) for i in range(n) for j in range(n) if ibeta[i][j] > 0)
    beta_eta = reduce(math.lcm, (ibeta[i - 1][j - 1] for i, j in T))
    return AdmissibleElement(v, n, alpha, ibeta, beta_eta, T, group_type)


class ScaledConjugate(NamedTuple):
    entries: tuple[tuple[Fraction, ...], ...]
    integral: bool

    def as_int(self) -> IntMatrix:
        if not self.integral:
            raise ValueError("conjugate is not integral")
        return IntMatrix(tuple(tuple(x.numerator for x in row) for row in self.entries))


def conjugate_scaled(eta: AdmissibleElement, r: int, a: IntMatrix) -> ScaledConjugate:
    return conjugate_multi([(eta, r)], a)


def conjugate_multi(powers: Sequence[tuple[AdmissibleElement, int]], a: IntMatrix) -> ScaledConjugate:
    """Conjugate a by the product of eta**r over ``powers``."""
    n = a.n
    for eta, _ in powers:
        if eta.n != n:
            raise ValueError("dimension mismatch")
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            num, den = a[i, j], 1
            for eta, r in powers:
                e = r * eta.beta[i][j]
                if e > 0:
                    den *= eta.v ** e
                elif e < 0:
                    num *= eta.v ** (-e)
            row.append(Fraction(num, den))
        rows.append(tuple(row))
    entries = tuple(rows)
    return ScaledConjugate(entries, all(x.denominator == 1 for row in entries for x in row))


# -- orders in SL(n, Z/p^r) ----------------------------------------------

def _is_identity_mod(rows, m: int) -> bool:
    return all((x - (i == j)) % m == 0 for i, row in enumerate(rows) for j, x in enumerate(row))


def _order_of(rows, m: int, bound: int) -> int:
    """Multiplicative order of rows modulo m by direct iteration."""
    base = tuple(tuple(x % m for x in row) for row in rows)
    cur = base
    for k in range(1, bound + 1):
        if _is_identity_mod(cur, m):
            return k
        cur = _mul_rows(cur, base, m)
    raise CapExceededError(f"order exceeds {bound}")


def order_mod(a: IntMatrix, p: int, r: int, max_iter: int = DEFAULT_MAX_ITER) -> int:
    """Order of a in SL(n, Z/p^r), lifted one level at a time: the order
    mod p^(s+1) is the order mod p^s times the order of a**ord_s mod p^(s+1)."""
    if r < 1:
        raise ValueError("r must be >= 1")
    order = _order_of(a.rows, p, max_iter)
    for s in range(1, r):
        m = p ** (s + 1)
        b = pow_rows_mod(a.rows, order, m)
        order *= _order_of(b, m, max_iter)
    return order


# -- the function n -------------------------------------------------------

def _satisfied(rows, conds) -> bool:
    return all(rows[i][j] % mod == 0 for i, j, mod in conds)


def n_table_brute(gamma: IntMatrix, eta: AdmissibleElement, r_max: int,
                  max_iter: int = DEFAULT_MAX_ITER) -> dict[int, int]:
    """{r: n(gamma, eta**r)} for r = 1..r_max from a single walk j = 1, 2, ...
    over gamma**j mod v**(r_max * max beta).  The reference oracle."""
    if r_max < 1:
        raise ValueError("r must be >= 1")
    modulus = eta.v ** (r_max * eta.max_beta)
    conds = {r: eta.conditions(r) for r in range(1, r_max + 1)}
    bound = min(order_mod(gamma, eta.v, r_max * eta.max_beta, max_iter), max_iter)
    base = tuple(tuple(x % modulus for x in row) for row in gamma.rows)
    cur = base
    table: dict[int, int] = {}
    pending = set(conds)
    for j in range(1, bound + 1):
        for r in sorted(pending):
            if _satisfied(cur, conds[r]):
                table[r] = j
        pending -= set(table)
        if not pending:
            return table
        cur = _mul_rows(cur, base, modulus)
    raise CapExceededError(f"n(gamma, eta^{max(pending)}) exceeds {bound}")


def n_of_brute(gamma: IntMatrix, eta: AdmissibleElement, r: int,
               max_iter: int = DEFAULT_MAX_ITER) -> int:
    return n_table_brute(gamma, eta, r, max_iter)[r]


def _first_power(rows, conds, modulus: int, max_iter: int) -> int:
    base = tuple(tuple(x % modulus for x in row) for row in rows)
    cur = base
    for k in range(1, max_iter + 1):
        if _satisfied(cur, conds):
            return k
        cur = _mul_rows(cur, base, modulus)
    raise CapExceededError(f"no power below {max_iter} satisfies the conditions")


def n_table(gamma: IntMatrix, eta: AdmissibleElement, r_max: int,
            max_iter: int = DEFAULT_MAX_ITER) -> dict[int, int]:
    """{r: n(gamma, eta**r)} by lifting.

    The admissible exponents j at level r form the subgroup n_r * Z, nested
    in r, so n_{r+1} = n_r * k with k the least power of gamma**n_r that
    meets the level r+1 conditions.
    """
    if r_max < 1:
        raise ValueError("r must be >= 1")
    top = eta.max_beta
    modulus = eta.v ** top
    n = _first_power(gamma.rows, eta.conditions(1), modulus, max_iter)
    table = {1: n}
    for r in range(2, r_max + 1):
        modulus = eta.v ** (r * top)
        a = pow_rows_mod(gamma.rows, n, modulus)
        n *= _first_power(a, eta.conditions(r), modulus, max_iter)
        table[r] = n
    return table


def n_of(gamma: IntMatrix, eta: AdmissibleElement, r: int,
         max_iter: int = DEFAULT_MAX_ITER) -> int:
    return n_table(gamma, eta, r, max_iter)[r]


def n_of_multi(gamma: IntMatrix, powers: Sequence[tuple[AdmissibleElement, int]], n_func=None) -> int:
    """n for a product of admissible elements at distinct primes: the lcm of
    the individual values, since the congruence conditions are independent."""
    n_func = n_func or n_of
    primes = [eta.v for eta, _ in powers]
    if len(set(primes)) != len(primes):
        raise ValueError("admissible elements must sit at distinct primes")
    return reduce(math.lcm, (n_func(gamma, eta, r) if r > 0 else 1 for eta, r in powers), 1)


def n_of_multi_brute(gamma: IntMatrix, powers: Sequence[tuple[AdmissibleElement, int]],
                     max_iter: int = DEFAULT_MAX_ITER) -> int:
    """Walk gamma**j modulo the product of all prime-power moduli."""
    conds = []
    modulus = 1
    for eta, r in powers:
        if r > 0:
            conds += eta.conditions(r)
            modulus *= eta.v ** (r * eta.max_beta)
    return _first_power(gamma.rows, conds, modulus, max_iter)


# -- kernel-layer orders ---------------------------------------------------

@dataclass
class KernelReport:
    n: int
    p: int
    i: int
    mode: str
    checked: int = 0
    violations: list = field(default_factory=list)
    excluded_witnesses: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "n": self.n, "p": self.p, "i": self.i, "mode": self.mode,
            "checked": self.checked, "passed": self.passed,
            "violations": self.violations,
            "excluded_case_witnesses": self.excluded_witnesses,
        }


def _check_kernel_element(rows, n: int, p: int, i: int, report: KernelReport) -> None:
    top = p ** (i + 2)
    mid = p ** (i + 1)
    image = tuple(tuple(x % mid for x in row) for row in rows)
    report.checked += 1
    if not _is_identity_mod(pow_rows_mod(image, p, mid), mid):
        report.violations.append({"B": [list(r) for r in rows], "failure": "order not in {1, p}"})
        return
    if _is_identity_mod(image, mid):
        return
    if _is_identity_mod(pow_rows_mod(rows, p, top), top):
        entry = {"B": [list(r) for r in rows], "failure": "B^p = I"}
        if (p, i) == (2, 1):
            report.excluded_witnesses.append(entry)
        else:
            report.violations.append(entry)


def kernel_order_check(n: int, p: int, i: int, mode: str = "sampled", samples: int = 500,
                       seed: int = 0) -> KernelReport:
    """Check element orders in the kernel layers of SL(n, Z/p^(i+2)).

    For every (or a sample of) B = I (mod p^i): the image mod p^(i+1) has
    order 1 or p, and when that image is non-trivial B^p != I mod p^(i+2),
    except in the case p = 2, i = 1 where witnesses are collected instead.
    """
    if not isprime(p) or i < 1 or n < 2:
        raise ValueError("need prime p, i >= 1, n >= 2")
    top = p ** (i + 2)
    report = KernelReport(n, p, i, mode)
    if mode == "exhaustive":
        if n != 2 or p > 3 or i > 2:
            raise ValueError("exhaustive mode is limited to n = 2, p <= 3, i <= 2")
        lift = p ** 2
        for c in range(lift ** 4):
            digits = [(c // lift ** k) % lift for k in range(4)]
            rows = ((1 + p ** i * digits[0], p ** i * digits[1]),
                    (p ** i * digits[2], 1 + p ** i * digits[3]))
            rows = tuple(tuple(x % top for x in row) for row in rows)
            if det(rows) % top == 1:
                _check_kernel_element(rows, n, p, i, report)
        return report
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    rng = random.Random(seed)
    for _ in range(samples):
        rows = [[(int(a == b) + p ** i * rng.randrange(p ** 2)) % top for b in range(n)]
                for a in range(n)]
        # det is affine in entry (0,0) with a unit slope (the minor is 1 mod p)
        minor = det([row[1:] for row in rows[1:]])
        defect = (1 - det(rows)) % top
        rows[0][0] = (rows[0][0] + defect * pow(minor, -1, top)) % top
        _check_kernel_element(tuple(tuple(r) for r in rows), n, p, i, report)
    return report


# -- stability of the lifting law -------------------------------------------

@dataclass
class StabilityReport:
    gamma: IntMatrix
    v: int
    table: list[tuple[int, int]]
    R: int
    omega: int
    epsilons: list[int]

    def to_json(self) -> dict:
        return {
            "gamma": [[str(x) for x in row] for row in self.gamma.rows],
            "v": self.v,
            "table": [[r, str(n)] for r, n in self.table],
            "R": self.R,
            "omega": self.omega,
            "epsilons": self.epsilons,
        }


def _v_exponent(x: int, v: int) -> int | None:
    """e with x == v**e, else None."""
    e = 0
    while x % v == 0:
        x //= v
        e += 1
    return e if x == 1 else None


def stability_radius(gamma: IntMatrix, eta: AdmissibleElement, cap: int = 8,
                     window: int = 3, n_func=None) -> StabilityReport:
    """Least R <= cap such that for r in R..R+window every ratio
    n(gamma, eta**(r+1)) / n(gamma, eta**r) is 1 or v**omega, one omega
    dividing beta_eta (and at least one jump is seen).  Probing starts at
    r = 2 when v = 2."""
    if cap < 2:
        raise ValueError("cap must be >= 2")
    v = eta.v
    start = 2 if v == 2 else 1
    if n_func is None:
        values = n_table(gamma, eta, cap + window + 1)
    else:
        values = {r: n_func(gamma, eta, r) for r in range(1, cap + window + 2)}
    for R in range(start, cap + 1):
        exps = [_v_exponent(values[r + 1] // values[r], v) for r in range(R, R + window + 1)]
        if any(e is None for e in exps):
            continue
        jumps = {e for e in exps if e}
        if len(jumps) != 1:
            continue
        omega = jumps.pop()
        if eta.beta_eta % omega:
            continue
        table = [(r, values[r]) for r in range(1, R + window + 2)]
        return StabilityReport(gamma, v, table, R, omega, [int(e > 0) for e in exps])
    raise StabilityError(f"no stability radius <= {cap} for v = {v}")


def prime_power_series(gamma: IntMatrix, eta: AdmissibleElement, r_max: int):
    """[(r, n_r, theta_r)] with theta_r = eta**r gamma**n_r eta**-r."""
    out = []
    for r, n in sorted(n_table(gamma, eta, r_max).items()):
        theta = conjugate_scaled(eta, r, mat_pow(gamma, n)).as_int()
        out.append((r, n, theta))
    return out
