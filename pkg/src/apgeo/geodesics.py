"""Hyperbolic elements of SL(2, Z) and the lengths of their closed geodesics.

A hyperbolic gamma with trace t has eigenvalues sign(t) * lam**(+-1) where
lam = (|t| + f*sqrt(D0))/2 > 1 and t^2 - 4 = f^2 * D0.  Lengths are kept as
integer multiples of 2*log(u), u the norm-one generator of the maximal order
of Q(sqrt(D0)); all comparisons stay in the integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import NamedTuple

from sympy import factorint

from .exact_core import IntMatrix
from .quad_units import (
    QuadUnit,
    fundamental_part,
    is_fundamental_discriminant,
    norm_one_generator,
    unit_exponent,
)


@dataclass(frozen=True)
class HyperbolicElement:
    matrix: IntMatrix
    trace: int
    d0: int
    lam: QuadUnit  # eigenvalue > 1 after sign normalisation
    sign: int  # sign of the trace; the eigenvalues are sign * lam**(+-1)

    @property
    def exponent(self) -> int:
        """Unit exponent m with lam = u**m."""
        return unit_exponent(self.lam)


@dataclass(frozen=True)
class LengthClass:
    """The length multiplier * 2*log(u), u the norm-one generator for d0."""

    d0: int
    base_trace: int
    multiplier: int

    def numeric(self, digits: int = 50) -> Decimal:
        u = norm_one_generator(self.d0)
        with localcontext() as ctx:
            ctx.prec = digits + 10
            value = 2 * self.multiplier * u.to_decimal(digits + 10).ln()
            ctx.prec = digits
            return +value

    def to_json(self) -> dict:
        return {"d0": self.d0, "base_trace": self.base_trace, "multiplier": str(self.multiplier)}

    @classmethod
    def from_json(cls, data: dict) -> "LengthClass":
        return cls(int(data["d0"]), int(data["base_trace"]), int(data["multiplier"]))


class Classification(NamedTuple):
    kind: str  # "elliptic" | "parabolic" | "hyperbolic"
    element: HyperbolicElement | None = None


def _check_sl2(a: IntMatrix) -> None:
    if a.n != 2:
        raise ValueError("only 2x2 matrices are supported")
    if a.det() != 1:
        raise ValueError(f"determinant {a.det()} != 1")


def classify(a: IntMatrix, d0: int | None = None) -> Classification:
    """Conjugacy type of a matrix in SL(2, Z), read off from |trace|.

    ``d0`` is an optional hint for the fundamental discriminant of t^2 - 4.
    It is checked, not trusted; it lets huge traces skip factorisation.
    """
    _check_sl2(a)
    t = a.trace()
    if abs(t) < 2:
        return Classification("elliptic")
    if abs(t) == 2:
        return Classification("parabolic")
    disc = t * t - 4
    if d0 is None:
        d0, f = fundamental_part(disc)
    else:
        if not is_fundamental_discriminant(d0) or disc % d0:
            raise ValueError(f"{d0} is not the fundamental discriminant of {disc}")
        f = math.isqrt(disc // d0)
        if f * f * d0 != disc:
            raise ValueError(f"{d0} is not the fundamental discriminant of {disc}")
    lam = QuadUnit(d0, abs(t), f)
    return Classification("hyperbolic", HyperbolicElement(a, t, d0, lam, 1 if t > 0 else -1))


def hyperbolic(a: IntMatrix, d0: int | None = None) -> HyperbolicElement:
    c = classify(a, d0)
    if c.element is None:
        raise ValueError(f"{a} is {c.kind}, not hyperbolic")
    return c.element


def length_class(g: HyperbolicElement) -> LengthClass:
    u = norm_one_generator(g.d0)
    return LengthClass(g.d0, u.trace(), unit_exponent(g.lam))


def _root_candidate(g: HyperbolicElement, d: int, tau: int) -> IntMatrix | None:
    """The unique mu = x*I + y*gamma in Q[gamma] with eigenvalue tau*lam**(1/d),
    returned only if it is integral."""
    m = unit_exponent(g.lam)
    nu = norm_one_generator(g.d0) ** (m // d)
    s = g.sign
    # gamma's eigenvalue is s*(a_m + b_m*sqrt(D))/2, the root's tau*(a_e + b_e*sqrt(D))/2
    y = Fraction(tau * nu.b, s * g.lam.b)
    x = (tau * nu.a - y * s * g.lam.a) / 2
    rows = []
    for i in range(2):
        row = []
        for j in range(2):
            v = y * g.matrix[i, j] + (x if i == j else 0)
            if v.denominator != 1:
                return None
            row.append(v.numerator)
        rows.append(tuple(row))
    return IntMatrix(tuple(rows))


def find_root(g: HyperbolicElement) -> tuple[IntMatrix, int] | None:
    """Some (mu, d) with d >= 2 and mu**d == gamma, or None if gamma is primitive.

    Any root commutes with gamma, so lies in Q[gamma]; its eigenvalue has
    absolute value u**(m/d).  A root of composite degree yields one of prime
    degree, so only prime divisors d of m are tried.
    """
    m = unit_exponent(g.lam)
    for d in sorted(factorint(m)):
        for tau in (1, -1):
            if tau ** d != g.sign:
                continue
            mu = _root_candidate(g, d, tau)
            if mu is not None:
                return mu, d
    return None


def is_primitive(g: HyperbolicElement) -> bool:
    return find_root(g) is None


def is_absolutely_primitive(g: HyperbolicElement) -> bool:
    """For n = 2, absolutely primitive exactly when lam is the norm-one generator."""
    return unit_exponent(g.lam) == 1


def companion(t: int) -> IntMatrix:
    return IntMatrix(((t, -1), (1, 0)))


def abs_prim_root(g: HyperbolicElement) -> tuple[HyperbolicElement, int]:
    """(mu, m) with mu absolutely primitive and lam_gamma = lam_mu**m."""
    u = norm_one_generator(g.d0)
    mu = hyperbolic(companion(u.trace()), g.d0)
    return mu, unit_exponent(g.lam)


def poly_in_P(t: int) -> bool:
    """Is z^2 - t*z + 1 the characteristic polynomial of a hyperbolic element?"""
    return abs(t) > 2
