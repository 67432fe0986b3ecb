"""Real quadratic maximal orders and their unit groups.

An element of the maximal order of Q(sqrt(D0)) is written (a + b*sqrt(D0))/2
with a = b*D0 (mod 2).  Units are found by continued fractions; every
comparison is done exactly, floats only appear when estimating a logarithm
that is then confirmed by exact exponentiation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from functools import lru_cache

from sympy import factorint


def is_fundamental_discriminant(d: int) -> bool:
    if d in (0, 1):
        return False
    if d % 4 == 1:
        return _squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def _squarefree(m: int) -> bool:
    return all(e == 1 for e in factorint(abs(m)).values())


def fundamental_part(n: int) -> tuple[int, int]:
    """Write a positive non-square n = b^2 * D0 with D0 a fundamental discriminant.

    Only possible when n is congruent to 0 or 1 mod 4 (true for t^2 - 4).
    """
    if n <= 0 or math.isqrt(n) ** 2 == n:
        raise ValueError(f"{n} is not a positive non-square")
    if n % 4 not in (0, 1):
        raise ValueError(f"{n} is not a discriminant")
    core, square = 1, 1
    for p, e in factorint(n).items():
        if e % 2:
            core *= p
        square *= p ** (e // 2)
    if core % 4 == 1:
        return core, square
    if square % 2:
        raise ValueError(f"{n} has no fundamental part")
    return 4 * core, square // 2


def _exact_sign(x: int, y: int, d: int) -> int:
    """Sign of x + y*sqrt(d) for d > 0 not a square."""
    if x >= 0 and y >= 0:
        return 0 if x == 0 and y == 0 else 1
    if x <= 0 and y <= 0:
        return -1
    lhs, rhs = x * x, y * y * d
    if lhs == rhs:
        return 0
    bigger_is_x = lhs > rhs
    return (1 if x > 0 else -1) if bigger_is_x else (1 if y > 0 else -1)


@dataclass(frozen=True)
class QuadInt:
    """(a + b*sqrt(d0))/2 in the maximal order of Q(sqrt(d0))."""

    d0: int
    a: int
    b: int

    def __post_init__(self):
        if (self.a - self.b * self.d0) % 2:
            raise ValueError(f"({self.a} + {self.b}*sqrt({self.d0}))/2 is not integral")

    def __eq__(self, other):
        if isinstance(other, int):
            other = QuadInt(self.d0, 2 * other, 0)
        if not isinstance(other, QuadInt):
            return NotImplemented
        return (self.d0, self.a, self.b) == (other.d0, other.a, other.b)

    def __hash__(self):
        return hash((self.d0, self.a, self.b))

    def _coerce(self, other) -> "QuadInt":
        if isinstance(other, QuadInt):
            if other.d0 != self.d0:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, int):
            return QuadInt(self.d0, 2 * other, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadInt(self.d0, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadInt(self.d0, -self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadInt(self.d0, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        d = self.d0
        a = (self.a * o.a + self.b * o.b * d) // 2
        b = (self.a * o.b + self.b * o.a) // 2
        return QuadInt(d, a, b)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a non-unit")
        result = QuadInt(self.d0, 2, 0)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def norm(self) -> int:
        return (self.a * self.a - self.b * self.b * self.d0) // 4

    def trace(self) -> int:
        return self.a

    def conjugate(self):
        return type(self)(self.d0, self.a, -self.b)

    def rational_integer(self) -> int | None:
        return self.a // 2 if self.b == 0 and self.a % 2 == 0 else None

    def sign(self) -> int:
        return _exact_sign(self.a, self.b, self.d0)

    def __gt__(self, other) -> bool:
        return (self - other).sign() > 0

    def __lt__(self, other) -> bool:
        return (self - other).sign() < 0

    def log(self) -> float:
        """Natural log of |value|; a float estimate only."""
        a, b, d = abs(self.a), abs(self.b), self.d0
        if self.a * self.b < 0:
            # |x| small: use the norm to go through the large conjugate
            return math.log(abs(self.norm())) - self.conjugate().log()
        if a < 10 ** 15 and b < 10 ** 15:
            return math.log((a + b * math.sqrt(d)) / 2)
        # a + b*sqrt(d) with both terms positive; scale via integer sqrt
        scale = 10 ** 30
        approx = a * scale + b * math.isqrt(d * scale * scale)
        return math.log(approx) - math.log(scale) - math.log(2)

    def to_decimal(self, digits: int = 50) -> Decimal:
        with localcontext() as ctx:
            ctx.prec = digits + 10
            return (Decimal(self.a) + Decimal(self.b) * Decimal(self.d0).sqrt()) / 2

    def __str__(self) -> str:
        return f"({self.a} + {self.b}*sqrt({self.d0}))/2"


@dataclass(frozen=True, eq=False)
class QuadUnit(QuadInt):
    """A unit (norm +1 or -1) of the maximal order."""

    def __post_init__(self):
        super().__post_init__()
        if self.norm() not in (1, -1):
            raise ValueError(f"{self} has norm {self.norm()}, not a unit")

    @classmethod
    def of(cls, x: QuadInt) -> "QuadUnit":
        return cls(x.d0, x.a, x.b)

    def __mul__(self, other):
        out = QuadInt.__mul__(self, other)
        if isinstance(other, QuadUnit) or (isinstance(other, int) and other in (1, -1)):
            return QuadUnit.of(out)
        return out

    __rmul__ = __mul__

    def inverse(self) -> "QuadUnit":
        n = self.norm()
        return QuadUnit(self.d0, n * self.a, -n * self.b)

    def __pow__(self, e: int) -> "QuadUnit":
        if e < 0:
            return self.inverse() ** (-e)
        return QuadUnit.of(QuadInt.__pow__(self, e))

    def to_json(self) -> dict:
        return {"d0": self.d0, "a": str(self.a), "b": str(self.b)}

    @classmethod
    def from_json(cls, data: dict) -> "QuadUnit":
        return cls(int(data["d0"]), int(data["a"]), int(data["b"]))


def _check_d0(d0: int) -> None:
    if d0 <= 0:
        raise ValueError(f"discriminant {d0} must be positive")
    if not is_fundamental_discriminant(d0):
        raise ValueError(f"{d0} is not a fundamental discriminant")


@lru_cache(maxsize=None)
def fundamental_unit(d0: int) -> QuadUnit:
    """Smallest unit > 1 of the maximal order of Q(sqrt(d0)).

    Runs the continued fraction of the order generator w (w = (1+sqrt(d0))/2
    or sqrt(d0/4)) and returns the first p - q*conj(w) of norm +-1.
    """
    _check_d0(d0)
    if d0 % 4 == 1:
        d, P, Q = d0, 1, 2
        tr_w, nm_w = 1, (1 - d0) // 4
    else:
        d, P, Q = d0 // 4, 0, 1
        tr_w, nm_w = 0, -(d0 // 4)
    root = math.isqrt(d)
    p_prev, p = 0, 1
    q_prev, q = 1, 0
    while True:
        a = (P + root) // Q
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        # norm of p - q*w' where w, w' are the conjugate roots
        if abs(p * p - p * q * tr_w + q * q * nm_w) == 1:
            break
        P = a * Q - P
        Q = (d - P * P) // Q
    # p - q*w' in (a + b*sqrt(d0))/2 form
    if d0 % 4 == 1:
        return QuadUnit(d0, 2 * p - q, q)
    return QuadUnit(d0, 2 * p, q)


@lru_cache(maxsize=None)
def norm_one_generator(d0: int) -> QuadUnit:
    eps = fundamental_unit(d0)
    return eps if eps.norm() == 1 else eps * eps


def unit_exponent(lam: QuadInt, d0: int | None = None) -> int:
    """m with lam == u**m, u the norm-one generator; exact."""
    d0 = lam.d0 if d0 is None else d0
    if lam.d0 != d0:
        raise ValueError(f"unit lives in Q(sqrt({lam.d0})), not Q(sqrt({d0}))")
    if lam.norm() != 1:
        raise ValueError("unit_exponent needs a norm-one unit")
    if not lam > 1:
        raise ValueError("unit must exceed 1")
    u = norm_one_generator(d0)
    guess = max(1, round(lam.log() / u.log()))
    for m in (guess, guess - 1, guess + 1):
        if m >= 1 and u ** m == QuadUnit.of(lam):
            return m
    raise ValueError(f"{lam} is not a power of the norm-one generator {u}")


def kth_root_unit(lam: QuadInt, k: int) -> QuadUnit | None:
    """The norm-one unit mu with mu**k == lam, or None if the order has none."""
    if k < 1:
        raise ValueError("k must be positive")
    m = unit_exponent(lam)
    if m % k:
        return None
    return norm_one_generator(lam.d0) ** (m // k)


def kronecker(d: int, p: int) -> int:
    """Kronecker symbol (d/p) for a prime p."""
    if p == 2:
        if d % 2 == 0:
            return 0
        return 1 if d % 8 in (1, 7) else -1
    r = pow(d % p, (p - 1) // 2, p)
    return 0 if r == 0 else (1 if r == 1 else -1)
