"""Exact integer and residue-ring matrix arithmetic.

Everything here works on Python ints; nothing is ever rounded.  Matrices are
small (n <= 8) but their entries can run to tens of thousands of digits, so
powers always go through repeated squaring.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from sympy import factorint

MAX_DIM = 8


class NotIntegralError(ValueError):
    """Raised when symmetric functions of the inputs are not rational integers."""


def _check_rows(rows: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    n = len(rows)
    if not 1 <= n <= MAX_DIM:
        raise ValueError(f"dimension {n} outside 1..{MAX_DIM}")
    out = []
    for row in rows:
        if len(row) != n:
            raise ValueError("matrix must be square")
        out.append(tuple(int(x) for x in row))
    return tuple(out)


@dataclass(frozen=True)
class IntMatrix:
    """Square matrix over Z, stored row-major as nested tuples."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", _check_rows(self.rows))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        return mat_mul(self, other)

    def __pow__(self, e: int) -> "IntMatrix":
        return mat_pow(self, e)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(tuple(tuple(-x for x in row) for row in self.rows))

    def trace(self) -> int:
        return sum(self.rows[i][i] for i in range(self.n))

    def det(self) -> int:
        return det(self.rows)

    def is_unimodular(self) -> bool:
        return self.det() == 1

    def reduce(self, modulus: int) -> "ResidueMatrix":
        return ResidueMatrix(self.rows, modulus)

    def __str__(self) -> str:
        return format_matrix(self)


def _is_prime_power(m: int) -> bool:
    return m >= 2 and len(factorint(m)) == 1


@dataclass(frozen=True)
class ResidueMatrix:
    """Square matrix over Z/p^r with entries normalised to [0, p^r)."""

    rows: tuple[tuple[int, ...], ...]
    modulus: int

    def __post_init__(self):
        if not _is_prime_power(self.modulus):
            raise ValueError(f"modulus {self.modulus} is not a prime power")
        rows = _check_rows(self.rows)
        m = self.modulus
        object.__setattr__(self, "rows", tuple(tuple(x % m for x in row) for row in rows))

    @property
    def n(self) -> int:
        return len(self.rows)

    def is_identity(self) -> bool:
        return all(x == int(i == j) % self.modulus
                   for i, row in enumerate(self.rows) for j, x in enumerate(row))

    def det(self) -> int:
        return det(self.rows) % self.modulus

    def __matmul__(self, other: "ResidueMatrix") -> "ResidueMatrix":
        if other.modulus != self.modulus:
            raise ValueError("modulus mismatch")
        return ResidueMatrix(_mul_rows(self.rows, other.rows, self.modulus), self.modulus)


def _mul_rows(a, b, modulus: int | None = None):
    n = len(a)
    if len(b) != n:
        raise ValueError(f"dimension mismatch: {n} vs {len(b)}")
    cols = list(zip(*b))
    if modulus is None:
        return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) % modulus for col in cols)
                 for row in a)


def mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    return IntMatrix(_mul_rows(a.rows, b.rows))


def mat_pow(a: IntMatrix, e: int) -> IntMatrix:
    if e < 0:
        raise ValueError("exponent must be non-negative")
    result = IntMatrix.identity(a.n).rows
    base = a.rows
    while e:
        if e & 1:
            result = _mul_rows(result, base)
        e >>= 1
        if e:
            base = _mul_rows(base, base)
    return IntMatrix(result)


def mat_pow_mod(a: IntMatrix | ResidueMatrix, e: int, m: int) -> ResidueMatrix:
    """a**e reduced mod the prime power m, never forming the full power."""
    if e < 0:
        raise ValueError("exponent must be non-negative")
    if not _is_prime_power(m):
        raise ValueError(f"modulus {m} is not a prime power")
    return ResidueMatrix(pow_rows_mod(a.rows, e, m), m)


def pow_rows_mod(rows, e: int, m: int):
    """Row-tuple power mod an arbitrary modulus m >= 1 (internal workhorse)."""
    n = len(rows)
    result = tuple(tuple(int(i == j) % m for j in range(n)) for i in range(n))
    base = tuple(tuple(x % m for x in row) for row in rows)
    while e:
        if e & 1:
            result = _mul_rows(result, base, m)
        e >>= 1
        if e:
            base = _mul_rows(base, base, m)
    return result


def det(rows: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free elimination; exact for integer input."""
    a = [list(r) for r in rows]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class MonicPoly:
    """Monic integer polynomial; coeffs run from z^n down to the constant term."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if not self.coeffs or self.coeffs[0] != 1:
            raise ValueError("polynomial must be monic")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def constant_term(self) -> int:
        return self.coeffs[-1]

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            power = self.degree - k
            if c == 0:
                continue
            mono = "" if power == 0 else ("z" if power == 1 else f"z^{power}")
            mag = abs(c)
            body = mono if mag == 1 and mono else f"{mag}{mono}"
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        if not terms:
            return "0"
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


def char_poly(a: IntMatrix) -> MonicPoly:
    """Faddeev-LeVerrier; every division below is exact over Z."""
    n = a.n
    m = IntMatrix.identity(n).rows
    coeffs = [1]
    for k in range(1, n + 1):
        am = _mul_rows(a.rows, m)
        tr = sum(am[i][i] for i in range(n))
        if tr % k:
            raise ArithmeticError("non-exact division in Faddeev-LeVerrier")
        c = -tr // k
        coeffs.append(c)
        m = tuple(tuple(am[i][j] + (c if i == j else 0) for j in range(n)) for i in range(n))
    return MonicPoly(tuple(coeffs))


def _as_rational_integer(x) -> int | None:
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else None
    probe = getattr(x, "rational_integer", None)
    if probe is not None:
        return probe()
    return None


def q_poly(xs: Iterable) -> MonicPoly:
    """prod(z - x_i) expanded; the coefficients are the signed elementary
    symmetric functions of the inputs.

    Inputs may be rationals or quadratic integers (anything exposing
    ``rational_integer()``).  Raises NotIntegralError when some coefficient is
    not a rational integer, i.e. the polynomial is not in Z[z].
    """
    coeffs: list = [1]
    for x in xs:
        nxt = coeffs + [0]
        for k in range(1, len(nxt)):
            nxt[k] = nxt[k] - x * coeffs[k - 1]
        coeffs = nxt
    out = []
    for k, c in enumerate(coeffs):
        v = _as_rational_integer(c)
        if v is None:
            raise NotIntegralError(f"coefficient of z^{len(coeffs) - 1 - k} is {c}, not in Z")
        out.append(v)
    return MonicPoly(tuple(out))


# -- serialisation -------------------------------------------------------

def parse_matrix(text: str) -> IntMatrix:
    """Parse row-major ``"a,b;c,d"`` syntax."""
    try:
        rows = [[int(x) for x in row.split(",")] for row in text.strip().split(";")]
    except ValueError as exc:
        raise ValueError(f"malformed matrix string {text!r}") from exc
    return IntMatrix(tuple(tuple(r) for r in rows))


def format_matrix(a: IntMatrix) -> str:
    return ";".join(",".join(str(x) for x in row) for row in a.rows)


def matrix_to_json(a: IntMatrix | ResidueMatrix) -> list[list[str]]:
    return [[str(x) for x in row] for row in a.rows]


def matrix_from_json(data) -> IntMatrix:
    if isinstance(data, str):
        data = json.loads(data)
    return IntMatrix(tuple(tuple(int(x) for x in row) for row in data))
