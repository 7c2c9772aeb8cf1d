"""Rational functions over GF(2) in one variable, with t-adic valuation.

Polynomials are Python ints (bit i = coefficient of t^i).  An element is
``t^shift * num / den`` with ``num`` and ``den`` not divisible by ``t`` and
coprime.  When exponents of the Novikov variable all lie in ``(1/D)Z`` the
substitution ``t = tau^(1/D)`` embeds these exact computations in the Novikov
field, so elimination never needs a truncated inverse.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from .novikov import NovikovScalar


def pmul(a: int, b: int) -> int:
    if a.bit_length() < b.bit_length():
        a, b = b, a
    out = 0
    i = 0
    while b:
        if b & 1:
            out ^= a << i
        b >>= 1
        i += 1
    return out


def pdivmod(a: int, b: int):
    if b == 0:
        raise ZeroDivisionError("polynomial division by zero")
    q = 0
    db = b.bit_length()
    while a and a.bit_length() >= db:
        s = a.bit_length() - db
        q ^= 1 << s
        a ^= b << s
    return q, a


def pgcd(a: int, b: int) -> int:
    while b:
        a, b = b, pdivmod(a, b)[1]
    return a


def _tz(a: int) -> int:
    return (a & -a).bit_length() - 1


class RF:
    __slots__ = ("num", "den", "shift")

    def __init__(self, num: int, den: int = 1, shift: int = 0):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if num == 0:
            self.num, self.den, self.shift = 0, 1, 0
            return
        z = _tz(num)
        num >>= z
        shift += z
        z = _tz(den)
        den >>= z
        shift -= z
        g = pgcd(num, den)
        if g != 1:
            num = pdivmod(num, g)[0]
            den = pdivmod(den, g)[0]
        self.num, self.den, self.shift = num, den, shift

    def is_zero(self) -> bool:
        return self.num == 0

    def __bool__(self) -> bool:
        return self.num != 0

    def __add__(self, other: "RF") -> "RF":
        if not self.num:
            return other
        if not other.num:
            return self
        m = min(self.shift, other.shift)
        a = pmul(self.num, other.den) << (self.shift - m)
        b = pmul(other.num, self.den) << (other.shift - m)
        return RF(a ^ b, pmul(self.den, other.den), m)

    __sub__ = __add__

    def __mul__(self, other: "RF") -> "RF":
        if not self.num or not other.num:
            return ZERO_RF
        return RF(pmul(self.num, other.num), pmul(self.den, other.den), self.shift + other.shift)

    def inverse(self) -> "RF":
        if not self.num:
            raise ZeroDivisionError("inverse of zero")
        return RF(self.den, self.num, -self.shift)

    def __truediv__(self, other: "RF") -> "RF":
        return self * other.inverse()

    def __eq__(self, other) -> bool:
        return (self.num, self.den, self.shift) == (other.num, other.den, other.shift)

    def __hash__(self) -> int:
        return hash((self.num, self.den, self.shift))

    def __repr__(self) -> str:
        return f"RF({self.num:b}, {self.den:b}, {self.shift})"


ZERO_RF = RF(0)
ONE_RF = RF(1)


class Lattice:
    """Conversion between Novikov scalars with exponents in ``(1/D)Z`` and RF."""

    def __init__(self, denominator: int):
        self.D = denominator

    @classmethod
    def for_exponents(cls, exps) -> "Lattice":
        d = 1
        for a in exps:
            d = lcm(d, Fraction(a).denominator)
        return cls(d)

    def to_rf(self, x: NovikovScalar) -> RF:
        if x.window is not None:
            raise ValueError("exact elimination needs window-free scalars")
        if not x.terms:
            return ZERO_RF
        ints = []
        for a in x.terms:
            v = a * self.D
            if v.denominator != 1:
                raise ValueError(f"exponent {a} not on the lattice (1/{self.D})Z")
            ints.append(int(v))
        lo = ints[0]
        num = 0
        for v in ints:
            num ^= 1 << (v - lo)
        return RF(num, 1, lo)

    def to_scalar(self, x: RF) -> NovikovScalar:
        if x.den != 1:
            raise ValueError("only polynomial elements convert to finite scalars")
        exps = []
        n, i = x.num, 0
        while n:
            if n & 1:
                exps.append(Fraction(x.shift + i, self.D))
            n >>= 1
            i += 1
        return NovikovScalar(exps)

    def valuation(self, x: RF) -> Fraction:
        return Fraction(x.shift, self.D)


def clear_denominators(vectors):
    """Multiply a family of RF vectors by one common unit so all entries are polynomials.

    The multiplier has t-adic valuation zero, so filtration levels are unchanged.
    """
    common = 1
    for vec in vectors:
        for x in vec:
            if x.num and x.den != 1:
                common = _plcm(common, x.den)
    if common == 1:
        return [list(v) for v in vectors]
    m = RF(common)
    return [[x * m for x in vec] for vec in vectors]


def _plcm(a: int, b: int) -> int:
    return pmul(a, pdivmod(b, pgcd(a, b))[0])


def solve(matrix, rhs):
    """Solve ``matrix @ x = rhs`` exactly over RF (square, invertible).

    ``matrix`` is a list of rows.  Raises ``ValueError`` if singular.
    """
    n = len(matrix)
    a = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise ValueError("singular system")
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col].inverse()
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x + f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def express(basis, target):
    """Coefficients ``c`` with ``sum c_i basis[i] == target``, or None if outside the span.

    ``basis`` is a list of linearly independent RF vectors of a common length.
    """
    k = len(basis)
    n = len(target)
    rows = [[basis[j][p] for j in range(k)] + [target[p]] for p in range(n)]
    pivots = []
    r = 0
    for col in range(k):
        piv = next((i for i in range(r, n) if rows[i][col]), None)
        if piv is None:
            raise ValueError("basis vectors are linearly dependent")
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][col].inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [x + f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(r)
        r += 1
    if any(rows[i][k] for i in range(r, n)):
        return None
    return [rows[i][k] for i in range(k)]
