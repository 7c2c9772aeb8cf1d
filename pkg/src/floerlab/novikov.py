"""Exact arithmetic in the universal Novikov field over Z/2.

A scalar is a finite mod-2 sum of powers ``t^a`` with exact rational
exponents.  Semi-infinite series are represented by a finite sum together
with a *window*: the value is only specified for exponents strictly below
the window.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from fractions import Fraction
from typing import Iterable, Optional, Union

INF = math.inf
NEG_INF = -math.inf

ExponentLike = Union[Fraction, int, str]


def exponent(value: ExponentLike) -> Fraction:
    """Coerce ``value`` to an exact rational exponent.

    Strings are read as ``"p/q"`` or ``"p"``; floats are rejected.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"exponents must be exact, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read exponent from {value!r}")


def format_exponent(value) -> str:
    if value == INF:
        return "inf"
    if value == NEG_INF:
        return "-inf"
    return str(Fraction(value))


def parse_extended(text: str):
    """Inverse of :func:`format_exponent`, accepting the infinite sentinels."""
    if text == "inf":
        return INF
    if text == "-inf":
        return NEG_INF
    return exponent(text)


class NovikovScalar:
    """Immutable element of the Novikov field (coefficients in Z/2).

    ``terms`` is the strictly increasing tuple of exponents carrying a
    coefficient 1.  ``window`` is ``None`` for an exactly known finite sum.
    """

    __slots__ = ("_terms", "_window")

    def __init__(self, terms: Iterable[ExponentLike] = (), window: Optional[ExponentLike] = None):
        counts = Counter(exponent(a) for a in terms)
        w = None if window is None else exponent(window)
        kept = sorted(a for a, c in counts.items() if c % 2 and (w is None or a < w))
        object.__setattr__(self, "_terms", tuple(kept))
        object.__setattr__(self, "_window", w)

    def __setattr__(self, name, value):
        raise AttributeError("NovikovScalar is immutable")

    @property
    def terms(self) -> tuple:
        return self._terms

    @property
    def window(self) -> Optional[Fraction]:
        return self._window

    @classmethod
    def monomial(cls, a: ExponentLike) -> "NovikovScalar":
        return cls((a,))

    # -- structure -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_exact(self) -> bool:
        return self._window is None

    def valuation(self):
        """Minimal exponent, or ``INF`` for zero."""
        return self._terms[0] if self._terms else INF

    def truncate(self, window: ExponentLike) -> "NovikovScalar":
        w = exponent(window)
        if self._window is not None:
            w = min(w, self._window)
        return NovikovScalar(self._terms, w)

    def shift(self, a: ExponentLike) -> "NovikovScalar":
        """Multiply by the monomial ``t^a``."""
        a = exponent(a)
        w = None if self._window is None else self._window + a
        return NovikovScalar((e + a for e in self._terms), w)

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other: "NovikovScalar") -> "NovikovScalar":
        if not isinstance(other, NovikovScalar):
            return NotImplemented
        w = _min_window(self._window, other._window)
        return NovikovScalar(self._terms + other._terms, w)

    __sub__ = __add__
    __radd__ = __add__

    def __neg__(self) -> "NovikovScalar":
        return self

    def __mul__(self, other: "NovikovScalar") -> "NovikovScalar":
        if not isinstance(other, NovikovScalar):
            return NotImplemented
        w = None
        if self._window is not None:
            w = _min_window(w, _window_plus(self._window, other.valuation()))
        if other._window is not None:
            w = _min_window(w, _window_plus(other._window, self.valuation()))
        return NovikovScalar((a + b for a in self._terms for b in other._terms), w)

    def inverse(self, window: ExponentLike) -> "NovikovScalar":
        """Inverse truncated so that ``self * inverse`` agrees with 1 below ``window``."""
        if not self._terms:
            raise ZeroDivisionError("inverse of zero in the Novikov field")
        w = exponent(window)
        e0 = self._terms[0]
        # self = t^e0 (1 + u) with val(u) > 0; invert by the geometric series in u
        u = NovikovScalar(a - e0 for a in self._terms[1:])
        target = w - min(e0, 0) + e0  # truncation point for the series in u
        known = None if self._window is None else self._window - e0
        if known is not None:
            target = min(target, known)
        series = NovikovScalar((0,), target)
        if u and u.valuation() < target:
            power = NovikovScalar((0,))
            while True:
                power = NovikovScalar(power.terms, None) * u
                power = power.truncate(target)
                if not power:
                    break
                series = series + power
        series = NovikovScalar(series.terms, target)
        return series.shift(-e0)

    def __truediv__(self, other: "NovikovScalar") -> "NovikovScalar":
        raise TypeError("use inverse(window) for division in the Novikov field")

    # -- comparison / text --------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, NovikovScalar):
            return NotImplemented
        return self._terms == other._terms and self._window == other._window

    def __hash__(self) -> int:
        return hash((self._terms, self._window))

    def __repr__(self) -> str:
        return f"NovikovScalar({format_scalar(self)!r})"

    def __str__(self) -> str:
        return format_scalar(self)


ZERO = NovikovScalar()
ONE = NovikovScalar((0,))


def _min_window(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _window_plus(w, v):
    if v == INF:
        return None
    return w + v


_TOKEN = re.compile(r"^(?:1|t\^\{(-?\d+(?:/\d+)?)\}|t)$")
_WINDOW = re.compile(r"^O\(t\^\{(-?\d+(?:/\d+)?)\}\)$")


def format_scalar(x: NovikovScalar) -> str:
    parts = []
    for a in x.terms:
        parts.append("1" if a == 0 else "t^{%s}" % format_exponent(a))
    if x.window is not None:
        parts.append("O(t^{%s})" % format_exponent(x.window))
    return "+".join(parts) if parts else "0"


def parse_scalar(text: str) -> NovikovScalar:
    """Read the textual form ``"1+t^{1/2}"`` (``"0"`` for zero, optional ``+O(t^{w})``)."""
    text = text.replace(" ", "")
    if text == "0":
        return ZERO
    terms, window = [], None
    for token in text.split("+"):
        m = _WINDOW.match(token)
        if m:
            if window is not None:
                raise ValueError(f"two windows in {text!r}")
            window = exponent(m.group(1))
            continue
        m = _TOKEN.match(token)
        if not m:
            raise ValueError(f"bad Novikov token {token!r} in {text!r}")
        if token == "1":
            terms.append(Fraction(0))
        elif token == "t":
            terms.append(Fraction(1))
        else:
            terms.append(exponent(m.group(1)))
    if window is None and terms == []:
        raise ValueError(f"empty scalar {text!r}")
    return NovikovScalar(terms, window)


def scalar_from_exponents(exps: Iterable[ExponentLike]) -> NovikovScalar:
    return NovikovScalar(exps)
