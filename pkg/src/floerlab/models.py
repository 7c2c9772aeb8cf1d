"""Action spectra of the model Hamiltonians: torus deformations, contact bumps, toric fibers."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .complex import CappedGenerator
from .novikov import INF, exponent, format_exponent

# 333/106 < pi; a rational stand-in keeps the threshold exact and safe.
PI_LOWER = Fraction(333, 106)


class ProfileError(ValueError):
    """A profile violates one of its invariants; ``witness`` names the piece or point."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ProfileInfeasible(ValueError):
    pass


class ThresholdError(ValueError):
    def __init__(self, k, k_star):
        self.k = k
        self.k_star = k_star
        super().__init__(f"k = {format_exponent(k)} does not exceed the certified threshold k* = {format_exponent(k_star)}")


# -- piecewise linear helpers --------------------------------------------


def _pieces(points):
    return list(zip(points, points[1:]))


def _slope(p, q):
    return (q[1] - p[1]) / (q[0] - p[0])


def _value_at(points, x):
    for p, q in _pieces(points):
        if p[0] <= x <= q[0]:
            return p[1] + _slope(p, q) * (x - p[0])
    raise ValueError(f"{x} outside the profile domain")


def _as_points(pairs):
    pts = [(exponent(x), exponent(y)) for x, y in pairs]
    for (x0, _), (x1, _) in _pieces(pts):
        if x1 <= x0:
            raise ProfileError(f"breakpoints must increase strictly ({format_exponent(x0)} then {format_exponent(x1)})")
    return pts


# -- torus deformation -------------------------------------------------------


@dataclass(frozen=True)
class TorusDeformation:
    """``G_t = (1 - t + t rho(y)) H + k cos(pi y / a)`` on M x T_a; ``rho`` is piecewise linear on [0, 2a]."""

    orbits: Tuple[CappedGenerator, ...]
    a: Fraction
    rho: Tuple[Tuple[Fraction, Fraction], ...]
    h_sup: Fraction
    k: Fraction

    @classmethod
    def build(cls, orbits, a, rho, h_sup, k):
        td = cls(tuple(orbits), exponent(a), tuple(_as_points(rho)), exponent(h_sup), exponent(k))
        td.validate()
        return td

    def validate(self):
        a, pts = self.a, self.rho
        if a <= 0:
            raise ProfileError("a must be positive")
        if self.h_sup < 0:
            raise ProfileError("h_sup must be nonnegative")
        if len(pts) < 2 or pts[0][0] != 0 or pts[-1][0] != 2 * a:
            raise ProfileError("rho must be given on [0, 2a]")
        if pts[0][1] != pts[-1][1]:
            raise ProfileError("rho(0) must equal rho(2a)")
        for y in (0, a, 2 * a):
            for p, q in _pieces(pts):
                touches = p[0] <= y <= q[0]
                if touches and not (p[1] == q[1] == 1):
                    raise ProfileError(f"rho must equal 1 near y = {format_exponent(y)}", witness=(p, q))

    def slope_pieces(self):
        return [(p, q, _slope(p, q)) for p, q in _pieces(self.rho) if p[1] != q[1]]


def _edge_distance(y: Fraction, a: Fraction) -> Fraction:
    u = (y / a) % 1
    return min(u, 1 - u)


def k_threshold(td: TorusDeformation) -> Fraction:
    """Certified k* with no zero of ``t rho'(y) H - (pi/a) k sin(pi y/a)`` off {0, a} once k > k*.

    On (0, 1), sin(pi u) >= 2 min(u, 1 - u) (chord of a concave function), and
    min(u, 1 - u) is concave, so its minimum over a piece sits at an endpoint.
    """
    best = Fraction(0)
    for p, q, s in td.slope_pieces():
        m = min(_edge_distance(p[0], td.a), _edge_distance(q[0], td.a))
        if m == 0:
            raise ProfileError("a sloped piece of rho touches y in {0, a}", witness=(p, q))
        best = max(best, abs(s) * td.h_sup * td.a / (PI_LOWER * 2 * m))
    return best


def deformed_spectrum(td: TorusDeformation, t_def) -> List[Fraction]:
    """Actions of the contractible orbits (γ, x, y), y in {0, a}, at deformation parameter ``t_def``."""
    t = exponent(t_def)
    if not 0 <= t <= 1:
        raise ValueError("t_def must lie in [0, 1]")
    k_star = k_threshold(td)
    if td.k <= k_star:
        raise ThresholdError(td.k, k_star)
    out = []
    for y, cos in ((Fraction(0), 1), (td.a, -1)):
        factor = 1 - t + t * _value_at(td.rho, y)
        for o in td.orbits:
            out.append(factor * o.h_integral - o.area(0) + cos * td.k)
    return sorted(out)


@dataclass(frozen=True)
class ZeroSearch:
    found: bool
    certified_none: bool
    witness: Optional[float]


def zero_grid_search(td: TorusDeformation, k, t_def=1, samples: int = 2000) -> ZeroSearch:
    """Float grid scan for a spurious zero of the orbit equation, padded by a Lipschitz bound.

    With |H| <= h_sup free, a zero at y exists iff
    ``t |rho'(y)| h_sup >= (pi/a) k |sin(pi y/a)|``.
    """
    k, t = float(exponent(k)), float(exponent(t_def))
    a = float(td.a)
    lip = (math.pi / a) * k * (math.pi / a)
    best, where, spacing = -math.inf, None, 0.0
    for p, q, s in td.slope_pieces():
        y0, y1 = float(p[0]), float(q[0])
        h = (y1 - y0) / samples
        spacing = max(spacing, h)
        for i in range(samples + 1):
            y = y0 + i * h
            f = t * abs(float(s)) * float(td.h_sup) - (math.pi / a) * k * abs(math.sin(math.pi * y / a))
            if f > best:
                best, where = f, y
    if where is None:
        return ZeroSearch(False, True, None)
    return ZeroSearch(best >= 0, best + lip * spacing / 2 < 0, where if best >= 0 else None)


def sample_torus_profile(rng: random.Random, n_orbits: int = 3) -> TorusDeformation:
    """A deformation with a trapezoidal bump of rho away from {0, a} on each half of the torus."""
    a = Fraction(rng.randint(1, 4), rng.choice([1, 2]))
    pts = [(Fraction(0), Fraction(1))]
    for half in (0, 1):
        base = half * a
        cuts = sorted(rng.sample(range(1, 20), 4))
        ys = [base + a * Fraction(c, 20) for c in cuts]
        peak = Fraction(rng.randint(-6, 6), 2)
        if peak == 1:
            peak = Fraction(3, 2)
        pts += [(ys[0], Fraction(1)), (ys[1], peak), (ys[2], peak), (ys[3], Fraction(1))]
    pts.append((2 * a, Fraction(1)))
    orbits = [
        CappedGenerator(f"γ{i}", Fraction(rng.randint(-8, 8), 4), rng.randint(-2, 2), 0, 0,
                        Fraction(rng.randint(0, 8), 4), Fraction(0), 1)
        for i in range(n_orbits)
    ]
    h_sup = max([abs(o.h_integral) for o in orbits] + [Fraction(1)])
    return TorusDeformation.build(orbits, a, pts, h_sup, 0)


def with_k(td: TorusDeformation, k) -> TorusDeformation:
    return TorusDeformation(td.orbits, td.a, td.rho, td.h_sup, exponent(k))


# -- contact bump profiles -------------------------------------------------


@dataclass(frozen=True)
class SpectrumElement:
    lo: Fraction
    hi: Fraction
    source: str  # outside | flat | critical | slope | kink
    index: int  # piece or breakpoint index (-1 for outside)
    period: Optional[Fraction] = None

    @property
    def constant(self) -> bool:
        return self.period is None

    def is_point(self) -> bool:
        return self.lo == self.hi


@dataclass(frozen=True)
class ContactProfile:
    """Piecewise-linear bump ``f`` of the radial coordinate r with Reeb periods ``periods``.

    ``periods`` lists every positive period below ``cutoff`` (all of them if
    ``cutoff`` is None); slopes must stay below the cutoff.
    """

    breakpoints: Tuple[Tuple[Fraction, Fraction], ...]
    A: Fraction
    delta: Fraction
    r_minus: Fraction
    r_plus: Fraction
    periods: Tuple[Fraction, ...]
    cutoff: Optional[Fraction] = None

    @classmethod
    def build(cls, breakpoints, A, delta, r_minus, r_plus, periods, cutoff=None, check=True):
        p = cls(tuple(_as_points(breakpoints)), exponent(A), exponent(delta), exponent(r_minus),
                exponent(r_plus), tuple(exponent(t) for t in periods),
                None if cutoff is None else exponent(cutoff))
        if check:
            p.validate()
        return p

    def signed_periods(self):
        return sorted(set(self.periods) | {-t for t in self.periods})

    def slopes(self):
        return [_slope(p, q) for p, q in _pieces(self.breakpoints)]

    def validate(self):
        pts = self.breakpoints
        if not self.r_minus < 1 < self.r_plus:
            raise ProfileError("support radii must satisfy r- < 1 < r+")
        if self.delta <= 0:
            raise ProfileError("delta must be positive")
        if any(t <= 0 for t in self.periods) or list(self.periods) != sorted(set(self.periods)):
            raise ProfileError("periods must be positive and strictly increasing")
        if len(pts) < 2 or pts[0] != (self.r_minus, 0) or pts[-1] != (self.r_plus, 0):
            raise ProfileError("f must vanish at r- and r+ and be given between them")
        if any(f < 0 for _, f in pts):
            raise ProfileError("f must be nonnegative", witness=min(pts, key=lambda p: p[1]))
        if max(f for _, f in pts) != self.A:
            raise ProfileError(f"max f is {format_exponent(max(f for _, f in pts))}, expected A = {format_exponent(self.A)}")
        if self.cutoff is not None:
            for i, s in enumerate(self.slopes()):
                if abs(s) >= self.cutoff:
                    raise ProfileError("slope beyond the period cutoff", witness=i)
        pm = set(self.signed_periods())
        for i, (s, (p, q)) in enumerate(zip(self.slopes(), _pieces(pts))):
            if s in pm:
                for f in (p[1], q[1]):
                    if not self._allowed(f):
                        raise ProfileError(f"piece {i} has period slope {format_exponent(s)} at mid height",
                                           witness=("piece", i))
        for i, (r, f, left, right) in enumerate(self._kinks()):
            lo, hi = min(left, right), max(left, right)
            if any(lo < t < hi for t in pm) and not self._allowed(f):
                raise ProfileError(f"kink {i} at r = {format_exponent(r)} passes a period at mid height",
                                   witness=("kink", i))

    def _allowed(self, f):
        return f <= self.delta or f >= self.A - self.delta

    def _kinks(self):
        """(r, f, slope left, slope right) at each breakpoint; outside the support the slope is 0."""
        s = [Fraction(0)] + self.slopes() + [Fraction(0)]
        return [(r, f, s[i], s[i + 1]) for i, (r, f) in enumerate(self.breakpoints)]


def contact_spectrum(p: ContactProfile) -> List[SpectrumElement]:
    """Actions ``f(r) - r f'(r)`` of orbits with ``f'(r)`` a signed period, plus constant orbits.

    Linear pieces with a period slope give Morse–Bott families; breakpoints
    contribute one orbit per period strictly between the adjacent slopes
    (the corner of a smoothed profile sweeps through those slopes).
    """
    p.validate()
    pm = p.signed_periods()
    out = [SpectrumElement(Fraction(0), Fraction(0), "outside", -1)]
    for i, ((r0, f0), (r1, f1)) in enumerate(_pieces(p.breakpoints)):
        s = _slope((r0, f0), (r1, f1))
        if s == 0:
            out.append(SpectrumElement(f0, f0, "flat", i))
        elif s in pm:
            v0, v1 = f0 - r0 * s, f1 - r1 * s
            out.append(SpectrumElement(min(v0, v1), max(v0, v1), "slope", i, s))
    for i, (r, f, left, right) in enumerate(p._kinks()):
        lo, hi = min(left, right), max(left, right)
        for t in pm:
            if lo < t < hi:
                out.append(SpectrumElement(f - r * t, f - r * t, "kink", i, t))
        if lo < 0 < hi:
            out.append(SpectrumElement(f, f, "critical", i))
    return out


def constant_values(spectrum: Sequence[SpectrumElement]) -> set:
    return {e.lo for e in spectrum if e.constant}


@dataclass(frozen=True)
class GapVerdict:
    ok: bool
    gap: object
    witness: Optional[SpectrumElement] = None


def spectrum_gap(p: ContactProfile) -> GapVerdict:
    """g = inf of the positive spectrum; passes iff g >= A."""
    best, witness = INF, None
    for e in contact_spectrum(p):
        if e.hi <= 0:
            continue
        g = max(e.lo, Fraction(0))
        if g < best:
            best, witness = g, e
    ok = best >= p.A
    return GapVerdict(ok, best, None if ok else witness)


def three_way_minimum(p: ContactProfile) -> Fraction:
    t = min(p.periods)
    return min(p.A, p.r_minus * t, p.A - p.delta + p.r_minus * t)


def design_bump(A, delta, r_minus, r_plus, periods, cutoff=None) -> ContactProfile:
    """Trapezoid from r- up to height A and back down to r+, with no spurious positive actions.

    The upper-left corner sweeps every period below the rising slope, giving
    actions ``A - r T``; these are nonpositive only if the corner sits at
    r >= A / T_min, which needs ``A < r+ * T_min``.
    """
    A, delta, rm, rp = exponent(A), exponent(delta), exponent(r_minus), exponent(r_plus)
    periods = sorted(exponent(t) for t in periods)
    if not periods:
        raise ProfileInfeasible("at least one period is required")
    tmin = periods[0]
    if A >= rp * tmin:
        raise ProfileInfeasible(
            f"A = {format_exponent(A)} >= r+ * T_min = {format_exponent(rp * tmin)}: the slope condition cannot be met "
            "without a positive action below A")
    r_up = max(A / tmin, (3 * rm + rp) / 4)
    if r_up <= rm:
        r_up = (rm + rp) / 2
    r_down = (r_up + rp) / 2
    pm = set(periods) | {-t for t in periods}
    for attempt in range(64):
        pts = [(rm, Fraction(0)), (r_up, A), (r_down, A), (rp, Fraction(0))]
        if all(_slope(p, q) not in pm for p, q in _pieces(pts)):
            try:
                prof = ContactProfile.build(pts, A, delta, rm, rp, periods, cutoff)
            except ProfileError as exc:
                raise ProfileInfeasible(str(exc)) from None
            verdict = spectrum_gap(prof)
            if not verdict.ok:
                raise ProfileInfeasible(f"gap {format_exponent(verdict.gap)} < A")
            return prof
        r_down = (r_down + rp) / 2
    raise ProfileInfeasible("could not avoid period slopes")  # pragma: no cover


def sample_bump_profile(rng: random.Random, t_min: Fraction, delta=Fraction(1, 100),
                        r_minus=Fraction(99, 100), r_plus=Fraction(101, 100), n_periods: int = 5) -> ContactProfile:
    """A bump with A = T_min - 1/10 and periods m*T_min (m <= n_periods).

    Optional low and high shoulders use period slopes, so slope families and
    corner orbits both occur.
    """
    A = t_min - Fraction(1, 10)
    periods = [m * t_min for m in range(1, n_periods + 1)]
    pm = set(periods) | {-t for t in periods}
    base = design_bump(A, delta, r_minus, r_plus, periods)
    pts = list(base.breakpoints)
    (rm, _), (r_up, _), (r_down, _), (rp, _) = pts
    new = [(rm, Fraction(0))]
    # low shoulder on the rise: period slope up to height <= delta
    if rng.random() < 0.7:
        s = rng.choice(periods)
        h = delta * Fraction(rng.randint(1, 4), 4)
        w = h / s
        if rm + w < r_up:
            new.append((rm + w, h))
    # high shoulder: a period slope just below the top, ending at the upper-left corner
    if rng.random() < 0.7:
        s = rng.choice(periods)
        h = delta * Fraction(rng.randint(1, 4), 4)
        w = h / s
        if new[-1][0] < r_up - w:
            new.append((r_up - w, A - h))
    new.append((r_up, A))
    if rng.random() < 0.5:
        mid = (r_up + r_down) / 2
        new.append((mid, A))
    new.append((r_down, A))
    if rng.random() < 0.7:
        s = rng.choice(periods)
        h = delta * Fraction(rng.randint(1, 4), 4)
        w = h / s
        if r_down + w < rp:
            new.append((r_down + w, A - h))
    new.append((rp, Fraction(0)))
    prof = ContactProfile.build(new, A, delta, r_minus, r_plus, periods, check=False)
    for i, s in enumerate(prof.slopes()):
        p, q = prof.breakpoints[i], prof.breakpoints[i + 1]
        if s in pm and not (prof._allowed(p[1]) and prof._allowed(q[1])):
            return base  # pragma: no cover - a steep piece hit a period; keep the plain bump
    try:
        prof.validate()
    except ProfileError:
        return base
    return prof


# -- toric fibers ----------------------------------------------------------


def fiber_hbar_lower(a: Sequence) -> Fraction:
    vals = [exponent(x) for x in a]
    if not vals or any(v <= 0 for v in vals):
        raise ValueError("fiber coordinates must be positive")
    return min(vals)


def toric_bound(points: Sequence[Sequence]) -> Fraction:
    """max over the window of the minimal coordinate."""
    if not points:
        raise ValueError("empty toric window")
    return max(fiber_hbar_lower(p) for p in points)
