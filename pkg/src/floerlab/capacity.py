"""Certificates for the capacity inequalities and the homogenized measurement."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

from .novikov import exponent, format_exponent
from .spectral import NotApplicable

QUANTITIES = ("c", "gamma", "beta", "hbar", "ell", "sde", "hofer", "Eplus", "Eminus", "m")
KINDS = ("lower", "upper", "exact")

# Spectral diameter of the unit ball; imported from the literature, hence pluggable.
GAMMA_BALL = Fraction(1)
GAMMA_BALL_TAG = "gamma(B(1)) = 1 (external input)"


@dataclass(frozen=True)
class Certificate:
    """``quantity`` is bounded by ``value`` (lower/upper) or equals it (exact), given ``hypotheses``."""

    value: Fraction
    kind: str
    quantity: str
    hypotheses: Tuple[str, ...] = ()
    tag: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown certificate kind {self.kind!r}")
        if self.quantity not in QUANTITIES:
            raise ValueError(f"unknown quantity {self.quantity!r}")

    def to_document(self) -> dict:
        return {
            "quantity": self.quantity,
            "kind": self.kind,
            "value": format_exponent(self.value),
            "hypotheses": list(self.hypotheses),
            "tag": self.tag,
        }

    @classmethod
    def from_document(cls, doc) -> "Certificate":
        for key in ("quantity", "kind", "value"):
            if key not in doc:
                raise ValueError(f"certificate: missing field {key!r}")
        return cls(exponent(doc["value"]), doc["kind"], doc["quantity"],
                   tuple(doc.get("hypotheses", ())), doc.get("tag", ""))


@dataclass(frozen=True)
class NoConclusion:
    reason: str

    def __bool__(self):
        return False


def _positive(name, x):
    x = exponent(x)
    if x <= 0:
        raise ValueError(f"{name} must be positive, got {format_exponent(x)}")
    return x


def _nonnegative(name, x):
    x = exponent(x)
    if x < 0:
        raise ValueError(f"{name} must be nonnegative, got {format_exponent(x)}")
    return x


# -- inequalities ------------------------------------------------------


def lemma3_bound(beta, Eplus, Eminus, hbar):
    """``c >= Eminus`` whenever ``beta + Eplus - Eminus < hbar`` (strictly)."""
    beta = _nonnegative("beta", beta)
    hbar = _positive("hbar", hbar)
    Eplus, Eminus = exponent(Eplus), exponent(Eminus)
    hyp = (f"beta + Eplus - Eminus < hbar ({format_exponent(beta + Eplus - Eminus)} < {format_exponent(hbar)})",)
    if beta + Eplus - Eminus < hbar:
        return Certificate(Eminus, "lower", "c", hyp, "boundary-depth lemma")
    return NotApplicable("beta + Eplus - Eminus >= hbar", hyp, beta + Eplus - Eminus)


def lemma3_bound_from_oscillation(Eplus, Eminus, Emin_global, hbar):
    """The same bound with beta replaced by its a priori estimate ``Eplus - Emin_global``."""
    Eplus, Emin_global = exponent(Eplus), exponent(Emin_global)
    return lemma3_bound(Eplus - Emin_global, Eplus, Eminus, hbar)


def two_lagrangian_bound(h1, h2) -> Certificate:
    h1, h2 = _positive("h1", h1), _positive("h2", h2)
    return Certificate(2 * min(h1, h2), "lower", "gamma",
                       ("the set contains a non-interfering pair with the given hbar values",),
                       "two-Lagrangian theorem")


def product_hbar_lower(h1, h2) -> Fraction:
    """hbar(L1 x L2) >= min(hbar(L1), hbar(L2)) for split structures."""
    return min(_positive("h1", h1), _positive("h2", h2))


@dataclass(frozen=True)
class Obstruction:
    obstructed: bool
    bound: Fraction
    reason: str

    @property
    def label(self) -> str:
        return "obstructed" if self.obstructed else "unobstructed-by-this-test"


def ball_embedding_obstruction(h_product, gamma_ball=GAMMA_BALL) -> Obstruction:
    """A product Lagrangian with hbar = h embeds in B(1) only if 2h < gamma(B(1))."""
    h = _positive("h_product", h_product)
    bound = two_lagrangian_bound(h, h).value
    if bound >= gamma_ball:
        return Obstruction(True, bound, f"2 hbar = {format_exponent(bound)} >= {GAMMA_BALL_TAG}")
    return Obstruction(False, bound, f"2 hbar = {format_exponent(bound)} < {GAMMA_BALL_TAG}")


def product_torus_obstruction(a1, a2, gamma_ball=GAMMA_BALL) -> Obstruction:
    return ball_embedding_obstruction(product_hbar_lower(a1, a2), gamma_ball)


def depth_dominates_hbar(c_is_finite: bool, hbar):
    hbar = _positive("hbar", hbar)
    if not c_is_finite:
        return NoConclusion("c is not known to be finite")
    return Certificate(hbar, "lower", "beta", ("c is finite",), "depth dominates hbar")


def spectral_norm(c_forward, c_backward, valid_pair: bool = False) -> Certificate:
    g = exponent(c_forward) + exponent(c_backward)
    if valid_pair and g < 0:
        raise ValueError(f"spectral norm {format_exponent(g)} is negative for a valid pair")
    return Certificate(g, "exact", "gamma", ("c_forward and c_backward are exact",), "spectral norm")


def energy_capacity_chain(sde_bound, epsilon) -> Certificate:
    sde = _nonnegative("sde_bound", sde_bound)
    eps = _positive("epsilon", epsilon)
    if sde == 0:
        return Certificate(Fraction(0), "exact", "c", ("sde = 0", "c <= epsilon for every epsilon > 0", "c >= 0"),
                           "energy-capacity inequality")
    return Certificate(sde + eps, "upper", "c", (f"sde <= {format_exponent(sde)}", f"epsilon = {format_exponent(eps)}"),
                       "energy-capacity inequality")


# -- ledger ----------------------------------------------------------------


@dataclass(frozen=True)
class Contradiction:
    quantity: str
    lower: Certificate
    upper: Certificate


@dataclass
class CapacityLedger:
    entries: List[Certificate] = field(default_factory=list)

    def add(self, item):
        """Record a certificate; NotApplicable and NoConclusion are ignored and returned as is."""
        if isinstance(item, Certificate):
            self._check(item)
            self.entries.append(item)
        return item

    @staticmethod
    def _check(cert: Certificate):
        if cert.kind in ("exact", "upper"):
            if cert.quantity in ("beta", "gamma") and cert.value < 0:
                raise ValueError(f"{cert.quantity} cannot be bounded above by a negative value")
            if cert.quantity == "hbar" and cert.value <= 0:
                raise ValueError("hbar must be positive")

    def bounds(self, quantity: str):
        lows = [c for c in self.entries if c.quantity == quantity and c.kind in ("lower", "exact")]
        ups = [c for c in self.entries if c.quantity == quantity and c.kind in ("upper", "exact")]
        lo = max(lows, key=lambda c: c.value, default=None)
        hi = min(ups, key=lambda c: c.value, default=None)
        return lo, hi

    def contradictions(self) -> List[Contradiction]:
        out = []
        for q in QUANTITIES:
            lo, hi = self.bounds(q)
            if lo is not None and hi is not None and lo.value > hi.value:
                out.append(Contradiction(q, lo, hi))
        return out

    @property
    def consistent(self) -> bool:
        return not self.contradictions()


# -- measurement -------------------------------------------------------------


class InconsistentSeries(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class MeasurementSeries:
    samples: Tuple[Tuple[int, Fraction], ...]
    mean_integral: Fraction
    hofer_length: Optional[Fraction] = None
    capacity_bound: Optional[Fraction] = None
    drift: Fraction = Fraction(0)  # accumulated constant shift s; the bound applies to c_k + k s

    @classmethod
    def of(cls, samples, mean_integral, hofer_length=None, capacity_bound=None):
        s = tuple((int(k), exponent(c)) for k, c in samples)
        ks = [k for k, _ in s]
        if any(k <= 0 for k in ks) or ks != sorted(set(ks)):
            raise ValueError("sample iterates k must be positive and strictly increasing")
        return cls(s, exponent(mean_integral),
                   None if hofer_length is None else exponent(hofer_length),
                   None if capacity_bound is None else exponent(capacity_bound))

    def shifted(self, s) -> "MeasurementSeries":
        """The series of ``H - s``: c_k -> c_k - k s and the mean drops by s."""
        s = exponent(s)
        return MeasurementSeries(tuple((k, c - k * s) for k, c in self.samples), self.mean_integral - s,
                                 self.hofer_length, self.capacity_bound, self.drift + s)


@dataclass(frozen=True)
class Measurement:
    m: Fraction
    limit: Fraction
    certificate: str  # "bounded" | "constant" | "slope"
    m1_checked: bool


def homogenized_measurement(s: MeasurementSeries, tolerance=0) -> Measurement:
    """m = mean_integral - lim_{k -> inf} c_k / k.

    The limit is 0 when the samples are certified bounded (an explicit
    ``capacity_bound`` or a constant series).  Otherwise it is the last ratio
    c_k / k, accepted only if the last two ratios agree within ``tolerance``.
    """
    if len(s.samples) < 2:
        raise ValueError("the measurement needs at least two samples")
    tol = exponent(tolerance)
    values = [c + k * s.drift for k, c in s.samples]
    if s.capacity_bound is not None and all(abs(c) <= s.capacity_bound for c in values):
        limit, how = -s.drift, "bounded"
    elif len(set(values)) == 1:
        limit, how = -s.drift, "constant"
    else:
        (k0, c0), (k1, c1) = s.samples[-2], s.samples[-1]
        r0, r1 = c0 / k0, c1 / k1
        if abs(r1 - r0) > tol:
            raise InconsistentSeries(
                f"c_k/k is not Cauchy within {format_exponent(tol)}: {format_exponent(r0)} at k={k0}, "
                f"{format_exponent(r1)} at k={k1}", witness=(k0, k1))
        limit, how = r1, "slope"
    m = s.mean_integral - limit
    checked = False
    if s.hofer_length is not None:
        for k, c in s.samples:
            normalized = c - k * s.mean_integral
            if -normalized > k * s.hofer_length:
                raise InconsistentSeries(
                    f"M1 fails at k={k}: -(c_k - k mean) = {format_exponent(-normalized)} > k * hofer", witness=k)
        if m > s.hofer_length:
            raise InconsistentSeries(f"M1 fails: m = {format_exponent(m)} > hofer length")
        checked = True
    return Measurement(m, limit, how, checked)
