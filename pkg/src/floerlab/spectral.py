"""Nonarchimedean singular value decomposition and the invariants built on it.

Elimination runs exactly in GF(2)(t) after rescaling exponents to integers
(see :mod:`floerlab._rf`), so no truncated inverse is ever taken.  The window
argument of :func:`svd` is kept as a certification contract: a result is
declared certified when every finite bar is shorter than the window.
"""

from __future__ import annotations

import heapq
import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from . import _rf
from ._rf import RF, Lattice
from .complex import (
    CappedComplex,
    Chain,
    ComplexError,
    FilteredComplex,
    capped_chain,
    degree as capped_degree,
    ell,
    iota,
    validate,
)
from .novikov import INF, NEG_INF, NovikovScalar, exponent, format_exponent


class InvalidComplex(ComplexError):
    def __init__(self, report):
        self.report = report
        v = report.violations[0]
        super().__init__(f"complex does not validate: {v.kind} violation at {v.source} -> {v.target} ({v.detail})")


class WindowError(ValueError):
    """The truncation window is too small for the requested computation."""


class CertificationError(RuntimeError):
    """A result could not be certified exact; ``witness`` names the offending datum."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotACycle(ValueError):
    def __init__(self, boundary: Chain):
        self.boundary = boundary
        super().__init__(f"chain is not a cycle: d(chain) has terms on {sorted(boundary.labels())}")


class DetectionFailure(RuntimeError):
    """A low-action representative of the class is invisible to the functional."""

    def __init__(self, representative: Chain):
        self.representative = representative
        super().__init__("detection functional vanishes on a representative")


# -- exact vector helpers --------------------------------------------------


def _lattice_for(complex: FilteredComplex, chains: Iterable[Chain] = ()) -> Lattice:
    exps = list(complex.exponents())
    for c in chains:
        exps.extend(c.exponents())
    return Lattice.for_exponents(exps)


def _to_vec(complex: FilteredComplex, lat: Lattice, chain: Chain) -> List[RF]:
    vec = [_rf.ZERO_RF] * len(complex.generators)
    for label, lam in chain.items():
        vec[complex.index(label)] = lat.to_rf(lam)
    return vec


def _to_chain(complex: FilteredComplex, lat: Lattice, vec: Sequence[RF]) -> Chain:
    return Chain({complex.generators[p].label: lat.to_scalar(x) for p, x in enumerate(vec) if x})


def _ell_pivot(vec, levels, D):
    """(ℓ, first coordinate attaining it); (-inf, None) for zero."""
    best, piv = NEG_INF, None
    for p, x in enumerate(vec):
        if x:
            v = levels[p] - Fraction(x.shift, D)
            if v > best:
                best, piv = v, p
    return best, piv


def _axpy(y, lam, x):
    return [a + lam * b for a, b in zip(y, x)]


def _reduce(vec, basis, pivots, companion=None, partners=None):
    """Zero ``vec`` on ``pivots`` using ``basis`` (triangular in insertion order).

    The same combination is applied to ``companion`` with ``partners``.
    """
    for i, (b, p) in enumerate(zip(basis, pivots)):
        if vec[p]:
            lam = vec[p] / b[p]
            vec = _axpy(vec, lam, b)
            if companion is not None:
                companion = _axpy(companion, lam, partners[i])
    return vec, companion


# -- SVD -------------------------------------------------------------------


@dataclass(frozen=True)
class Bar:
    birth: object
    death: object
    degree: int

    @property
    def length(self):
        return self.death - self.birth


@dataclass
class Barcode:
    finite: List[Bar]
    infinite: List[Bar]

    def lengths(self) -> List[Fraction]:
        return sorted(b.length for b in self.finite)

    def finite_multiset(self) -> Counter:
        return Counter((b.birth, b.death, b.degree) for b in self.finite)

    def infinite_multiset(self) -> Counter:
        return Counter((b.birth, b.degree) for b in self.infinite)


@dataclass
class SVDBasis:
    """Orthogonal basis ``Z ∪ S ∪ T`` with ``d(S_i) = T_i`` and ``d(Z_j) = 0``."""

    complex: FilteredComplex
    Z: List[Chain]
    pairs: List[Tuple[Chain, Chain]]
    window: Optional[Fraction] = None
    certified: bool = True
    offending: Optional[Bar] = None

    def z_levels(self):
        return [ell(self.complex, z) for z in self.Z]

    def pair_levels(self):
        return [(ell(self.complex, s), ell(self.complex, t)) for s, t in self.pairs]

    def vectors(self) -> List[Chain]:
        return list(self.Z) + [s for s, _ in self.pairs] + [t for _, t in self.pairs]

    def barcode(self) -> Barcode:
        c = self.complex
        finite = [Bar(ell(c, t), ell(c, s), _degree_of(c, t)) for s, t in self.pairs]
        infinite = [Bar(ell(c, z), INF, _degree_of(c, z)) for z in self.Z]
        key = lambda b: (b.degree, b.birth, b.death)
        return Barcode(sorted(finite, key=key), sorted(infinite, key=key))

    def boundary_depth(self) -> Fraction:
        lengths = [s - t for s, t in self.pair_levels()]
        return max(lengths) if lengths else Fraction(0)

    # Expansions in the basis run on a lattice fine enough for the query.
    def _expand(self, chain: Chain):
        c = self.complex
        basis = self.vectors()
        lat = _lattice_for(c, basis + [chain])
        vecs = [_to_vec(c, lat, v) for v in basis]
        coeffs = _rf.express(vecs, _to_vec(c, lat, chain))
        if coeffs is None:  # pragma: no cover - the basis spans the complex
            raise CertificationError("basis does not span the complex")
        return lat, coeffs

    def distance_to_exact(self, chain: Chain):
        """inf over exact chains ``e`` of ℓ(chain + e)."""
        lat, coeffs = self._expand(chain)
        nz, np_ = len(self.Z), len(self.pairs)
        levels = self.z_levels() + [s for s, _ in self.pair_levels()]
        best = NEG_INF
        for i in range(nz + np_):
            if coeffs[i]:
                best = max(best, levels[i] - lat.valuation(coeffs[i]))
        return best

    def preimage_level(self, x: Chain):
        """inf of ℓ(y) over y with dy = x; raises if ``x`` is not exact."""
        lat, coeffs = self._expand(x)
        nz, np_ = len(self.Z), len(self.pairs)
        if any(coeffs[i] for i in range(nz + np_)):
            raise ValueError("chain is not exact")
        best = NEG_INF
        for i, (s, _) in enumerate(self.pairs):
            c = coeffs[nz + np_ + i]
            if c:
                best = max(best, ell(self.complex, s) - lat.valuation(c))
        return best


def _degree_of(complex: FilteredComplex, chain: Chain) -> int:
    _, piv = _ell_pivot_chain(complex, chain)
    return complex.generators[piv].degree if piv is not None else 0


def _ell_pivot_chain(complex, chain):
    best, piv = NEG_INF, None
    for p, g in enumerate(complex.generators):
        lam = chain[g.label]
        if lam:
            v = g.level - lam.valuation()
            if v > best:
                best, piv = v, p
    return best, piv


def svd(complex: FilteredComplex, window=None, strict: bool = True, check: bool = True) -> SVDBasis:
    """Valuation-greedy elimination producing an orthogonal (Z, S, T) basis.

    Columns are processed in order of (bar length, degree, decreasing ℓ of the
    source, label order).  ``window`` must exceed the spread of generator
    levels; when some bar is at least as long as the window the result is
    flagged, or ``CertificationError`` is raised if ``strict``.
    """
    if check:
        report = validate(complex)
        if not report.ok:
            raise InvalidComplex(report)
    gens = complex.generators
    n = len(gens)
    levels = [g.level for g in gens]
    if window is not None:
        window = exponent(window)
        spread = (max(levels) - min(levels)) if levels else Fraction(0)
        if window <= spread:
            raise WindowError(f"window {format_exponent(window)} must exceed the level spread {format_exponent(spread)}")

    lat = _lattice_for(complex)
    D = lat.D
    xs, ys = [], []
    for j, g in enumerate(gens):
        y = [_rf.ZERO_RF] * n
        y[j] = _rf.ONE_RF
        ys.append(y)
        xs.append(_to_vec(complex, lat, complex.differential.get(g.label, Chain())))

    kernel = []
    pending = {}
    heap = []

    def push(j):
        lx, _ = _ell_pivot(xs[j], levels, D)
        ly, _ = _ell_pivot(ys[j], levels, D)
        key = (ly - lx, gens[j].degree, -ly, j)
        pending[j] = key
        heapq.heappush(heap, key)

    for j in range(n):
        if any(xs[j]):
            push(j)
        else:
            kernel.append(ys[j])

    fin_x, fin_y, fin_piv = [], [], []
    while heap:
        key = heapq.heappop(heap)
        j = key[-1]
        if pending.get(j) != key:
            continue
        del pending[j]
        x, y = xs[j], ys[j]
        if any(x[p] for p in fin_piv):
            x, y = _reduce(x, fin_x, fin_piv, y, fin_y)
            xs[j], ys[j] = x, y
            if not any(x):
                kernel.append(y)
            else:
                push(j)
            continue
        _, piv = _ell_pivot(x, levels, D)
        fin_x.append(x)
        fin_y.append(y)
        fin_piv.append(piv)

    # Extend the T's to an orthogonal basis of ker d.
    zs = []
    basis, pivots = list(fin_x), list(fin_piv)
    for v in kernel:
        v, _ = _reduce(v, basis, pivots)
        if any(v):
            _, piv = _ell_pivot(v, levels, D)
            basis.append(v)
            pivots.append(piv)
            zs.append(v)

    cleared = _rf.clear_denominators([list(s) + list(t) for s, t in zip(fin_y, fin_x)])
    pairs = [(_to_chain(complex, lat, row[:n]), _to_chain(complex, lat, row[n:])) for row in cleared]
    Z = [_to_chain(complex, lat, row) for row in _rf.clear_denominators(zs)]
    result = SVDBasis(complex, Z, pairs, window)
    if window is not None:
        for bar in result.barcode().finite:
            if bar.length >= window:
                result.certified = False
                result.offending = bar
                if strict:
                    raise CertificationError(
                        f"bar [{format_exponent(bar.birth)}, {format_exponent(bar.death)}) reaches the window "
                        f"{format_exponent(window)}", witness=bar)
                break
    return result


def _cached_svd(complex: FilteredComplex, basis: Optional[SVDBasis]) -> SVDBasis:
    if basis is not None:
        return basis
    return svd(complex)


def is_orthogonal(complex: FilteredComplex, vectors: Sequence[Chain]) -> bool:
    """Exact test: the ℓ-leading GF(2) patterns of the vectors are linearly independent."""
    rows = []
    for v in vectors:
        top = ell(complex, v)
        if top == NEG_INF:
            return False
        mask = 0
        for label, lam in v.items():
            if complex.level(label) - lam.valuation() == top:
                mask |= 1 << complex.index(label)
        rows.append(mask)
    # Gaussian elimination over GF(2) on bitmasks.
    reduced = []
    for r in rows:
        for b in reduced:
            r = min(r, r ^ b)
        if r == 0:
            return False
        reduced.append(r)
    return True


def spectral_invariant(complex: FilteredComplex, zeta: Chain, basis: Optional[SVDBasis] = None):
    """inf of ℓ(ζ + dβ) over all β; ``-inf`` if ζ is exact."""
    boundary = complex.d(zeta)
    if boundary:
        raise NotACycle(boundary)
    return _cached_svd(complex, basis).distance_to_exact(zeta)


def boundary_depth(complex: FilteredComplex, basis: Optional[SVDBasis] = None) -> Fraction:
    return _cached_svd(complex, basis).boundary_depth()


def barcode(complex: FilteredComplex, window=None) -> Barcode:
    return svd(complex, window).barcode()


# -- detection functionals ---------------------------------------------


@dataclass(frozen=True)
class NotApplicable:
    """A hypothesis of a conditional statement fails; ``witness`` pinpoints it."""

    reason: str
    hypotheses: Tuple[str, ...] = ()
    witness: object = None

    def __bool__(self):
        return False


@dataclass(frozen=True)
class DetectionFunctional:
    """Z/2-valued functional on chains of action below ``threshold``.

    It is linear over Z/2 on monomials ``t^a γ`` and equals 1 exactly on the
    monomials listed in ``support``.
    """

    threshold: Fraction
    support: frozenset

    @classmethod
    def of(cls, threshold, support: Iterable[Tuple[str, object]]):
        return cls(exponent(threshold), frozenset((lab, exponent(a)) for lab, a in support))

    def __call__(self, complex: FilteredComplex, chain: Chain) -> int:
        level = ell(complex, chain)
        if level >= self.threshold:
            raise ValueError(f"functional is only defined below {format_exponent(self.threshold)}")
        hits = 0
        for label, lam in chain.items():
            for a in lam.terms:
                if (label, a) in self.support:
                    hits ^= 1
        return hits

    def non_chain_witness(self, complex: FilteredComplex):
        """A monomial ``(label, a)`` of action below the threshold with e(d(t^a label)) = 1, or None."""
        candidates = set()
        for src, img in complex.differential.items():
            for tgt, lam in img.items():
                for b in lam.terms:
                    for lab, c in self.support:
                        if lab == tgt:
                            candidates.add((src, c - b))
        for src, a in sorted(candidates):
            if complex.level(src) - a >= self.threshold:
                continue
            image = complex.d(Chain.monomial(src, a))
            if self(complex, image):
                return (src, a)
        return None

    def out_of_range(self, complex: FilteredComplex):
        for lab, a in sorted(self.support):
            if complex.level(lab) - a >= self.threshold:
                return (lab, a)
        return None


@dataclass(frozen=True)
class DetectionResult:
    bound: Fraction
    representatives_checked: int
    max_replay_level: object
    hypotheses: Tuple[str, ...]


DETECTION_HYPOTHESES = (
    "margin > 0",
    "zeta is a cycle",
    "e is a chain functional below its threshold",
    "l(zeta) < Eplus + margin",
    "e(zeta) = 1",
    "threshold >= beta + Eplus + 2 margin",
)


def detection_bound(complex: FilteredComplex, zeta: Chain, e: DetectionFunctional, Eplus, margin,
                    lattice: Optional[Sequence[Fraction]] = None, basis: Optional[SVDBasis] = None,
                    max_representatives: int = 200_000):
    """Replay the algebraic detection argument and return a lower bound for c(ζ).

    Returns :class:`NotApplicable` when a hypothesis fails.  Every representative
    ``ζ + dμ`` with μ drawn from the monomial lattice (coefficients in
    ``{0} ∪ {t^a : a in lattice}``) and action below ``Eplus + margin`` is
    evaluated; ``DetectionFailure`` is raised if one of them is invisible.
    """
    Eplus, margin = exponent(Eplus), exponent(margin)
    hyp = DETECTION_HYPOTHESES
    if margin <= 0:
        return NotApplicable("margin must be positive", hyp, margin)
    boundary = complex.d(zeta)
    if boundary:
        return NotApplicable("zeta is not a cycle", hyp, boundary)
    w = e.out_of_range(complex)
    if w is not None:
        return NotApplicable("functional support lies above its threshold", hyp, w)
    w = e.non_chain_witness(complex)
    if w is not None:
        return NotApplicable("e is not a chain functional", hyp, w)
    top = Eplus + margin
    lz = ell(complex, zeta)
    if lz >= top:
        return NotApplicable("l(zeta) >= Eplus + margin", hyp, lz)
    if lz >= e.threshold or e(complex, zeta) != 1:
        return NotApplicable("e(zeta) != 1", hyp, zeta)
    basis = _cached_svd(complex, basis)
    beta = basis.boundary_depth()
    if e.threshold < beta + Eplus + 2 * margin:
        return NotApplicable("threshold < beta + Eplus + 2 margin", hyp, beta)
    if not e.support:  # pragma: no cover - excluded by e(zeta) = 1
        raise DetectionFailure(zeta)

    lattice = default_lattice() if lattice is None else [exponent(a) for a in lattice]
    count, worst = 0, NEG_INF
    for mu in lattice_chains(_perturbation_labels(complex, zeta), lattice, max_representatives):
        dmu = complex.d(mu)
        rep = zeta + dmu
        if ell(complex, rep) >= top:
            continue
        count += 1
        if dmu:
            level = basis.preimage_level(dmu)
            worst = max(worst, level)
            if level >= e.threshold:  # pragma: no cover - excluded by the depth hypothesis
                raise CertificationError("replayed primitive is not below the threshold", witness=mu)
        if e(complex, rep) != 1:
            raise DetectionFailure(rep)
    bound = min(complex.level(lab) - a for lab, a in e.support)
    return DetectionResult(bound, count, worst, hyp)


def _perturbation_labels(complex: FilteredComplex, zeta: Chain) -> List[str]:
    """Generators whose boundary can move ζ within its degree (all non-cycles if ungraded)."""
    degrees = {complex.degree(l) for l in zeta.labels()}
    return [g.label for g in complex.generators
            if g.label in complex.differential and (not complex.graded or g.degree - 1 in degrees)]


def default_lattice(step=Fraction(1, 4), lo=-4, hi=4) -> List[Fraction]:
    out, a = [], Fraction(lo)
    while a <= hi:
        out.append(a)
        a += step
    return out


def lattice_chains(labels: Sequence[str], lattice: Sequence[Fraction], limit: int = 200_000):
    """All chains with each coefficient in ``{0} ∪ {t^a : a in lattice}``."""
    options = [None] + list(lattice)
    total = len(options) ** len(labels)
    if total > limit:
        raise CertificationError(f"lattice search of size {total} exceeds the limit {limit}")
    for combo in itertools.product(options, repeat=len(labels)):
        yield Chain({lab: NovikovScalar.monomial(a) for lab, a in zip(labels, combo) if a is not None})


# -- extension of coefficients -------------------------------------------


@dataclass(frozen=True)
class ExtensionReport:
    left: object
    right: object
    truncated: bool
    witness: Tuple[Tuple[str, int], ...]

    @property
    def equal(self) -> bool:
        return self.left == self.right


def extension_distance_check(capped: CappedComplex, k: int, zeta, window=None, max_pieces: int = 18) -> ExtensionReport:
    """Compare the capped-level distance of ζ to boundaries with the Λ-level one.

    The left side minimizes ℓ(ι(ζ + dη)) over η in the degree-(k+1) capped piece;
    the right side is the distance of ι(ζ) to exact chains over Λ.  When several
    recappings share a degree the piece is infinite and the search is truncated
    to ``|m * period| <= window``.
    """
    zeta = capped_chain(zeta)
    for label, m in zeta:
        if capped_degree(capped.orbit(label), m) != k:
            raise ValueError(f"term ({label}, {m}) is not in degree {k}")
    view, izeta = iota(capped, zeta)
    right = svd(view).distance_to_exact(izeta)

    unique = capped.period == 0 or capped.chern_step != 0
    if unique:
        pieces = []
        for o in capped.orbits:
            if capped.period == 0:
                ms = [0]
            else:
                # degree(o, m) = k + 1 pins m down
                num = o.half_dim - o.cz - 2 * o.kappa0 - (k + 1)
                ms = [num // (2 * o.chern_step)] if num % (2 * o.chern_step) == 0 else []
            pieces.extend((o.label, m) for m in ms if capped_degree(o, m) == k + 1)
    else:
        if window is None:
            raise WindowError("a window is needed to truncate the recapping lattice")
        span = int(exponent(window) / capped.period)
        pieces = capped.capped_pieces(k + 1, range(-span, span + 1))
    if len(pieces) > max_pieces:
        raise CertificationError(f"{len(pieces)} capped orbits in degree {k + 1} exceed the search limit")

    images = [iota(capped, [p])[1] for p in pieces]
    left, witness = NEG_INF if not izeta else None, ()
    for r in range(len(pieces) + 1):
        for subset in itertools.combinations(range(len(pieces)), r):
            eta = Chain()
            for i in subset:
                eta = eta + images[i]
            value = ell(view, izeta + view.d(eta))
            if left is None or value < left:
                left, witness = value, tuple(pieces[i] for i in subset)
    report = ExtensionReport(left, right, not unique, witness)
    if not report.equal and report.truncated:
        raise CertificationError("truncated recapping search does not reach the Novikov distance", witness=report)
    return report


# -- stability --------------------------------------------------------


@dataclass(frozen=True)
class StabilityVerdict:
    ok: bool
    parameter: object = None
    missing: Tuple = ()
    extra: Tuple = ()


def stability_check(spectra: Sequence[Tuple[object, Iterable]]) -> StabilityVerdict:
    """All samples carry the same multiset; otherwise report the first deviating parameter."""
    if len(spectra) < 2:
        raise ValueError("stability_check needs at least two samples")
    ref = Counter(spectra[0][1])
    for param, values in spectra[1:]:
        cur = Counter(values)
        if cur != ref:
            missing = tuple(sorted((ref - cur).elements()))
            extra = tuple(sorted((cur - ref).elements()))
            return StabilityVerdict(False, param, missing, extra)
    return StabilityVerdict(True)
