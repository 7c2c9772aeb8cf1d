"""Filtered chain complexes over the Novikov field and the capped-orbit model."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from .novikov import (
    NEG_INF,
    NovikovScalar,
    ZERO,
    exponent,
    format_exponent,
    parse_scalar,
    format_scalar,
)


class ComplexError(ValueError):
    """Malformed complex or chain (unknown label, duplicate generator, bad schema)."""


class CappingError(ValueError):
    """A recapping was requested for an orbit with a unique capping class."""


@dataclass(frozen=True)
class Generator:
    label: str
    level: Fraction
    degree: int


class Chain:
    """Finite map label -> nonzero Novikov scalar.  Immutable."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Optional[Mapping[str, NovikovScalar]] = None):
        clean = {}
        for label, c in (coeffs or {}).items():
            if not isinstance(c, NovikovScalar):
                raise TypeError(f"coefficient of {label!r} is not a NovikovScalar")
            if c:
                clean[label] = c
        object.__setattr__(self, "_coeffs", dict(sorted(clean.items())))

    def __setattr__(self, name, value):
        raise AttributeError("Chain is immutable")

    @classmethod
    def monomial(cls, label: str, a=0) -> "Chain":
        return cls({label: NovikovScalar.monomial(a)})

    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[str, object]]) -> "Chain":
        """Build from ``(label, exponent)`` pairs, collecting mod 2."""
        acc: Dict[str, list] = {}
        for label, a in terms:
            acc.setdefault(label, []).append(a)
        return cls({k: NovikovScalar(v) for k, v in acc.items()})

    def items(self):
        return self._coeffs.items()

    def labels(self):
        return self._coeffs.keys()

    def __getitem__(self, label: str) -> NovikovScalar:
        return self._coeffs.get(label, ZERO)

    def __contains__(self, label) -> bool:
        return label in self._coeffs

    def __len__(self) -> int:
        return len(self._coeffs)

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __add__(self, other: "Chain") -> "Chain":
        out = dict(self._coeffs)
        for k, c in other.items():
            out[k] = out[k] + c if k in out else c
        return Chain(out)

    __sub__ = __add__

    def scale(self, lam: NovikovScalar) -> "Chain":
        return Chain({k: lam * c for k, c in self._coeffs.items()})

    def shift(self, a) -> "Chain":
        return Chain({k: c.shift(a) for k, c in self._coeffs.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Chain):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self):
        return hash(tuple(self._coeffs.items()))

    def __repr__(self) -> str:
        return f"Chain({format_chain(self)!r})"

    def exponents(self):
        for c in self._coeffs.values():
            yield from c.terms


def format_chain(chain: Chain) -> str:
    if not chain:
        return "0"
    return " + ".join(f"({format_scalar(c)}){k}" for k, c in chain.items())


class FilteredComplex:
    """Generators with action levels and degrees, and a differential on generators.

    ``differential[label]`` is the chain ``d(label)``.  ``graded=False`` marks a
    complex whose Novikov variable carries degree (e.g. a capped model with a
    nonzero Chern step); the grading axiom is then not checked.
    """

    def __init__(self, generators: Iterable[Generator], differential: Optional[Mapping[str, Chain]] = None,
                 graded: bool = True):
        gens = tuple(generators)
        index = {}
        for i, g in enumerate(gens):
            if g.label in index:
                raise ComplexError(f"duplicate generator label {g.label!r}")
            index[g.label] = i
        diff = {}
        for label, chain in (differential or {}).items():
            if label not in index:
                raise ComplexError(f"differential from unknown label {label!r}")
            for t in chain.labels():
                if t not in index:
                    raise ComplexError(f"differential {label!r} -> unknown label {t!r}")
            if chain:
                diff[label] = chain
        self.generators = gens
        self.differential: Dict[str, Chain] = diff
        self.graded = graded
        self._index = index

    def __repr__(self):
        return f"FilteredComplex({len(self.generators)} generators, {sum(len(c) for c in self.differential.values())} arrows)"

    @property
    def labels(self) -> List[str]:
        return [g.label for g in self.generators]

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ComplexError(f"unknown label {label!r}") from None

    def generator(self, label: str) -> Generator:
        return self.generators[self.index(label)]

    def level(self, label: str) -> Fraction:
        return self.generator(label).level

    def degree(self, label: str) -> int:
        return self.generator(label).degree

    def d(self, chain: Chain) -> Chain:
        out = Chain()
        for label, lam in chain.items():
            self.index(label)
            img = self.differential.get(label)
            if img is not None:
                out = out + img.scale(lam)
        return out

    def ell(self, chain: Chain):
        return ell(self, chain)

    def exponents(self):
        for c in self.differential.values():
            yield from c.exponents()

    def shifted(self, c) -> "FilteredComplex":
        c = exponent(c)
        gens = [Generator(g.label, g.level + c, g.degree) for g in self.generators]
        return FilteredComplex(gens, self.differential, self.graded)


def ell(complex: FilteredComplex, chain: Chain):
    """Filtration level: max of ``level(label) - valuation(coefficient)``; ``-inf`` for zero."""
    best = NEG_INF
    for label, lam in chain.items():
        v = complex.level(label) - lam.valuation()
        if v > best:
            best = v
    return best


# -- validation ---------------------------------------------------------


@dataclass
class Violation:
    kind: str  # "grading" | "filtration" | "d-squared"
    source: str
    target: str
    detail: str


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self):
        return {v.kind for v in self.violations}


def validate(complex: FilteredComplex) -> ValidationReport:
    """Check the grading, strict filtration decrease, and d∘d = 0."""
    report = ValidationReport()
    for g in complex.generators:
        img = complex.differential.get(g.label, Chain())
        for target, lam in img.items():
            t = complex.generator(target)
            if complex.graded and t.degree != g.degree - 1:
                report.violations.append(Violation(
                    "grading", g.label, target, f"degree {g.degree} -> {t.degree}"))
            if t.level - lam.valuation() >= g.level:
                report.violations.append(Violation(
                    "filtration", g.label, target,
                    f"level {format_exponent(t.level)} - {format_exponent(lam.valuation())} >= {format_exponent(g.level)}"))
        dd = complex.d(img)
        for target, lam in dd.items():
            report.violations.append(Violation(
                "d-squared", g.label, target, f"coefficient {format_scalar(lam)}"))
    return report


# -- capped orbits ------------------------------------------------------


@dataclass(frozen=True)
class CappedGenerator:
    label: str
    h_integral: Fraction
    cz: int
    kappa0: int
    chern_step: int
    area_base: Fraction
    period: Fraction
    half_dim: int

    def __post_init__(self):
        if self.period < 0:
            raise ComplexError(f"negative period for {self.label!r}")

    def _check(self, m: int):
        if self.period == 0 and m != 0:
            raise CappingError(f"{self.label!r} has a unique capping class; got recapping m={m}")

    def area(self, m: int = 0) -> Fraction:
        self._check(m)
        return self.area_base + m * self.period

    def chern(self, m: int = 0) -> int:
        self._check(m)
        return self.kappa0 + m * self.chern_step

    def action(self, m: int = 0) -> Fraction:
        return self.h_integral - self.area(m)


def degree(g: CappedGenerator, m: int = 0) -> int:
    """Grading ``n - CZ - 2 * (Chern pairing of the capping)``."""
    return g.half_dim - g.cz - 2 * g.chern(m)


class CappedComplex:
    """Orbits with capping data plus the Novikov-coefficient differential between orbits."""

    def __init__(self, orbits: Iterable[CappedGenerator], differential: Optional[Mapping[str, Chain]] = None):
        self.orbits = tuple(orbits)
        self._by_label = {}
        for o in self.orbits:
            if o.label in self._by_label:
                raise ComplexError(f"duplicate generator label {o.label!r}")
            self._by_label[o.label] = o
        periods = {o.period for o in self.orbits}
        steps = {o.chern_step for o in self.orbits}
        if len(periods) > 1 or len(steps) > 1:
            raise ComplexError("period lattice and Chern step must be shared by all orbits")
        self.period = periods.pop() if periods else Fraction(0)
        self.chern_step = steps.pop() if steps else 0
        self.differential = {k: v for k, v in (differential or {}).items() if v}
        self._view = None

    def orbit(self, label: str) -> CappedGenerator:
        try:
            return self._by_label[label]
        except KeyError:
            raise ComplexError(f"unknown label {label!r}") from None

    @property
    def graded_view(self) -> bool:
        return self.period == 0 or self.chern_step == 0

    def view(self) -> FilteredComplex:
        """The orbit complex over the Novikov field (levels are the Hamiltonian integrals)."""
        if self._view is None:
            gens = [Generator(o.label, o.h_integral, degree(o, 0)) for o in self.orbits]
            self._view = FilteredComplex(gens, self.differential, graded=self.graded_view)
        return self._view

    def lift(self, label: str, a) -> Optional[int]:
        """The capping index m with area ``a``, or None if ``a`` is not a capping area."""
        o = self.orbit(label)
        a = exponent(a)
        if o.period == 0:
            return 0 if a == o.area_base else None
        q = (a - o.area_base) / o.period
        return int(q) if q.denominator == 1 else None

    def capped_pieces(self, k: int, m_range: range):
        """Capped orbits of degree ``k`` with capping index in ``m_range`` (all, if unique capping)."""
        out = []
        for o in self.orbits:
            ms = [0] if o.period == 0 else list(m_range)
            for m in ms:
                if degree(o, m) == k:
                    out.append((o.label, m))
        return out

    def validate(self) -> ValidationReport:
        report = validate(self.view())
        for src, img in self.differential.items():
            o = self.orbit(src)
            for tgt, lam in img.items():
                p = self.orbit(tgt)
                for b in lam.terms:
                    shift = b - (p.area_base - o.area_base)
                    if self.period == 0:
                        j = 0 if shift == 0 else None
                    else:
                        q = shift / self.period
                        j = int(q) if q.denominator == 1 else None
                    if j is None:
                        report.violations.append(Violation(
                            "capping", src, tgt, f"area {format_exponent(b)} is off the capping lattice"))
                    elif degree(p, j) != degree(o, 0) - 1:
                        report.violations.append(Violation(
                            "grading", src, tgt, f"capped degree {degree(o, 0)} -> {degree(p, j)}"))
        return report


def capped_chain(terms: Iterable[Tuple[str, int]]) -> Tuple[Tuple[str, int], ...]:
    """Canonical mod-2 form of a capped chain: sorted pairs appearing an odd number of times."""
    counts: Dict[Tuple[str, int], int] = {}
    for t in terms:
        counts[t] = counts.get(t, 0) + 1
    return tuple(sorted(t for t, c in counts.items() if c % 2))


def iota(capped: CappedComplex, chain: Iterable[Tuple[str, int]]) -> Tuple[FilteredComplex, Chain]:
    """Send each capped orbit (γ, m) to t^{area(m)} γ."""
    terms = [(label, capped.orbit(label).area(m)) for label, m in capped_chain(chain)]
    return capped.view(), Chain.from_terms(terms)


def pi_k_member(capped: CappedComplex, label: str, a, k: int) -> bool:
    """True iff ``t^a label`` is not the image of a capped orbit of degree ``k``."""
    m = capped.lift(label, a)
    if m is None:
        return True
    return degree(capped.orbit(label), m) != k


# -- documents ----------------------------------------------------------


def _differential_entries(differential: Mapping[str, Chain], order: List[str]):
    entries = []
    for src in order:
        img = differential.get(src)
        if img is None:
            continue
        for tgt, lam in img.items():
            if lam.window is not None:
                raise ComplexError("windowed coefficients cannot be written to a document")
            entries.append({"from": src, "to": tgt, "exponents": [format_exponent(a) for a in lam.terms]})
    return entries


def _read_differential(entries, known) -> Dict[str, Chain]:
    acc: Dict[str, Dict[str, NovikovScalar]] = {}
    for i, e in enumerate(entries):
        for key in ("from", "to", "exponents"):
            if key not in e:
                raise ComplexError(f"differential[{i}]: missing field {key!r}")
        src, tgt = e["from"], e["to"]
        for lab in (src, tgt):
            if lab not in known:
                raise ComplexError(f"differential[{i}]: unknown label {lab!r}")
        if tgt in acc.get(src, {}):
            raise ComplexError(f"differential[{i}]: duplicate arrow {src!r} -> {tgt!r}")
        try:
            lam = NovikovScalar(exponent(a) for a in e["exponents"])
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise ComplexError(f"differential[{i}].exponents: {exc}") from None
        acc.setdefault(src, {})[tgt] = lam
    return {src: Chain(m) for src, m in acc.items()}


def complex_to_document(complex: FilteredComplex) -> dict:
    doc = {
        "generators": [
            {"label": g.label, "level": format_exponent(g.level), "degree": g.degree}
            for g in complex.generators
        ],
        "differential": _differential_entries(complex.differential, complex.labels),
    }
    if not complex.graded:
        doc["graded"] = False
    return doc


def complex_from_document(doc: Mapping) -> FilteredComplex:
    if "generators" not in doc:
        raise ComplexError("document: missing field 'generators'")
    gens = []
    for i, g in enumerate(doc["generators"]):
        for key in ("label", "level", "degree"):
            if key not in g:
                raise ComplexError(f"generators[{i}]: missing field {key!r}")
        try:
            gens.append(Generator(str(g["label"]), exponent(g["level"]), int(g["degree"])))
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise ComplexError(f"generators[{i}]: {exc}") from None
    labels = [g.label for g in gens]
    if len(set(labels)) != len(labels):
        dup = next(l for l in labels if labels.count(l) > 1)
        raise ComplexError(f"duplicate generator label {dup!r}")
    diff = _read_differential(doc.get("differential", []), set(labels))
    return FilteredComplex(gens, diff, graded=bool(doc.get("graded", True)))


_CAPPED_FIELDS = ("label", "h_integral", "cz", "kappa0", "chern_step", "area_base", "period", "half_dim")


def capped_to_document(capped: CappedComplex) -> dict:
    return {
        "generators": [
            {
                "label": o.label,
                "h_integral": format_exponent(o.h_integral),
                "cz": o.cz,
                "kappa0": o.kappa0,
                "chern_step": o.chern_step,
                "area_base": format_exponent(o.area_base),
                "period": format_exponent(o.period),
                "half_dim": o.half_dim,
            }
            for o in capped.orbits
        ],
        "differential": _differential_entries(capped.differential, [o.label for o in capped.orbits]),
    }


def capped_from_document(doc: Mapping) -> CappedComplex:
    if "generators" not in doc:
        raise ComplexError("document: missing field 'generators'")
    orbits = []
    for i, g in enumerate(doc["generators"]):
        for key in _CAPPED_FIELDS:
            if key not in g:
                raise ComplexError(f"generators[{i}]: missing field {key!r}")
        try:
            orbits.append(CappedGenerator(
                str(g["label"]), exponent(g["h_integral"]), int(g["cz"]), int(g["kappa0"]),
                int(g["chern_step"]), exponent(g["area_base"]), exponent(g["period"]), int(g["half_dim"])))
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise ComplexError(f"generators[{i}]: {exc}") from None
    labels = [o.label for o in orbits]
    if len(set(labels)) != len(labels):
        raise ComplexError("duplicate generator label")
    diff = _read_differential(doc.get("differential", []), set(labels))
    return CappedComplex(orbits, diff)


def chain_to_document(chain: Chain) -> dict:
    return {k: format_scalar(c) for k, c in chain.items()}


def chain_from_document(doc: Mapping) -> Chain:
    try:
        return Chain({str(k): parse_scalar(str(v)) for k, v in doc.items()})
    except ValueError as exc:
        raise ComplexError(f"chain: {exc}") from None


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False)
