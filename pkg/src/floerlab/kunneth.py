"""Tensor products and direct sums of filtered complexes."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Dict

from .complex import Chain, ComplexError, FilteredComplex, Generator
from .spectral import spectral_invariant, svd
from .novikov import NEG_INF


def pair_label(a: str, b: str) -> str:
    return f"({a}|{b})"


def tensor(c1: FilteredComplex, c2: FilteredComplex) -> FilteredComplex:
    """Generators ``(γ|μ)`` with added levels and degrees; d = d⊗1 + 1⊗d (no signs mod 2)."""
    gens = []
    for g in c1.generators:
        for h in c2.generators:
            gens.append(Generator(pair_label(g.label, h.label), g.level + h.level, g.degree + h.degree))
    labels = [g.label for g in gens]
    if len(set(labels)) != len(labels):
        raise ComplexError("pair labels collide; labels must not contain '(', '|' or ')' ambiguously")
    diff: Dict[str, Chain] = {}
    for g in c1.generators:
        for h in c2.generators:
            out = Chain()
            dg = c1.differential.get(g.label)
            if dg:
                out = out + Chain({pair_label(t, h.label): lam for t, lam in dg.items()})
            dh = c2.differential.get(h.label)
            if dh:
                out = out + Chain({pair_label(g.label, t): lam for t, lam in dh.items()})
            if out:
                diff[pair_label(g.label, h.label)] = out
    return FilteredComplex(gens, diff, graded=c1.graded and c2.graded)


def tensor_chains(z1: Chain, z2: Chain) -> Chain:
    out = Chain()
    for a, x in z1.items():
        for b, y in z2.items():
            out = out + Chain({pair_label(a, b): x * y})
    return out


def direct_sum(c1: FilteredComplex, c2: FilteredComplex, prefixes=("L.", "R.")) -> FilteredComplex:
    """Disjoint union; labels are prefixed only when the two label sets intersect."""
    clash = set(c1.labels) & set(c2.labels)
    p1, p2 = prefixes if clash else ("", "")

    def relabel(c, p):
        gens = [Generator(p + g.label, g.level, g.degree) for g in c.generators]
        diff = {p + k: Chain({p + t: lam for t, lam in v.items()}) for k, v in c.differential.items()}
        return gens, diff

    g1, d1 = relabel(c1, p1)
    g2, d2 = relabel(c2, p2)
    return FilteredComplex(g1 + g2, {**d1, **d2}, graded=c1.graded and c2.graded)


@dataclass(frozen=True)
class ProductReport:
    c1: object
    c2: object
    product: object

    @property
    def ok(self) -> bool:
        expected = NEG_INF if NEG_INF in (self.c1, self.c2) else self.c1 + self.c2
        return self.product == expected


def verify_product_formula(c1: FilteredComplex, z1: Chain, c2: FilteredComplex, z2: Chain) -> ProductReport:
    a = spectral_invariant(c1, z1)
    b = spectral_invariant(c2, z2)
    prod = spectral_invariant(tensor(c1, c2), tensor_chains(z1, z2))
    return ProductReport(a, b, prod)


@dataclass(frozen=True)
class MaxReport:
    beta1: object
    beta2: object
    beta_sum: object
    bars_match: bool

    @property
    def ok(self) -> bool:
        return self.beta_sum == max(self.beta1, self.beta2) and self.bars_match


def verify_max_formula(c1: FilteredComplex, c2: FilteredComplex) -> MaxReport:
    """β(C1 ⊕ C2) = max(β1, β2), and the bar-length multisets add up."""
    s = direct_sum(c1, c2)
    b1, b2, bs = svd(c1), svd(c2), svd(s)
    lengths = Counter(b1.barcode().lengths()) + Counter(b2.barcode().lengths())
    return MaxReport(b1.boundary_depth(), b2.boundary_depth(), bs.boundary_depth(),
                     lengths == Counter(bs.barcode().lengths()))
