"""Random instance generators and brute-force oracles.

The oracles never touch the elimination code.  They enumerate changes of
representative with coefficients drawn from a truncated exponent lattice,
using only Novikov arithmetic and the definition of ℓ.  Candidate exponents
are pruned to those that can produce a cancellation: a term whose image
meets nothing else only raises ℓ and can be dropped from any minimizer.

A finite lattice cannot reach exact classes whose primitive is an infinite
series, so exactness is decided separately by a rank test at a random point
of GF(2^64).
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .complex import (
    CappedComplex,
    CappedGenerator,
    Chain,
    FilteredComplex,
    Generator,
    degree as capped_degree,
    ell,
    validate,
)
from .novikov import INF, NEG_INF, NovikovScalar

QUARTER = Fraction(1, 4)
SEARCH_RANGE = (Fraction(-8), Fraction(12))


def quarter_grid(lo=0, hi=4) -> List[Fraction]:
    return [Fraction(i, 4) for i in range(4 * lo, 4 * hi + 1)]


# -- generators ---------------------------------------------------------


def random_complex(rng: random.Random, max_generators: int = 6, max_degree: int = 3,
                   density: float = 0.5, attempts: int = 10_000, min_generators: int = 1,
                   prefix: str = "g") -> FilteredComplex:
    """A valid graded complex with monomial entries on the quarter grid in [0, 4].

    Rejection sampling: draw levels, degrees and entries, keep the first draw
    satisfying the strict filtration and d∘d = 0.
    """
    grid = quarter_grid()
    for _ in range(attempts):
        n = rng.randint(min_generators, max_generators)
        gens = [Generator(f"{prefix}{i}", rng.choice(grid), rng.randint(0, max_degree)) for i in range(n)]
        diff: Dict[str, Chain] = {}
        for g in gens:
            terms = {}
            for h in gens:
                if h.degree != g.degree - 1 or rng.random() > density:
                    continue
                allowed = [b for b in grid if h.level - b < g.level]
                if allowed:
                    terms[h.label] = NovikovScalar.monomial(rng.choice(allowed))
            if terms:
                diff[g.label] = Chain(terms)
        c = FilteredComplex(gens, diff)
        if validate(c).ok:
            return c
    raise RuntimeError("rejection sampling did not produce a valid complex")


def lattice_chains(labels: Sequence[str], lattice: Sequence[Fraction]):
    options = [None] + list(lattice)
    for combo in itertools.product(options, repeat=len(labels)):
        yield Chain({lab: NovikovScalar.monomial(a) for lab, a in zip(labels, combo) if a is not None})


def random_cycle(rng: random.Random, complex: FilteredComplex, grid=None) -> Optional[Chain]:
    """A nonzero cycle with monomial coefficients, or None if no degree has one."""
    grid = grid or quarter_grid(0, 2)
    degrees = sorted({g.degree for g in complex.generators})
    rng.shuffle(degrees)
    for k in degrees:
        labels = [g.label for g in complex.generators if g.degree == k]
        cycles = [c for c in lattice_chains(labels, grid) if c and not complex.d(c)]
        if cycles:
            return rng.choice(cycles)
    return None


# -- pruned exhaustive search --------------------------------------------


def _entries(complex: FilteredComplex, labels):
    return {g: [(h, b) for h, lam in complex.differential.get(g, Chain()).items() for b in lam.terms]
            for g in labels}


def _options(cand: Dict[str, Set[Fraction]], labels, max_terms: int = 2):
    """Per generator: coefficient choices with at most ``max_terms`` monomials."""
    return [[()] + [s for r in range(1, max_terms + 1) for s in itertools.combinations(sorted(cand[g]), r)]
            for g in labels]


def _chains(labels, options):
    for combo in itertools.product(*options):
        yield Chain({g: NovikovScalar(a) for g, a in zip(labels, combo) if a})


def _in_range(a):
    return SEARCH_RANGE[0] <= a <= SEARCH_RANGE[1]


def boundary_candidates(complex, labels, targets, rounds: int = 3):
    """Exponents ``a`` for ``t^a g`` whose image can cancel a target monomial, closed under chaining."""
    ent = _entries(complex, labels)
    cand = {g: set() for g in labels}
    frontier = set(targets)
    seen = set(frontier)
    for _ in range(rounds):
        new = set()
        for g in labels:
            for h, b in ent[g]:
                for h2, e in frontier:
                    if h2 != h:
                        continue
                    a = e - b
                    if _in_range(a) and a not in cand[g]:
                        cand[g].add(a)
                        for h3, b3 in ent[g]:
                            m = (h3, a + b3)
                            if m not in seen:
                                seen.add(m)
                                new.add(m)
        frontier = new
    return cand


def cycle_candidates(complex, labels, seeds, rounds: int = 3):
    """Exponents reachable from ``seeds`` by keeping the image cancellable."""
    ent = _entries(complex, labels)
    cand = {g: set() for g in labels}
    frontier = [(g, a) for g, a in seeds if g in cand]
    for g, a in frontier:
        cand[g].add(a)
    for _ in range(rounds):
        new = []
        for g, a in frontier:
            for h, b in ent[g]:
                for g2 in labels:
                    for h2, b2 in ent[g2]:
                        if h2 == h:
                            a2 = a + b - b2
                            if _in_range(a2) and a2 not in cand[g2]:
                                cand[g2].add(a2)
                                new.append((g2, a2))
        frontier = new
    return cand


# -- GF(2^64) rank test ------------------------------------------------------

_MOD = (1 << 64) | 0b11011  # x^64 + x^4 + x^3 + x + 1, irreducible


def _gf_mul(a: int, b: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> 64:
            a ^= _MOD
    return r


def _gf_pow(a: int, n: int) -> int:
    r = 1
    while n:
        if n & 1:
            r = _gf_mul(r, a)
        a = _gf_mul(a, a)
        n >>= 1
    return r


def _gf_inv(a: int) -> int:
    return _gf_pow(a, (1 << 64) - 2)


def _gf_rank(rows: List[List[int]]) -> int:
    rows = [r[:] for r in rows if any(r)]
    rank, col = 0, 0
    ncols = len(rows[0]) if rows else 0
    while rank < len(rows) and col < ncols:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = _gf_inv(rows[rank][col])
        rows[rank] = [_gf_mul(inv, x) for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col]
                rows[i] = [x ^ _gf_mul(f, y) for x, y in zip(rows[i], rows[rank])]
        rank += 1
        col += 1
    return rank


def generic_is_exact(complex: FilteredComplex, zeta: Chain, rng: Optional[random.Random] = None) -> bool:
    """Whether ζ lies in the image of d over Λ, by evaluating t^{1/D} at a random field element.

    A false answer needs the random point to be a root of a nonzero minor,
    which has probability below deg / 2^64.
    """
    rng = rng or random.Random(0)
    chains = [zeta] + [complex.d(Chain.monomial(g.label)) for g in complex.generators]
    den = 1
    for ch in chains:
        for _, lam in ch.items():
            for e in lam.terms:
                den = den * e.denominator // math.gcd(den, e.denominator)
    s = rng.getrandbits(64) or 1
    s_inv = _gf_inv(s)
    labels = complex.labels

    def value(lam):
        v = 0
        for e in lam.terms:
            n = int(e * den)
            v ^= _gf_pow(s, n) if n >= 0 else _gf_pow(s_inv, -n)
        return v

    def column(ch):
        return [value(ch[l]) for l in labels]

    image = [column(ch) for ch in chains[1:]]
    return _gf_rank(image + [column(zeta)]) == _gf_rank(image)


def brute_spectral_invariant(complex: FilteredComplex, zeta: Chain):
    """min of ℓ(ζ + dβ) over β in degree deg(ζ) + 1 with at most two lattice monomials per generator.

    Exact classes (decided by the rank test) give the sentinel −∞.
    """
    if generic_is_exact(complex, zeta):
        return NEG_INF
    degrees = {complex.degree(l) for l in zeta.labels()}
    labels = [g.label for g in complex.generators if g.degree - 1 in degrees and g.label in complex.differential]
    targets = [(l, e) for l, lam in zeta.items() for e in lam.terms]
    cand = boundary_candidates(complex, labels, targets)
    best = INF
    for beta in _chains(labels, _options(cand, labels)):
        best = min(best, ell(complex, zeta + complex.d(beta)))
    return best


def _det(rows: List[List[NovikovScalar]]) -> NovikovScalar:
    """Leibniz expansion; signs vanish mod 2."""
    n = len(rows)
    total = NovikovScalar()
    for perm in itertools.permutations(range(n)):
        term = NovikovScalar([0])
        for i, j in enumerate(perm):
            term = term * rows[i][j]
            if not term:
                break
        total = total + term
    return total


def kernel_elements(complex: FilteredComplex, labels) -> List[Chain]:
    """Circuits of d on ``labels``, normalized to minimal exponent 0.

    For a column set S and a row set R with |R| = |S| - 1, Cramer's rule gives
    the candidate with coefficient det(M[R, S - j]) on column j; candidates
    that are genuine cycles span the kernel.
    """
    targets = sorted({t for g in labels for t in complex.d(Chain.monomial(g)).labels()})
    matrix = {g: complex.d(Chain.monomial(g)) for g in labels}
    found = set()
    for m in range(2, len(labels) + 1):
        for cols in itertools.combinations(labels, m):
            for rows in itertools.combinations(targets, m - 1):
                coeffs = {}
                for j in cols:
                    rest = [g for g in cols if g != j]
                    coeffs[j] = _det([[matrix[g][r] for g in rest] for r in rows])
                eps = Chain(coeffs)
                if eps and not complex.d(eps):
                    found.add(eps.shift(-min(eps.exponents())))
    return sorted(found, key=lambda c: repr(c))


class OracleBudgetExceeded(RuntimeError):
    """The brute-force search would exceed its step budget; the instance is out of desk scale."""

    def __init__(self, message, steps):
        super().__init__(message)
        self.steps = steps


class _Budget:
    def __init__(self, limit):
        self.limit, self.steps = limit, 0

    def spend(self, n=1):
        self.steps += n
        if self.limit is not None and self.steps > self.limit:
            raise OracleBudgetExceeded(f"boundary-depth oracle exceeded {self.limit} steps", self.steps)


def _refine(complex, y, kernel, depth, budget):
    budget.spend()
    best = ell(complex, y)
    if depth == 0:
        return best
    for kap in kernel:
        shifts = {e - f for l, lam in y.items() for e in lam.terms for f in kap[l].terms}
        for s in sorted(shifts):
            best = min(best, _refine(complex, y + kap.shift(s), kernel, depth - 1, budget))
    return best


def _normalized_combos(n: int, grid):
    """Tuples over ``{None} ∪ grid`` (grid >= 0) whose smallest entry is 0; the first 0 is at position i."""
    rest = [a for a in grid if a != 0]
    for i in range(n):
        for head in itertools.product([None] + rest, repeat=i):
            for tail in itertools.product([None] + list(grid), repeat=n - 1 - i):
                yield head + (Fraction(0),) + tail


DEPTH_BUDGET = 100_000


def brute_boundary_depth(complex: FilteredComplex, grid=None, budget: Optional[int] = DEPTH_BUDGET):
    """max over boundaries x of (min ℓ(y) over dy = x) - ℓ(x).

    Primitives y range over monomial lattice chains normalized to minimal
    exponent 0; each is improved by up to two shifted kernel elements.
    Raises OracleBudgetExceeded once more than ``budget`` chains have been
    examined (None disables the limit).
    """
    grid = quarter_grid(0, 6) if grid is None else grid
    counter = _Budget(budget)
    best = Fraction(0)
    for k in sorted({g.degree for g in complex.generators}):
        labels = [g.label for g in complex.generators if g.degree == k and g.label in complex.differential]
        if not labels:
            continue
        kernel = kernel_elements(complex, labels)
        depth = 2 if kernel else 0
        reps: Dict[Chain, Chain] = {}
        for combo in _normalized_combos(len(labels), grid):
            counter.spend()
            y = Chain({l: NovikovScalar.monomial(a) for l, a in zip(labels, combo) if a is not None})
            x = complex.d(y)
            if not x:
                continue
            m = min(x.exponents())
            key, y = x.shift(-m), y.shift(-m)
            if key not in reps or ell(complex, y) < ell(complex, reps[key]):
                reps[key] = y
        for x, y in reps.items():
            best = max(best, _refine(complex, y, kernel, depth, counter) - ell(complex, x))
    return best


# -- detection functionals ------------------------------------------------


def plant_functional(complex: FilteredComplex, zeta: Chain, threshold, rng: random.Random):
    """Support set inside the terms of ζ making a chain functional with e(ζ) = 1, or None.

    The chain-functional condition is linear over GF(2) in the indicator of
    the support; solve it with e(ζ) = 1 appended and pick a random solution.
    """
    terms = sorted((l, e) for l, lam in zeta.items() for e in lam.terms)
    idx = {t: i for i, t in enumerate(terms)}
    rows = []
    for src, img in complex.differential.items():
        for tgt, lam in img.items():
            for b in lam.terms:
                for (l, e) in terms:
                    if l != tgt:
                        continue
                    a = e - b
                    if complex.level(src) - a >= threshold:
                        continue
                    image = complex.d(Chain.monomial(src, a))
                    mask = 0
                    for l2, lam2 in image.items():
                        for e2 in lam2.terms:
                            if (l2, e2) in idx:
                                mask |= 1 << idx[(l2, e2)]
                    rows.append((mask, 0))
    rows.append(((1 << len(terms)) - 1, 1))
    solution = _gf2_random_solution(rows, len(terms), rng)
    if solution is None:
        return None
    return [terms[i] for i in range(len(terms)) if solution >> i & 1]


def _gf2_random_solution(rows, n, rng):
    pivots = []  # (bit, mask, rhs)
    for mask, rhs in rows:
        for bit, pm, pr in pivots:
            if mask >> bit & 1:
                mask ^= pm
                rhs ^= pr
        if mask == 0:
            if rhs:
                return None
            continue
        bit = mask.bit_length() - 1
        new = []
        for b2, pm, pr in pivots:
            if pm >> bit & 1:
                pm ^= mask
                pr ^= rhs
            new.append((b2, pm, pr))
        pivots = new + [(bit, mask, rhs)]
    pivot_bits = {b for b, _, _ in pivots}
    x = 0
    for i in range(n):
        if i not in pivot_bits and rng.random() < 0.5:
            x |= 1 << i
    for bit, mask, rhs in pivots:
        v = rhs
        rest = mask & ~(1 << bit)
        v ^= bin(rest & x).count("1") & 1
        if v:
            x |= 1 << bit
    return x


def brute_detection_minimum(complex, zeta, support, top, lattice):
    """Minimum level of a support monomial present in some representative ζ + dμ below ``top``.

    Also returns whether every such representative evaluates to 1.
    """
    support = set(support)
    degrees = {complex.degree(l) for l in zeta.labels()}
    labels = [g.label for g in complex.generators if g.degree - 1 in degrees]
    best, all_detected = INF, True
    for mu in lattice_chains(labels, lattice):
        rep = zeta + complex.d(mu)
        if ell(complex, rep) >= top:
            continue
        present = [complex.level(l) - e for l, lam in rep.items() for e in lam.terms if (l, e) in support]
        if len(present) % 2 == 0:
            all_detected = False
        if present:
            best = min(best, min(present))
    return best, all_detected


# -- capped complexes ------------------------------------------------------


def random_capped(rng: random.Random, period: Fraction, max_orbits: int = 4, half_dim: int = 1,
                  attempts: int = 10_000) -> CappedComplex:
    """A valid capped complex; with ``period > 0`` the Chern step is 1 so degrees pin down cappings."""
    grid = quarter_grid(0, 2)
    step = 1 if period else 0
    for _ in range(attempts):
        n = rng.randint(1, max_orbits)
        orbits = [
            CappedGenerator(f"o{i}", rng.choice(quarter_grid(0, 3)), rng.randint(-2, 2), 0, step,
                            rng.choice(grid), Fraction(period), half_dim)
            for i in range(n)
        ]
        diff = {}
        for o in orbits:
            terms = {}
            for p in orbits:
                if p is o or rng.random() > 0.6:
                    continue
                base = p.area_base - o.area_base
                exps = []
                for j in ([0] if not period else range(-2, 3)):
                    if capped_degree(p, j) != capped_degree(o, 0) - 1:
                        continue
                    b = base + j * period
                    if p.h_integral - b < o.h_integral:
                        exps.append(b)
                if exps:
                    pick = [e for e in exps if rng.random() < 0.7] or [rng.choice(exps)]
                    terms[p.label] = NovikovScalar(pick)
            if terms:
                diff[o.label] = Chain(terms)
        capped = CappedComplex(orbits, diff)
        if capped.validate().ok:
            return capped
    raise RuntimeError("rejection sampling did not produce a valid capped complex")


def random_capped_cycle(rng: random.Random, capped: CappedComplex, m_range=range(-2, 3)):
    """(k, capped chain) for a nonzero capped chain whose ι-image is a cycle, or None."""
    from .complex import iota

    view = capped.view()
    by_degree: Dict[int, List[Tuple[str, int]]] = {}
    for o in capped.orbits:
        for m in ([0] if o.period == 0 else m_range):
            by_degree.setdefault(capped_degree(o, m), []).append((o.label, m))
    found = []
    for k, pieces in sorted(by_degree.items()):
        if len(pieces) > 10:
            continue
        for r in range(1, len(pieces) + 1):
            for subset in itertools.combinations(pieces, r):
                _, z = iota(capped, subset)
                if z and not view.d(z):
                    found.append((k, subset))
    return rng.choice(found) if found else None
