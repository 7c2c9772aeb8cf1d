"""Sanity checks of the brute-force oracles themselves."""

import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from floerlab import oracle
from floerlab.complex import Chain, FilteredComplex, Generator, validate
from floerlab.novikov import NEG_INF, NovikovScalar
from floerlab.spectral import spectral_invariant, svd


def series_exact():
    # g1 = d((1 + t)^{-1} (x1 + x2)): exact, but only through an infinite series
    gens = [Generator("x1", 1, 1), Generator("x2", 1, 1), Generator("g1", 0, 0), Generator("g2", 0, 0)]
    diff = {"x1": Chain({"g1": NovikovScalar([0]), "g2": NovikovScalar([1])}),
            "x2": Chain({"g1": NovikovScalar([0]), "g2": NovikovScalar([0])})}
    return FilteredComplex(gens, diff)


def test_rank_test_sees_series_primitives():
    c = series_exact()
    assert oracle.generic_is_exact(c, Chain.monomial("g1"))
    assert spectral_invariant(c, Chain.monomial("g1")) == NEG_INF
    assert oracle.brute_spectral_invariant(c, Chain.monomial("g1")) == NEG_INF


def test_rank_test_rejects_non_boundary():
    c = FilteredComplex([Generator("x", 3, 1), Generator("y", 1, 0), Generator("z", 2, 0)],
                        {"x": Chain.monomial("y")})
    assert not oracle.generic_is_exact(c, Chain.monomial("z"))
    assert oracle.generic_is_exact(c, Chain.monomial("y", 2))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_rank_test_agrees_with_svd(seed):
    rng = random.Random(seed)
    c = oracle.random_complex(rng)
    z = oracle.random_cycle(rng, c)
    if z is not None:
        assert oracle.generic_is_exact(c, z) == (svd(c).distance_to_exact(z) == NEG_INF)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_random_instances_are_valid(seed):
    rng = random.Random(seed)
    c = oracle.random_complex(rng)
    assert validate(c).ok
    assert all(0 <= g.level <= 4 and 0 <= g.degree <= 3 for g in c.generators)
    capped = oracle.random_capped(rng, rng.choice([0, 1]))
    assert capped.validate().ok


def test_single_kernel_element_needs_two_term_multiple():
    # the optimal primitive of t^{5/2} g4 is g0 plus a two-term multiple of the lone cycle
    gens = [Generator("g0", Fraction(7, 2), 3), Generator("g1", Fraction(1, 4), 3),
            Generator("g2", Fraction(13, 4), 3), Generator("g3", Fraction(7, 2), 2),
            Generator("g4", Fraction(3, 2), 2)]
    m = NovikovScalar.monomial
    diff = {"g0": Chain({"g4": m(Fraction(5, 2))}),
            "g1": Chain({"g3": m(Fraction(7, 2)), "g4": m(Fraction(9, 4))}),
            "g2": Chain({"g3": m(2), "g4": m(Fraction(9, 4))})}
    c = FilteredComplex(gens, diff)
    assert len(oracle.kernel_elements(c, ["g0", "g1", "g2"])) == 1
    assert oracle.brute_boundary_depth(c) == svd(c).boundary_depth() == Fraction(5, 2)


def test_depth_oracle_budget():
    c = series_exact()
    try:
        oracle.brute_boundary_depth(c, budget=10)
    except oracle.OracleBudgetExceeded as exc:
        assert exc.steps == 11
    else:
        raise AssertionError("budget was not enforced")
    assert oracle.brute_boundary_depth(c, budget=None) == svd(c).boundary_depth()
