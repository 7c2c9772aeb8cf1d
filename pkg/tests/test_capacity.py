from fractions import Fraction as F

import pytest
from hypothesis import assume, given, strategies as st

from floerlab import capacity as cap
from floerlab.models import fiber_hbar_lower
from floerlab.spectral import NotApplicable

rationals = st.fractions(min_value=-10, max_value=10, max_denominator=12)
positive = st.fractions(min_value=F(1, 12), max_value=10, max_denominator=12)


def test_lemma3_flat_construction():
    A = F(3, 4)
    cert = cap.lemma3_bound(0, A, A, F(1, 5))
    assert cert.value == A and cert.kind == "lower" and cert.quantity == "c"


def test_lemma3_is_strict():
    res = cap.lemma3_bound(F(1, 2), 1, 1, F(1, 2))
    assert isinstance(res, NotApplicable) and not res


@given(rationals, rationals, rationals, positive)
def test_oscillation_substitution(Eplus, Eminus, Emin, hbar):
    assume(Eplus >= Emin)
    res = cap.lemma3_bound_from_oscillation(Eplus, Eminus, Emin, hbar)
    assert isinstance(res, cap.Certificate) == (2 * Eplus - Emin - Eminus < hbar)


def test_two_lagrangian():
    assert cap.two_lagrangian_bound(F(1, 3), F(1, 3)).value == F(2, 3)


@given(positive, positive)
def test_two_lagrangian_symmetric(a, b):
    assert cap.two_lagrangian_bound(a, b) == cap.two_lagrangian_bound(b, a)


@given(positive)
def test_ball_feasibility(h):
    assert cap.ball_embedding_obstruction(h).obstructed == (2 * h >= 1)


def test_obstruction_examples():
    assert cap.ball_embedding_obstruction(F(1, 2)).label == "obstructed"
    assert cap.ball_embedding_obstruction(F(1, 4)).label == "unobstructed-by-this-test"
    assert cap.product_torus_obstruction(F(1, 2), F(3, 4)).obstructed
    assert not cap.product_torus_obstruction(F(49, 100), 5).obstructed


def test_depth_dominates_hbar():
    cert = cap.depth_dominates_hbar(True, F(1, 3))
    assert (cert.quantity, cert.kind, cert.value) == ("beta", "lower", F(1, 3))
    assert isinstance(cap.depth_dominates_hbar(False, F(1, 3)), cap.NoConclusion)
    # chained with a toric fiber
    a = [F(2, 5), F(1, 3), F(1, 2)]
    assert cap.depth_dominates_hbar(True, fiber_hbar_lower(a)).value == min(a)


def test_spectral_norm():
    assert cap.spectral_norm(2, 3).value == 5
    assert cap.spectral_norm(F(7, 4), 0).value == F(7, 4)
    with pytest.raises(ValueError):
        cap.spectral_norm(-1, 0, valid_pair=True)


@given(positive, positive, positive)
def test_two_lagrangian_lower_bound_on_gamma(A, extra1, extra2):
    # both one-sided invariants are at least A
    assert cap.spectral_norm(A + extra1, A + extra2).value >= 2 * A


def test_energy_capacity():
    zero = cap.energy_capacity_chain(0, F(1, 10))
    assert zero.kind == "exact" and zero.value == 0
    assert cap.energy_capacity_chain(1, F(1, 10)).value == F(11, 10)


def test_ledger_detects_contradiction():
    ledger = cap.CapacityLedger()
    ledger.add(cap.lemma3_bound(0, 2, 2, 1))
    ledger.add(cap.energy_capacity_chain(1, F(1, 10)))
    assert not ledger.consistent
    (c,) = ledger.contradictions()
    assert c.quantity == "c" and c.lower.value == 2 and c.upper.value == F(11, 10)


def test_ledger_consistent_chain():
    ledger = cap.CapacityLedger()
    ledger.add(cap.lemma3_bound(0, 1, 1, 1))
    ledger.add(cap.energy_capacity_chain(1, F(1, 10)))
    assert ledger.consistent
    assert ledger.add(cap.lemma3_bound(5, 1, 1, 1)) is not None
    assert len(ledger.entries) == 2


def test_certificate_document_round_trip():
    cert = cap.two_lagrangian_bound(F(1, 3), F(1, 2))
    assert cap.Certificate.from_document(cert.to_document()) == cert
    with pytest.raises(ValueError):
        cap.Certificate(F(1), "sideways", "c")


def test_measurement_examples():
    s = cap.MeasurementSeries.of([(k, 1) for k in (1, 2, 3)], 2)
    assert cap.homogenized_measurement(s).m == 2
    s = cap.MeasurementSeries.of([(k, k * F(5, 2)) for k in (1, 2, 3)], 0, hofer_length=F(5, 2))
    res = cap.homogenized_measurement(s)
    assert res.m == F(-5, 2) and res.m1_checked


def test_measurement_rejects_non_cauchy_series():
    s = cap.MeasurementSeries.of([(1, 1), (2, 5)], 0)
    with pytest.raises(cap.InconsistentSeries):
        cap.homogenized_measurement(s)


def test_m1_violation():
    s = cap.MeasurementSeries.of([(k, -3 * k) for k in (1, 2)], 0, hofer_length=1)
    with pytest.raises(cap.InconsistentSeries, match="M1"):
        cap.homogenized_measurement(s)


@given(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4), min_size=2, max_size=6),
       rationals, rationals)
def test_shift_identity(values, mean, s):
    series = cap.MeasurementSeries.of(list(enumerate(values, start=1)), mean, capacity_bound=3)
    assert cap.homogenized_measurement(series.shifted(s)).m == cap.homogenized_measurement(series).m == mean
