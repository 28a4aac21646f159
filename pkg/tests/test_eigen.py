import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ruelle_kit.eigen import (
    INFINITE,
    EigenSystem,
    MeasureTable,
    NotNormalizableWarning,
    all_words,
    b_scale,
    build_measure_table,
    eigen_residual,
    eigenfunction_value,
    eigenmeasure_discrepancy,
    jacobian_array,
    jacobian_value,
    mu_cylinder,
    nu_cylinder,
    r_seq,
    selection_ratio,
)
from ruelle_kit.errors import DivergenceError, DomainError, MassLookupError
from ruelle_kit.model import Params
from ruelle_kit.specfun import hurwitz_zeta, zeta

P = Params(3.5, 3.0)
SYM = Params(3.0, 3.0)

words = st.text(alphabet="01", min_size=1, max_size=9)


def test_all_words_counts():
    assert len(all_words(3)) == 2 + 4 + 8
    assert all_words(2) == ["0", "1", "00", "01", "10", "11"]
    assert len(all_words(3, min_depth=3)) == 8


def test_r_seq_matches_direct_sum():
    lam, q, s = 1.5, 3, 3.5 * 0.8
    n = np.arange(2, 400, dtype=float)
    direct = 1.0 + q**s * math.fsum((n + q - 1) ** (-s) * lam ** (-(n - 1)))
    assert r_seq(3.5, 0.8, lam, q) == pytest.approx(direct, rel=1e-13)


def test_r_seq_at_criticality_is_hurwitz():
    for q in (1, 2, 7, 50):
        assert r_seq(3.5, 1.0, 1.0, q) == pytest.approx(q**3.5 * hurwitz_zeta(3.5, q), rel=1e-14)


def test_r_seq_diverges_below_one():
    with pytest.raises(DivergenceError):
        r_seq(1.5, 0.5, 1.0, 3)
    with pytest.raises(DomainError):
        r_seq(3.0, 1.0, 0.9, 3)


def test_eigenfunction_values():
    es = EigenSystem(P.with_beta(0.8))
    assert es.phi("0*") == 1.0
    assert es.phi("1*") == pytest.approx(es.b)
    assert es.phi("0001*") == pytest.approx(es.run_series(0, 3))
    assert eigenfunction_value(P, None, "0*") is INFINITE
    assert eigenfunction_value(P, None, "001*") == pytest.approx(2**3.5 * hurwitz_zeta(3.5, 2))
    assert b_scale(P) == pytest.approx(1.0)


def test_nu_normalization_and_ten_mass():
    es = EigenSystem(P)
    assert es.nu("01") == pytest.approx(1.0)
    assert es.nu("10") == pytest.approx(zeta(3.5) / zeta(3.0))
    assert nu_cylinder(P, None, "01") == pytest.approx(1.0)


@pytest.mark.parametrize("p", [SYM, P, P.with_beta(0.7), Params(1.8, 1.3, 0.9)])
def test_eigen_residual_depth_six(p):
    es = EigenSystem(p)
    assert max(eigen_residual(es, w) for w in all_words(6)) < 1e-12


def test_eigen_residual_symmetric_depth_eight():
    es = EigenSystem(SYM)
    assert max(eigen_residual(es, w) for w in all_words(8)) < 1e-10


@settings(max_examples=40, deadline=None)
@given(w=words)
def test_invariant_measure_shift_invariant(w):
    es = EigenSystem(P)
    lhs = es.mu_mass(w)
    assert lhs == pytest.approx(es.mu_mass("0" + w) + es.mu_mass("1" + w), rel=1e-13)


@settings(max_examples=40, deadline=None)
@given(w=words)
def test_eigenmeasure_additive(w):
    es = EigenSystem(Params(3.5, 3.0, 0.7))
    assert es.nu(w) == pytest.approx(es.nu(w + "0") + es.nu(w + "1"), rel=1e-12)


def test_measure_table_normalized_and_roundtrip():
    tab = build_measure_table(P, 5)
    assert tab.normalized
    assert tab.mass("0") + tab.mass("1") == pytest.approx(1.0, abs=1e-14)
    assert tab.additivity_residual() < 1e-12
    back = MeasureTable.from_json(tab.to_json())
    assert back.entries == tab.entries
    with pytest.raises(MassLookupError):
        tab.mass("010101")


def test_zero_cylinder_mass_at_criticality():
    z = zeta(2.5) + zeta(3.5) * zeta(2.0) / zeta(3.0)
    expected = zeta(2.5) / z
    assert build_measure_table(P, 1).mass("0") == pytest.approx(expected, rel=1e-13)
    assert expected == pytest.approx(0.4652535210920315, rel=1e-13)


def test_not_normalizable_warns():
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        v = mu_cylinder(Params(1.9, 1.5), "0")
    assert math.isinf(v)
    assert any(issubclass(r.category, NotNormalizableWarning) for r in rec)


def test_jacobian_closed_forms():
    g, d = P.gamma, P.delta
    assert jacobian_value(P, "0001*") == pytest.approx(hurwitz_zeta(g, 3) / hurwitz_zeta(g, 2))
    assert jacobian_value(P, "0111(0)*") == pytest.approx(3.0**-d / hurwitz_zeta(d, 3))
    assert jacobian_value(P, "1001*") == pytest.approx(2.0**-g / hurwitz_zeta(g, 2))
    assert jacobian_value(P, "0*") == 1.0
    assert jacobian_value(P, "01*") == 0.0
    assert jacobian_value(P, "010*") == pytest.approx(1.0 / zeta(d))
    with pytest.raises(DomainError):
        jacobian_value(P.with_beta(0.9), "0*")


def test_jacobian_array_matches_scalar():
    cases = [(0, 3, 1), (1, 1, 4), (0, 1, 2), (1, 5, 2)]
    arr = jacobian_array(P, np.array([c[0] for c in cases]), np.array([c[1] for c in cases]),
                         np.array([c[2] for c in cases]))
    lits = ["0001(0)*", "10000(1)*", "0110(1)*", "111110(0)*"]
    for v, lit in zip(arr, lits):
        assert v == pytest.approx(jacobian_value(P, lit), rel=1e-14)


def test_jacobian_normalization_grid():
    rng = np.random.default_rng(0)
    r1 = rng.integers(1, 10**4, 5000)
    r2 = rng.integers(1, 10**4, 5000)
    worst = 0.0
    for sym in (0, 1):
        same = jacobian_array(P, np.full(r1.shape, sym), r1 + 1, r2)
        other = jacobian_array(P, np.full(r1.shape, 1 - sym), np.ones_like(r1), r1)
        worst = max(worst, float(np.abs(same + other - 1).max()))
    assert worst < 1e-10


def test_eigenmeasure_discrepancy():
    asym = eigenmeasure_discrepancy(P)
    assert asym["abs_diff_nu0"] == pytest.approx(0.0429, abs=1e-4)
    assert asym["abs_diff_nu1"] == pytest.approx(0.0484, abs=1e-4)
    sym = eigenmeasure_discrepancy(SYM)
    assert sym["abs_diff_nu0"] < 1e-12 and sym["abs_diff_nu1"] < 1e-12


def test_selection_ratio_domain_and_symmetry():
    with pytest.raises(DomainError):
        selection_ratio(P.with_beta(0.9), 10)
    with pytest.raises(DomainError):
        selection_ratio(Params(1.8, 1.3), 10)
    assert selection_ratio(Params(1.5, 1.5, 0.9), 10) == 1.0
    assert selection_ratio(Params(1.8, 1.3, 0.99), 10) > 1.0
