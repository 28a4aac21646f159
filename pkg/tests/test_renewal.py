import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ruelle_kit.correlation import mu_zero
from ruelle_kit.errors import DivergenceError, DomainError
from ruelle_kit.model import Params
from ruelle_kit.renewal import (
    RenewalState,
    boundary_value,
    conservation_residual,
    limit_K,
    limit_value,
    make_state,
    mixed_recurrences,
    p_asymptotic_ratio,
    p_mass,
    p_s_mass,
    p_term,
    p_terms,
    renewal_solution,
    solve_B_s,
    solve_C_s,
    solve_renewal,
    source_arrays,
    source_terms,
    tl_trajectory,
    tl_value_for_boundary,
    to_csv,
)
from ruelle_kit.specfun import hurwitz_zeta, zeta
from ruelle_kit.transfer import JacobianPotential, apply_power_bruteforce

P = Params(3.5, 3.0)
J = JacobianPotential(P)


def test_p_first_terms():
    zz = zeta(3.5) * zeta(3.0)
    assert p_term(P, 1) == 0.0
    assert p_term(P, 2) == pytest.approx(1.0 / zz)
    assert p_term(P, 3) == pytest.approx((2.0**-3 + 2.0**-3.5) / zz)
    with pytest.raises(DomainError):
        p_term(P, 0)
    with pytest.raises(DomainError):
        p_term(P.with_beta(0.9), 3)


def test_p_forms_and_array_agree():
    arr = p_terms(P, 300)
    for q in (2, 17, 300):
        assert p_term(P, q, "displayed") == pytest.approx(p_term(P, q), rel=1e-14)
        assert arr[q] == pytest.approx(p_term(P, q), rel=1e-13)
    assert arr[0] == arr[1] == 0.0


@pytest.mark.parametrize("Q", [10, 1000, 10**5])
def test_p_mass_is_one(Q):
    head, tail = p_mass(P, Q)
    assert abs(head + tail - 1.0) < 1e-12


def test_p_tail_law():
    r = p_asymptotic_ratio(P, 10**4)
    # the single long jump dominates: p_q ~ q^-delta / zeta(delta)
    assert abs(r["tail_law"] - 1.0) < 0.02
    assert r["beta_law"] > 1e10


def test_source_terms_match_arrays():
    a, b = source_arrays(P, 50)
    for q in (1, 2, 9, 50):
        assert source_terms(P, q, "a") == pytest.approx(a[q], rel=1e-13)
        assert source_terms(P, q, "b") == pytest.approx(b[q], rel=1e-13)
    assert a[1] == pytest.approx(1.0 / zeta(3.0))
    assert b[1] == pytest.approx(1.0 - 1.0 / zeta(3.5))


def test_state_validation():
    st_ = make_state(P, 20)
    with pytest.raises(DomainError):
        RenewalState(20, st_.p[:5], st_.src, None, P)
    bad = st_.p.copy()
    bad[1] = 0.1
    with pytest.raises(DomainError):
        RenewalState(20, bad, st_.src, None, P)
    with pytest.raises(DomainError):
        make_state(P, 0)
    with pytest.raises(DomainError):
        make_state(P, 5, side="c")
    assert not st_.p.flags.writeable


@pytest.mark.parametrize("Q", [1, 7, 300, 3000])
def test_fast_solver_matches_forward(Q):
    st_ = make_state(P, Q, "b")
    slow = solve_renewal(st_)
    fast = solve_renewal(st_, fast=True)
    assert np.max(np.abs(slow - fast)) < 1e-12
    assert st_.solved().A is not None


def test_mixed_recurrences_reproduce_solution():
    sol = renewal_solution(P, 200)
    A, B = mixed_recurrences(P, 200)
    assert np.max(np.abs(A - sol.A)) < 1e-12
    assert np.max(np.abs(B[1:] - sol.B[1:])) < 1e-12


def test_conservation():
    assert conservation_residual(P, 200) < 1e-12


def test_values_are_probabilities():
    sol = renewal_solution(P, 2000)
    for arr in (sol.A[1:], sol.B):
        assert np.all(arr >= 0) and np.all(arr <= 1)
    assert sol.B_value(0) == 1.0


def test_limit_closed_forms():
    k = limit_K(P, 10**4)
    assert k.numerator_gap < 1e-10
    assert abs(k.sum_b_direct - k.numerator) < 1e-10
    assert k.M_direct == pytest.approx(k.M, rel=1e-10)
    assert k.M == pytest.approx(zeta(2.5) / zeta(3.5) + zeta(2.0) / zeta(3.0), rel=1e-14)


def test_limit_equals_invariant_mass_of_zero():
    assert limit_K(P, 10**3).K == pytest.approx(mu_zero(P), rel=1e-13)


def test_limit_diverges_when_an_exponent_is_at_most_two():
    with pytest.raises(DivergenceError):
        limit_K(Params(2.5, 1.8), 100)
    # only the smaller exponent matters
    assert math.isfinite(limit_K(Params(2.1, 2.05), 100).M)


def test_convergence_to_limit():
    sol = renewal_solution(P, 10**4)
    K = limit_K(P, 10**4).K
    gaps = [abs(sol.A[q] - K) for q in (10**2, 10**3, 10**4)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert abs(sol.B[10**4] - K) < 1e-3


@settings(max_examples=20, deadline=None)
@given(s=st.integers(1, 6), q=st.integers(1, 11), symbol=st.integers(0, 1))
def test_boundary_value_matches_oracle(s, q, symbol):
    c, cbar = str(symbol), str(1 - symbol)
    y = c * s + cbar + "(" + c + ")*"
    assert boundary_value(P, symbol, s, q) == pytest.approx(
        apply_power_bruteforce(J, "0", y, q), abs=1e-12)


def test_long_run_arrays():
    sol = renewal_solution(P, 14)
    b3 = solve_B_s(P, 3, 14, sol)
    c4 = solve_C_s(P, 4, 14, sol)
    for q in range(1, 15):
        assert b3[q] == pytest.approx(apply_power_bruteforce(J, "0", "0001(0)*", q), abs=1e-10)
        assert c4[q] == pytest.approx(apply_power_bruteforce(J, "0", "11110(1)*", q), abs=1e-10)
    assert np.array_equal(solve_B_s(P, 1, 14, sol), sol.B)
    assert np.array_equal(solve_C_s(P, 1, 14, sol), sol.A)
    head, tail = p_s_mass(P, 3, 10**4)
    assert head + tail == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DomainError):
        solve_B_s(P, 0, 5)


def test_fixed_point_boundaries_exact_at_every_q():
    t0 = tl_trajectory(P, "0*", 20)
    t1 = tl_trajectory(P, "1*", 20)
    assert np.all(t0 == 1.0) and np.all(t1 == 0.0)
    assert tl_value_for_boundary(P, "0*") == 1.0
    assert tl_value_for_boundary(P, "1*") == 0.0
    assert tl_value_for_boundary(P, "1*", cyl="1") == 1.0


def test_other_periodic_boundaries_reach_K():
    K = limit_value(P)
    assert K == limit_K(P, 10**3).K
    for y in ("(011)*", "(01)*", "110(0001)*"):
        assert tl_value_for_boundary(P, y) == K
    # only the periodic tail matters
    assert tl_value_for_boundary(P, "0001*") == 0.0
    assert tl_value_for_boundary(P, "1110*") == 1.0
    assert tl_value_for_boundary(P, "(01)*", q=12) == pytest.approx(
        apply_power_bruteforce(J, "0", "(01)*", 12), abs=1e-12)
    with pytest.raises(DomainError):
        tl_value_for_boundary(P, "0101")
    with pytest.raises(DomainError):
        tl_value_for_boundary(P, "(01)*", cyl="01")


def test_csv_export():
    sol = renewal_solution(P, 25)
    lines = to_csv(sol).splitlines()
    assert lines[0] == "q,p_q,a_q,b_q,A_q,B_q"
    assert len(lines) == 26
    first = lines[1].split(",")
    assert first[0] == "1" and float(first[1]) == 0.0
    assert float(first[4]) == pytest.approx(sol.A[1], rel=1e-14)


def test_hurwitz_sum_identity_for_numerator():
    # sum_{j>=1} zeta(gamma, j) = zeta(gamma - 1)
    head = math.fsum(hurwitz_zeta(3.5, x) for x in range(1, 51))
    rest = hurwitz_zeta(2.5, 51) - 50 * hurwitz_zeta(3.5, 51)
    assert head + rest == pytest.approx(zeta(2.5), rel=1e-13)
