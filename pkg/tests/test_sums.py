import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from primepairs.errors import ParityWarning, RangeError, UsageError
from primepairs.sieve import APClass, build_prime_table
from primepairs.sums import (LinearForm, chebyshev_tail, hl_partial_sum, hl_partial_trace, inversion_decomposition,
                             inversion_profile, lambda_pair_sum, lambda_pair_trace, mertens_ap, pair_count,
                             pair_count_trace, pair_weighted_sum, pair_weighted_trace, pi_ap, prime_power_pair_sum,
                             psi_ap, psi_class_table, twisted_mobius_sum, vonmangoldt_dirichlet_trace)
from primepairs.asymptotic import zeta_and_deriv

L = math.log
TWIN = LinearForm(1, 2)


@pytest.fixture(scope="module")
def table():
    return build_prime_table(10**6 + 100)


def test_form_validation():
    with pytest.raises(UsageError):
        LinearForm(2, 4)
    with pytest.raises(UsageError):
        LinearForm(1, 0)
    with pytest.raises(UsageError):
        LinearForm(0, 1)
    assert LinearForm(1, 2).parity_admissible
    assert not LinearForm(1, 1).parity_admissible
    assert LinearForm(2, -1)(5) == 9


def test_mertens_examples(table):
    r = mertens_ap(table, 20, APClass(1, 4))
    assert r.value == pytest.approx(1 / 5 + 1 / 13 + 1 / 17, abs=1e-15)
    assert r.main == pytest.approx(L(L(20)) / 2 + 1 / 5, abs=1e-15)
    assert r.residual == pytest.approx(r.value - r.main, abs=1e-15)
    lp = mertens_ap(table, 20, APClass(1, 4), "log_over_p").value
    assert lp == pytest.approx(L(5) / 5 + L(13) / 13 + L(17) / 17, abs=1e-15)
    assert lp == pytest.approx(0.6858509877, abs=1e-10)
    assert mertens_ap(table, 2, APClass(1, 3)).value == 0
    with pytest.raises(UsageError):
        mertens_ap(table, 20, APClass(1, 4), "bogus")


def test_pair_weighted_examples(table):
    assert pair_weighted_sum(table, 10, TWIN) == pytest.approx(L(2) / 2 + L(5) / 3 + L(7) / 5 + L(3) / 7, abs=1e-15)
    assert pair_weighted_sum(table, 10, TWIN) == pytest.approx(1.429180, abs=5e-7)
    assert pair_weighted_sum(table, 2, TWIN) == pytest.approx(L(2) / 2, abs=1e-16)
    with pytest.warns(ParityWarning):
        v = pair_weighted_sum(table, 10, LinearForm(1, 1))
    assert v == pytest.approx(L(3) / 2 + L(2) / 3 + L(2) / 7, abs=1e-15)


def test_no_warning_for_admissible_form(table):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        pair_weighted_sum(table, 100, TWIN)


@given(st.integers(2, 3000), st.integers(1, 5), st.integers(-7, 30))
@settings(max_examples=80, deadline=None)
def test_pair_weighted_brute_force(x, m, k):
    if k == 0 or math.gcd(m, k) != 1 or m * 2 + k < 1:
        return
    table = build_prime_table(m * x + abs(k) + 10)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ParityWarning)
        got = pair_weighted_sum(table, x, LinearForm(m, k))
    want = math.fsum(oracles.lam(m * p + k) / p for p in range(2, x + 1)
                     if oracles.is_prime(p) and m * p + k >= 1)
    assert got == pytest.approx(want, rel=1e-13, abs=1e-15)


def test_inversion_examples(table):
    assert inversion_decomposition(table, 10, TWIN).value == pytest.approx(pair_weighted_sum(table, 10, TWIN), abs=1e-15)
    r = inversion_decomposition(table, 10, TWIN, restricted=True)
    assert r.value == pytest.approx(1.429180 - L(2) / 2, abs=5e-7)
    assert r.value == pytest.approx(1.0826059466, abs=1e-10)
    assert 2 not in r.ledger
    assert inversion_decomposition(table, 3, TWIN).value == pytest.approx(L(2) / 2 + L(5) / 3, abs=1e-15)


def test_inversion_ledger_entries(table):
    r = inversion_decomposition(table, 10, TWIN)
    # d = 5 divides p + 2 for p = 3 only
    assert r.ledger[5] == pytest.approx(1 / 3)
    assert r.ledger[1] == pytest.approx(1 / 2 + 1 / 3 + 1 / 5 + 1 / 7)
    assert r.contribution(5) == pytest.approx(L(5) / 3)


@pytest.mark.parametrize("k", [2, 4, 6, 8, 10])
def test_inversion_literal_matches_profile(table, k):
    f = LinearForm(1, k)
    ps, direct, inv = inversion_profile(table, 3000, f)
    for x in (2, 3, 17, 211, 1009, 3000):
        i = int(np.searchsorted(ps, x, side="right")) - 1
        lit = inversion_decomposition(table, x, f).value
        assert lit == pytest.approx(inv[i], rel=1e-12, abs=1e-12)
        assert abs(lit - direct[i]) <= 1e-9 * max(abs(direct[i]), 1.0)


@pytest.mark.parametrize("k", [2, 6, 10, 30])
def test_restricted_difference_supported_on_primes_dividing_k(table, k):
    f = LinearForm(1, k)
    kp = [p for p in range(2, k + 1) if k % p == 0 and oracles.is_prime(p)]
    _, d1, i1 = inversion_profile(table, 5000, f, restricted=True)
    assert np.max(np.abs(d1 - i1)) > 1e-3   # the side condition really changes the value
    _, d2, i2 = inversion_profile(table, 5000, f, restricted=True, exclude=kp)
    assert np.max(np.abs(d2 - i2) / np.maximum(np.abs(d2), 1)) <= 1e-9


def test_prime_power_pair_examples(table):
    want = L(2) / 2 + L(3) / 7 + L(5) / 23 + L(7) / 47 + L(3) / 79
    assert prime_power_pair_sum(table, 100, TWIN) == pytest.approx(want, abs=1e-15)
    assert prime_power_pair_sum(table, 100, TWIN) == pytest.approx(0.628803, abs=5e-7)
    # Q = p + 2 <= 100 with p prime: 4, 9, 25, 49, 81
    assert prime_power_pair_sum(table, 100, TWIN, "unweighted") == pytest.approx(
        L(2) + L(3) + L(5) + L(7) + L(3), abs=1e-14)
    assert prime_power_pair_sum(table, 3, TWIN) == pytest.approx(L(2) / 2, abs=1e-16)
    assert prime_power_pair_sum(table, 100, TWIN, tail_from=10) == pytest.approx(L(5) / 23 + L(7) / 47 + L(3) / 79)


def test_psi_pi_examples(table):
    assert psi_ap(table, 10, 4, 1) == pytest.approx(L(15), abs=1e-15)
    assert pi_ap(table, 10, 4, 1) == 1
    assert psi_ap(table, 1, 3, 1) == 0
    with pytest.raises(UsageError):
        psi_ap(table, 10, 4, 2)


def test_psi_class_table(table):
    S = psi_class_table(table, [10, 100], 4)
    assert S[0, 1] == pytest.approx(L(15))
    assert S[1, 3] == pytest.approx(psi_ap(table, 100, 4, 3))


def test_lambda_pair_examples(table):
    assert lambda_pair_sum(table, 20, TWIN) == pytest.approx(L(2) + L(5) + L(7) + L(3) + L(13) + L(19), abs=1e-14)
    assert lambda_pair_sum(table, 20, TWIN) == pytest.approx(10.856495, abs=1e-6)
    assert lambda_pair_sum(table, 2, TWIN) == pytest.approx(L(2), abs=1e-16)


def test_pair_count_examples(table):
    assert pair_count(table, 100, TWIN) == 8
    assert pair_count(table, 10**6, TWIN) == 8169
    assert pair_count(table, 4, TWIN) == 0
    assert pair_count(table, 5, TWIN) == 1


def test_pair_count_trial_division():
    table = build_prime_table(10**5 + 10)
    grid = [10, 1000, 54321, 10**5]
    tr = pair_count_trace(table, grid, TWIN)
    for x, c in zip(grid, tr.values):
        assert c == sum(1 for p in range(2, x - 1) if oracles.is_prime(p) and oracles.is_prime(p + 2))


def test_hl_examples(table):
    want = math.fsum([L(2) * L(2) / 2, L(3) * L(5) / 3, L(5) * L(7) / 5, L(7) * L(3) / 7, L(3) * L(11) / 9,
                      L(11) * L(13) / 11, L(17) * L(19) / 17])
    assert hl_partial_sum(table, 20, TWIN) == pytest.approx(want, abs=1e-14)
    assert hl_partial_sum(table, 20, TWIN) == pytest.approx(3.1039336358, abs=1e-10)
    assert hl_partial_sum(table, 1, TWIN) == 0
    want2 = math.fsum([L(2) * L(2) / 4, L(3) * L(5) / 9, L(5) * L(7) / 25, L(7) * L(3) / 49, L(3) * L(11) / 81])
    assert hl_partial_sum(table, 10, TWIN, 2) == pytest.approx(want2, abs=1e-15)
    with pytest.raises(UsageError):
        hl_partial_sum(table, 10, TWIN, 1 + 1j)
    with pytest.raises(UsageError):
        hl_partial_sum(table, 10, TWIN, 0.5)


def test_chebyshev_tail(table):
    r = chebyshev_tail(table, 10, 100, TWIN)
    assert r.total == pytest.approx(pair_weighted_sum(table, 100, TWIN) - pair_weighted_sum(table, 10, TWIN), abs=1e-14)
    # prime powers p + 2 with 10 < p <= 100: 25, 49, 81
    assert r.power_part == pytest.approx(L(5) / 23 + L(7) / 47 + L(3) / 79, abs=1e-15)
    assert r.pair_part + r.power_part == pytest.approx(r.total, abs=1e-15)
    assert chebyshev_tail(table, 50, 50, TWIN).total == 0
    with pytest.raises(UsageError):
        chebyshev_tail(table, 60, 50, TWIN)


def test_twisted_mobius(table):
    assert twisted_mobius_sum(10).value == pytest.approx(
        math.fsum(oracles.mu(n) * L(n) / n for n in range(1, 11)), abs=1e-15)
    assert twisted_mobius_sum(10).value == pytest.approx(-0.783767, abs=1e-6)
    r = twisted_mobius_sum(1000, 2.0)
    z, dz = zeta_and_deriv(2.0)
    assert r.target == pytest.approx(dz / z**2)
    assert twisted_mobius_sum(1000, 1.0).target == -1.0
    assert twisted_mobius_sum(1000, 1.0, 2).target is None
    with pytest.raises(UsageError):
        twisted_mobius_sum(10, 0.25)
    with pytest.raises(UsageError):
        twisted_mobius_sum(10, 1j)


@pytest.mark.parametrize("s,lp", [(1.0, 1), (0.5, 1), (1.0, 2), (3.0, 2)])
def test_twisted_mobius_conditions_brute_force(s, lp):
    x = 3000
    base = lambda pred: math.fsum(oracles.mu(n) * L(n) ** lp / n**s for n in range(1, x + 1) if pred(n))
    assert twisted_mobius_sum(x, s, lp).value == pytest.approx(base(lambda n: True), rel=1e-12, abs=1e-12)
    assert twisted_mobius_sum(x, s, lp, coprime_to=6).value == pytest.approx(
        base(lambda n: math.gcd(n, 6) == 1), rel=1e-12, abs=1e-12)
    assert twisted_mobius_sum(x, s, lp, residue=APClass(3, 4)).value == pytest.approx(
        base(lambda n: n % 4 == 3), rel=1e-12, abs=1e-12)


def test_monotone_in_x(table):
    grid = [10, 100, 1000, 10**4, 10**5, 10**6]
    for tr in (pair_weighted_trace(table, grid, TWIN), lambda_pair_trace(table, grid, TWIN),
               pair_count_trace(table, grid, TWIN)):
        assert np.all(np.diff(tr.values) >= 0)


@pytest.mark.parametrize("sigma", [1.5, 2.0, 3.0])
def test_vonmangoldt_series_bounded_by_limit(table, sigma):
    tr = vonmangoldt_dirichlet_trace(table, [10, 10**3, 10**5, 10**6], sigma)
    assert all(c.value <= c.main for c in tr.checkpoints)


def test_range_errors(table):
    with pytest.raises(RangeError):
        pair_weighted_sum(table, table.limit, TWIN)
    with pytest.raises(RangeError):
        psi_ap(table, table.limit + 1, 3, 1)


def test_trace_values_match_scalar(table):
    grid = [100, 1000, 10**4]
    tr = hl_partial_trace(table, grid, TWIN)
    for x, v in zip(grid, tr.values):
        assert v == hl_partial_sum(table, x, TWIN)
