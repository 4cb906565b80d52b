import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from primepairs.dirichlet import (Character, as_integer, character_group, cyclotomic_sum, evaluate_character,
                                  nonprincipal_character_sum, psi_all_characters, psi_ap_via_characters,
                                  psi_twisted)
from primepairs.errors import UsageError
from primepairs.sieve import build_prime_table
from primepairs.sums import psi_ap


@pytest.fixture(scope="module")
def table():
    return build_prime_table(10**5)


def test_group_shapes():
    assert character_group(8).generators == [(7, 2), (5, 2)]
    assert character_group(5).generators == [(2, 4)]
    assert character_group(1).phi == 1 and character_group(2).phi == 1
    for q in range(1, 300):
        assert len(list(character_group(q))) == sum(1 for a in range(1, q + 1) if math.gcd(a, q) == 1)


@pytest.mark.parametrize("q", [2, 6, 10, 18, 50, 98])
def test_even_residues_are_not_units_when_q_is_twice_odd(q):
    g = character_group(q)
    E = g.value_exponents()
    assert np.all(E[:, ::2] == -1)
    for chi in g:
        assert chi(4) == 0


def test_exact_values():
    g = character_group(5)
    chi = Character(g, (1,))
    assert evaluate_character(chi, 2) == Fraction(1, 4)
    assert chi(2) == 1j
    assert evaluate_character(chi, 5) is None
    with pytest.raises(UsageError):
        evaluate_character(chi, 0)


def test_orthogonality_first_kind_exact():
    for q in range(1, 501):
        g = character_group(q)
        E = g.value_exponents()[:, g.units]
        sums = cyclotomic_sum(E, g.exponent)
        vals = [as_integer(v) for v in sums]
        assert vals[0] == g.phi
        assert all(v == 0 for v in vals[1:])


def _orthogonality_second_kind(q):
    g = character_group(q)
    N = g.exponent
    E = g.value_exponents()[:, g.units]
    # rows: (a, b) pairs; columns: characters; entry chi(a) conj(chi(b)) as an exponent
    D = (E.T[:, None, :] - E.T[None, :, :]) % N
    sums = cyclotomic_sum(D.reshape(-1, E.shape[0]), N)
    expected = np.zeros_like(sums)
    expected[:, 0] = np.eye(len(g.units), dtype=np.int64).ravel() * g.phi
    return np.array_equal(sums, expected)


def test_orthogonality_second_kind_exact():
    assert all(_orthogonality_second_kind(q) for q in range(1, 201))


@given(st.integers(1, 400), st.integers(1, 10**6), st.integers(1, 10**6), st.data())
@settings(max_examples=200, deadline=None)
def test_complete_multiplicativity(q, m, n, data):
    g = character_group(q)
    chi = Character(g, tuple(data.draw(st.integers(0, o - 1)) for o in g.orders))
    a, b, ab = chi.exponent(m), chi.exponent(n), chi.exponent(m * n)
    if a is None or b is None:
        assert ab is None
    else:
        assert ab == (a + b) % g.exponent


def test_nonprincipal_sum_examples():
    assert nonprincipal_character_sum(5, 2) == -1
    assert nonprincipal_character_sum(7, 1) == 5
    assert nonprincipal_character_sum(12, 5) == -1


def test_nonprincipal_sum_exact():
    for q in range(1, 201):
        g = character_group(q)
        for a in g.units:
            assert nonprincipal_character_sum(q, a) == g.phi * (a % q == 1 % q) - 1


def test_twisted_psi_mod_4(table):
    g, psis = psi_all_characters(table, 10, 4)
    # direct: odd prime powers up to 10 are 3, 5, 7, 9
    want0 = math.log(3) + math.log(5) + math.log(7) + math.log(3)
    want1 = -math.log(3) + math.log(5) - math.log(7) + math.log(3)
    assert psis[0] == pytest.approx(want0, abs=1e-14)
    assert psis[1] == pytest.approx(want1, abs=1e-14)
    assert psis.imag.tolist() == [0.0, 0.0]
    assert psi_twisted(table, 10, Character(g, (1,))).value == psis[1]


def test_decomposition_example(table):
    assert psi_ap_via_characters(10, 4, 1, table) == pytest.approx(math.log(15), abs=1e-12)


def test_decomposition_matches_direct(table):
    total = psi_ap(table, 10**5, 1, 1)
    for q in range(1, 101):
        for a in range(1, q + 1):
            if math.gcd(a, q) == 1:
                direct = psi_ap(table, 10**5, q, a)
                assert abs(psi_ap_via_characters(10**5, q, a, table) - direct) <= 1e-9 * total


def test_character_values_are_roots_of_unity():
    rng = random.Random(7)
    for q in (7, 8, 15, 16, 24, 63, 100):
        g = character_group(q)
        for chi in g:
            for n in rng.sample(range(1, 10**4), 20):
                v = chi(n)
                if math.gcd(n, q) == 1:
                    assert abs(abs(v) - 1) < 1e-15
                    assert abs(v ** g.exponent - 1) < 1e-12
                else:
                    assert v == 0


def test_modulus_validation():
    with pytest.raises(UsageError):
        character_group(0)
    with pytest.raises(UsageError):
        nonprincipal_character_sum(6, 3)
