import math

import mpmath
import numpy as np
import pytest

from primepairs.asymptotic import (fit, log_integral, montgomery_track, sign_changes, singular_series,
                                   singular_series_tail_bound, zeta_and_deriv)
from primepairs.errors import ParityWarning, UsageError
from primepairs.sieve import build_prime_table
from primepairs.sums import LinearForm
from primepairs.trace import Checkpoint, SumTrace, geometric_grid

TWIN_CONSTANT = 1.3203236316937391  # 2 * prod_{p>2} (1 - 1/(p-1)^2), published to 16 digits


@pytest.mark.parametrize("x,want", [(2, 1.04516378011749), (10, 6.16559950478730)])
def test_li_values(x, want):
    assert log_integral(x) == pytest.approx(want, abs=1e-13)


@pytest.mark.parametrize("x", [2.5, 100.0, 1e6, 1e12])
def test_li_derivative(x):
    h = x * 1e-6
    d = (log_integral(x + h) - log_integral(x - h)) / (2 * h)
    assert d == pytest.approx(1 / math.log(x), rel=1e-7)


def test_li_domain():
    with pytest.raises(UsageError):
        log_integral(1.5)


@pytest.mark.parametrize("s", [1.05, 1.5, 2.0, 3.0, 7.5, 20.0])
def test_zeta_against_mpmath(s):
    z, dz = zeta_and_deriv(s)
    mpmath.mp.dps = 30
    assert z == pytest.approx(float(mpmath.zeta(s)), rel=1e-14)
    assert dz == pytest.approx(float(mpmath.zeta(s, derivative=1)), rel=1e-13)


def test_zeta_direct_series():
    z, dz = zeta_and_deriv(4.0)
    assert z == pytest.approx(math.pi**4 / 90, rel=1e-15)
    n = np.arange(1, 200001, dtype=np.float64)
    assert dz == pytest.approx(-math.fsum(np.log(n) / n**4), rel=1e-12)


def test_zeta_domain():
    with pytest.raises(UsageError):
        zeta_and_deriv(1.0)


def test_singular_series_values():
    cutoff = 10**6
    bound = singular_series_tail_bound(cutoff)
    for form, want in [((1, 2), TWIN_CONSTANT), ((1, 4), TWIN_CONSTANT), ((1, 6), 2 * TWIN_CONSTANT),
                       ((1, 30), TWIN_CONSTANT * 2 / 1 * 4 / 3)]:
        s = singular_series(LinearForm(*form), cutoff)
        # odd p | k contributes (p - 1)/(p - 2) relative to the twin constant
        assert want <= s <= want / (1 - bound) * (1 + 1e-13)


def test_singular_series_parity():
    with pytest.warns(ParityWarning):
        assert singular_series(LinearForm(1, 1)) == 0.0


def test_singular_series_monotone_in_cutoff():
    vals = [singular_series(LinearForm(1, 2), c) for c in (10**3, 10**4, 10**5, 10**6)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))
    for c, v in zip((10**3, 10**4, 10**5, 10**6), vals):
        assert v - vals[-1] <= v * singular_series_tail_bound(c)


def _synthetic(model, c, b, xs):
    f = {"loglog": lambda x: math.log(math.log(x)), "x_log2": lambda x: x / math.log(x) ** 2,
         "li": log_integral}[model]
    return SumTrace([Checkpoint(x, c * f(x) + b) for x in xs])


@pytest.mark.parametrize("model", ["loglog", "x_log2", "li"])
def test_fit_recovers_synthetic(model):
    xs = geometric_grid(1e3, 1e8, 10**0.25)
    r = fit(_synthetic(model, 1.3203, -0.25, xs), model)
    assert r.c == pytest.approx(1.3203, rel=1e-9)
    assert r.b == pytest.approx(-0.25, abs=1e-9 * max(1, abs(r.predict([1e8])[0])))
    assert r.n_points == len(xs)


def test_fit_window_and_errors():
    xs = geometric_grid(1e3, 1e8, 10)
    tr = _synthetic("loglog", 2.0, 1.0, xs)
    assert fit(tr, "loglog", (1e4, 1e7)).window == (1e4, 1e7)
    with pytest.raises(UsageError):
        fit(tr, "loglog", (1e6, 1e7))
    with pytest.raises(UsageError):
        fit(tr, "cubic")


def test_sign_changes():
    tr = SumTrace([Checkpoint(x, v) for x, v in [(1, 1.0), (2, -1.0), (3, 0.0), (4, 2.0), (5, -3.0)]])
    assert sign_changes(tr) == [(1, 2), (4, 5)]


def test_montgomery_example():
    table = build_prime_table(1000)
    t = montgomery_track(table, [10, 100], [3])
    row = next(r for r in t.rows if (r.x, r.q, r.a) == (10, 3, 1))
    # 1 mod 3 prime powers up to 10: 4, 7
    assert row.psi == pytest.approx(math.log(2) + math.log(7))
    assert row.normalized == pytest.approx((math.log(14) - 5) * math.sqrt(3 / 10))
    assert row.normalized == pytest.approx(-1.293141557546, abs=1e-12)
    assert len(t.rows) == 4
    assert set(t.summary()) == {3}
    with pytest.raises(UsageError):
        montgomery_track(table, [10], [4], lambda q: [2])
