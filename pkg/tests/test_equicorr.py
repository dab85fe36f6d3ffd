import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import verspace as vs
from verspace.equicorr import EquicorrModel


# ---------------------------------------------------------------------------
# normal CDF / quantile


def test_cdf_symmetry():
    assert vs.std_normal_cdf(0.0) == 0.5
    assert vs.std_normal_cdf(-1.0) + vs.std_normal_cdf(1.0) == pytest.approx(1.0, abs=1e-15)


def test_quantile_inverse_pair():
    # round-tripping through the CDF value loses tail information near p = 1:
    # spacing(1.0)/pdf(6) ~ 1.8e-8 caps what any double implementation can do,
    # so the 1e-9 check stops at 5.5 and the far right tail gets 2e-8
    for x in np.linspace(-6.0, 5.5, 24):
        assert vs.std_normal_quantile(vs.std_normal_cdf(x)) == pytest.approx(x, abs=1e-9)
    for x in (5.75, 6.0):
        assert vs.std_normal_quantile(vs.std_normal_cdf(x)) == pytest.approx(x, abs=2e-8)


def test_quantile_domain():
    for p in (0.0, 1.0, -0.1, 1.1):
        with pytest.raises(ValueError):
            vs.std_normal_quantile(p)


# ---------------------------------------------------------------------------
# model type


def test_model_derived_quantities():
    m = EquicorrModel(n=10, rho=0.5)
    assert m.a == pytest.approx(1.0)
    assert m.gamma_shape == pytest.approx(1.0)
    m = EquicorrModel(n=10, rho=0.8)
    assert m.a == pytest.approx(2.0)
    assert m.gamma_shape == pytest.approx(0.25)
    assert m.gamma_shape == pytest.approx(1.0 / m.a**2)
    for rho in (0.0, 1.0, -0.2, 1.3):
        with pytest.raises(ValueError):
            EquicorrModel(n=10, rho=rho)


# ---------------------------------------------------------------------------
# orthant probability


def test_orthant_single_halfspace():
    for rho in (0.1, 0.5, 0.9):
        assert vs.orthant_quadrature(EquicorrModel(n=1, rho=rho)) == pytest.approx(0.5, rel=1e-10)


def test_orthant_uniform_moment_identity():
    # at rho = 1/2 the integrand power is uniform on (0,1): E[U^n] = 1/(n+1)
    for n in (1, 3, 10, 100):
        q = vs.orthant_quadrature(EquicorrModel(n=n, rho=0.5))
        assert q * (n + 1) == pytest.approx(1.0, abs=1e-9)


def test_orthant_bivariate_closed_form():
    for rho in (0.1, 0.3, 0.8, 0.95):
        expected = 0.25 + np.arcsin(rho) / (2.0 * np.pi)
        assert vs.orthant_quadrature(EquicorrModel(n=2, rho=rho)) == pytest.approx(
            expected, rel=1e-9
        )


def test_orthant_asymptotic_reduces_to_reciprocal():
    # shape 1: Gamma(1) = 1 and the log factor has exponent 0
    for n in (2, 10, 1000, 10**5):
        assert vs.orthant_asymptotic(EquicorrModel(n=n, rho=0.5)) == pytest.approx(
            1.0 / n, rel=1e-12
        )


def test_orthant_asymptotic_vs_quadrature_at_half():
    q = vs.orthant_quadrature(EquicorrModel(n=1000, rho=0.5))
    asym = vs.orthant_asymptotic(EquicorrModel(n=1000, rho=0.5))
    assert asym == pytest.approx(0.001, rel=1e-12)
    assert q == pytest.approx(1.0 / 1001.0, rel=1e-9)
    assert asym / q == pytest.approx(1.001, rel=1e-9)


def test_orthant_ratio_trends_to_one():
    for rho in (0.3, 0.5, 0.8):
        devs = []
        for n in (100, 1000, 10**4, 10**5):
            m = EquicorrModel(n=n, rho=rho)
            devs.append(abs(vs.orthant_asymptotic(m) / vs.orthant_quadrature(m) - 1.0))
        assert all(b < a for a, b in zip(devs, devs[1:]))


def test_orthant_ratio_within_ten_percent_for_moderate_shapes():
    # slow log-factor corrections keep rho = 0.3 outside this band even at
    # n = 1e5; the faster-converging shapes are in it
    for rho in (0.5, 0.8):
        m = EquicorrModel(n=10**5, rho=rho)
        assert 0.9 <= vs.orthant_asymptotic(m) / vs.orthant_quadrature(m) <= 1.1


# ---------------------------------------------------------------------------
# next-point correctness (ratio of consecutive orthants)


def test_next_point_plug_in():
    assert vs.next_point_correct_asymptotic(EquicorrModel(n=100, rho=0.5)) == pytest.approx(0.99)
    assert vs.next_point_correct_asymptotic(EquicorrModel(n=50, rho=0.999)) == pytest.approx(
        1.0, abs=1e-4
    )


def test_next_point_matches_quadrature_ratio():
    # exact ratio at rho = 1/2 is (n+1)/(n+2)
    for n in (100, 1000):
        q_ratio = vs.orthant_quadrature(EquicorrModel(n=n + 1, rho=0.5)) / vs.orthant_quadrature(
            EquicorrModel(n=n, rho=0.5)
        )
        assert q_ratio == pytest.approx((n + 1) / (n + 2), rel=1e-9)
        formula = vs.next_point_correct_asymptotic(EquicorrModel(n=n, rho=0.5))
        assert abs(q_ratio - formula) <= 2.0 / n**2


# ---------------------------------------------------------------------------
# limiting CDF and critical value


def test_limit_cdf_exponential_special_case():
    m = EquicorrModel(n=200, rho=0.5)
    for eps in (0.0, 0.001, 0.01, 0.1):
        assert vs.limit_cdf(m, eps) == pytest.approx(1.0 - np.exp(-200 * eps), abs=1e-12)
    assert vs.limit_cdf(m, 0.0) == 0.0
    assert vs.limit_cdf(m, np.log(2) / 200) == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(ValueError):
        vs.limit_cdf(m, -0.1)


def test_critical_value():
    assert vs.critical_value(EquicorrModel(n=100, rho=0.5)) == pytest.approx(0.01)
    assert vs.critical_value(EquicorrModel(n=100, rho=0.999)) == pytest.approx(0.0, abs=1e-4)


def test_critical_value_separates_limit_cdf():
    # fixed absolute offset c: below the critical value the limiting CDF is
    # exactly zero once n*c exceeds the Gamma shape; above it, it tends to 1
    rho, c = 0.5, 0.002
    below = []
    above = []
    for n in (100, 1000, 10**4):
        m = EquicorrModel(n=n, rho=rho)
        eps_star = vs.critical_value(m)
        below.append(vs.limit_cdf(m, max(eps_star - c, 0.0)))
        above.append(vs.limit_cdf(m, eps_star + c))
    assert all(b < a for a, b in zip(above, above[1:])) or above[-1] > 0.99
    assert above[-1] > 0.99
    # n*c > shape for n >= 1000 here, so the mass below vanishes exactly
    assert below[1] == 0.0 and below[2] == 0.0


def test_exact_half_correlation_cdf_approaches_limit():
    n = 200
    eps = np.linspace(0.0, 1.0, 2001)
    exact = vs.exact_cdf_half_correlation(n, eps)
    lim = np.array([vs.limit_cdf(EquicorrModel(n=n, rho=0.5), e) for e in eps])
    assert np.abs(exact - lim).max() <= 1.0 / n
    # finite-n law at eps* - c decreases to zero as n approaches 1/c
    c = 0.005
    vals = [
        float(vs.exact_cdf_half_correlation(n, max(1.0 / n - c, 0.0)))
        for n in (50, 100, 150, 199)
    ]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 0.01


# ---------------------------------------------------------------------------
# Monte Carlo oracle


def test_simulate_unconditioned_is_uniform():
    grid = np.linspace(0.0, 1.0, 101)
    cdf = vs.simulate_equicorr_rn(EquicorrModel(n=0, rho=0.5), 10**5, grid, np.random.default_rng(0))
    assert np.abs(cdf.cdf - grid).max() < 0.01


def test_simulate_matches_limit_cdf():
    grid = vs.default_grid()
    m = EquicorrModel(n=200, rho=0.5)
    sim = vs.simulate_equicorr_rn(m, 10**5, grid, np.random.default_rng(42))
    lim = np.array([vs.limit_cdf(m, e) for e in grid])
    assert np.abs(sim.cdf - lim).max() <= 0.05
    assert (np.diff(sim.cdf) >= 0.0).all()
    assert sim.cdf[0] >= 0.0 and sim.cdf[-1] <= 1.0


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_simulate_cdf_invariants(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(0, 300))
    rho = float(rng.uniform(0.2, 0.9))
    grid = np.linspace(0.0, 1.0, 64)
    cdf = vs.simulate_equicorr_rn(EquicorrModel(n=n, rho=rho), 2000, grid, rng)
    assert (np.diff(cdf.cdf) >= 0.0).all()
    assert cdf.cdf.min() >= 0.0 and cdf.cdf.max() <= 1.0


# ---------------------------------------------------------------------------
# explicit equicorrelated geometry


def test_feature_rows_realize_the_gram():
    rows = vs.equicorr_feature_rows(6, 0.37, n_extra=2)
    gram = rows @ rows.T
    np.testing.assert_allclose(np.diag(gram), 1.0, atol=1e-15)
    off = gram[~np.eye(8, dtype=bool)]
    np.testing.assert_allclose(off, 0.37, atol=1e-15)


def test_population_errors_use_shared_coordinate():
    rows = vs.equicorr_feature_rows(4, 0.5)
    w = np.zeros(rows.shape[1])
    w[0] = 1.3
    err = vs.equicorr_population_errors(w[None, :], 0.5)
    assert err[0] == pytest.approx(float(vs.std_normal_cdf(-1.3)), abs=1e-15)


def test_theory_table_rows():
    rows = vs.theory_table([100, 1000], [0.5])
    assert [r["n"] for r in rows] == [100, 1000]
    r = rows[1]
    assert r["asymptotic"] == pytest.approx(1e-3, rel=1e-12)
    assert r["quadrature"] == pytest.approx(1 / 1001, rel=1e-9)
    assert r["ratio"] == pytest.approx(1.001, rel=1e-9)
