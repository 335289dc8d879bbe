import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from multweight import limitlaws as ll
from multweight.sampling import ExactPmf


def test_normal_cdf_symmetry():
    assert ll.normal_cdf(0.0) == pytest.approx(0.5, rel=1e-14)


def test_gamma_cdf_exponential_case():
    for t in (0.1, 1.0, 3.0):
        assert ll.gamma_cdf(1.0, 1.0, t) == pytest.approx(1.0 - math.exp(-t), rel=1e-12)


def test_gamma_cdf_rate_convention():
    # integrate the density rate^shape x^(shape-1) e^(-rate x)/Gamma(shape)
    # directly; the CDF must follow the shape/rate (not shape/scale) reading
    shape, rate = 2.0, 2.0
    dens = lambda x: rate**shape * x ** (shape - 1) * math.exp(-rate * x) / math.gamma(shape)
    for t in (0.3, 1.0, 2.5):
        ref, _ = quad(dens, 0.0, t)
        assert ll.gamma_cdf(shape, rate, t) == pytest.approx(ref, rel=1e-10)
    mean, _ = quad(lambda x: x * dens(x), 0.0, 60.0)
    assert mean == pytest.approx(shape / rate, rel=1e-9)


def test_beta_11_is_uniform(rng):
    draws = ll.beta_sample(1.0, 1.0, rng, size=10**5)
    ks = ll.ks_distance(draws, lambda t: np.clip(t, 0.0, 1.0))
    assert ks <= 0.01  # below the 99.9% quantile of the null KS law
    assert ks <= ll.ks_noise_quantile(10**5, 0.999)


def test_beta_parameters_validated(rng):
    with pytest.raises(ValueError):
        ll.beta_sample(0.0, 1.0, rng)


def test_gem_mass_and_mean(rng):
    g = ll.gem_sample(1.0, 50, rng)
    assert g.Z.sum() + g.remainder == pytest.approx(1.0, abs=1e-12)
    draws = ll.gem_matrix(1.0, 1, rng, 200000)[:, 0]
    assert draws.mean() == pytest.approx(0.5, abs=0.005)  # Z_1 ~ Beta(1,1)


def test_gem_remainder_truncation_rate(rng):
    theta, k = 2.0, 40
    rem = np.array([ll.gem_sample(theta, k, rng).remainder for _ in range(4000)])
    assert rem.mean() == pytest.approx((theta / (theta + 1.0)) ** k, rel=0.2)


def test_pd_sample_sorted(rng):
    s = ll.pd_sample(0.5, 64, rng)
    assert np.all(np.diff(s.parts) <= 0)
    assert s.parts.sum() <= 1.0 + 1e-12


def test_pd_largest_part_mean_oracle():
    # Monte Carlo oracle for the PD(1) largest-part mean (0.62433 frozen
    # from a 1e6-draw run; the analytic value is the Golomb-Dickman constant)
    m = ll.pd_largest_part_mean(1.0, np.random.default_rng(99), draws=2 * 10**5)
    assert m == pytest.approx(0.62433, abs=0.003)


def test_size_biased_permutation_singleton(rng):
    out = ll.size_biased_permutation(np.array([1.0]), rng)
    assert out.tolist() == [1.0]


def test_size_biased_permutation_equal_halves(rng):
    first = [ll.size_biased_permutation(np.array([0.5, 0.5]), rng)[0] for _ in range(400)]
    assert all(f == 0.5 for f in first)


def test_size_biased_permutation_two_thirds(rng):
    parts = np.array([2.0 / 3.0, 1.0 / 3.0])
    firsts = np.array([ll.size_biased_permutation(parts, rng)[0] for _ in range(30000)])
    assert np.mean(firsts == parts[0]) == pytest.approx(2.0 / 3.0, abs=0.01)


def test_size_biased_permutation_validates_mass(rng):
    with pytest.raises(ValueError):
        ll.size_biased_permutation(np.array([0.2, 0.2]), rng)
    with pytest.raises(ValueError):
        ll.size_biased_permutation(np.array([0.0, 0.0]), rng)


def test_residual_ratios_examples():
    out = ll.residual_ratios(np.array([0.5, 0.25, 0.25]))
    np.testing.assert_allclose(out, [0.5, 0.5, 1.0], rtol=1e-14)
    assert ll.residual_ratios(np.array([1.0])).tolist() == [1.0]
    with pytest.raises(ValueError):
        ll.residual_ratios(np.array([1.0, 0.5]))


@given(st.lists(st.floats(min_value=0.01, max_value=0.7), min_size=1, max_size=8))
def test_stick_break_round_trip(ys):
    # away from remainder underflow the round trip is exact to rounding
    ys = np.array(ys)
    zs = ll.stick_break(ys)
    back = ll.stick_break_inverse(zs)
    np.testing.assert_allclose(back, ys, rtol=1e-9, atol=1e-12)


def test_residual_ratios_inverts_size_biased_pd(rng):
    # smoke version of the round-trip property (full scale in acceptance)
    theta = 1.0
    Z = ll.gem_matrix(theta, 100, rng, 20000)
    parts = np.sort(Z, axis=1)[:, ::-1]
    ratios = ll.residual_ratios(ll.size_biased_permutation_matrix(parts, rng)[:, :3])
    ks = ll.ks_distance(ratios[:, 0], lambda t: ll.beta_cdf(1.0, theta, t))
    assert ks <= 0.02


# --- Dickman ---------------------------------------------------------------


def test_dickman_initial_conditions():
    for theta in (0.5, 1.0, 2.0):
        sol = ll.dickman_rho(theta, 3.0, 1.0 / 64)
        assert sol.at_grid(0.5) == 1.0
        assert sol.at_grid(1.0) == 1.0


def test_dickman_rho1_at_2():
    sol = ll.dickman_rho(1.0, 3.0, 1.0 / 64)
    assert sol.at_grid(2.0) == pytest.approx(1.0 - math.log(2.0), abs=1e-10)


def test_dickman_rho1_matches_known_value_at_3():
    sol = ll.dickman_rho(1.0, 3.0, 1.0 / 256)
    assert sol.at_grid(3.0) == pytest.approx(0.04860838829, abs=1e-8)


def test_dickman_rho2_continuous_at_1():
    sol = ll.dickman_rho(2.0, 2.0, 1.0 / 128)
    assert sol.at_grid(1.0) == 1.0
    assert sol.rho(1.0 + 1e-6) == pytest.approx(1.0, abs=1e-5)


def test_dickman_monotone_and_positive():
    for theta in (0.5, 1.0, 2.0):
        sol = ll.dickman_rho(theta, 4.0, 1.0 / 128)
        tail = sol.values[sol.grid >= 1.0]
        assert np.all(np.diff(tail) <= 1e-15)
        assert np.all(sol.values > 0)


def test_dickman_residuals_small():
    for theta in (0.5, 1.0, 2.0):
        sol = ll.dickman_rho(theta, 3.0, 1.0 / 256)
        assert sol.residuals().max() <= 1e-8


def test_dickman_against_adaptive_quadrature():
    # independent re-check of grid values: the defining integral evaluated
    # with scipy.quad directly on the solution's interpolant
    sol = ll.dickman_rho(0.5, 4.0, 1.0 / 256)
    for u in (2.5, 3.0, 3.5):
        val, _ = quad(
            lambda y: 0.5 * y ** (-0.5) * sol.rho(y), u - 1.0, u, epsabs=1e-12, limit=200
        )
        assert sol.at_grid(u) == pytest.approx(val / u**0.5, abs=1e-8)


def test_dickman_parameter_validation():
    with pytest.raises(ValueError):
        ll.dickman_rho(0.0, 3.0)
    with pytest.raises(ValueError):
        ll.dickman_rho(1.0, 3.0, h=1.0 / 32)  # step too large
    with pytest.raises(ValueError):
        ll.dickman_rho(1.0, 3.0, h=0.0101)  # 1/h not an integer
    with pytest.raises(ValueError):
        ll.dickman_rho(1.0, 0.5)


def test_dickman_csv_export(tmp_path):
    sol = ll.dickman_rho(1.0, 2.0, 1.0 / 64)
    path = tmp_path / "rho.csv"
    sol.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "u,rho"
    assert len(lines) == len(sol.grid) + 1


# --- ks_distance -----------------------------------------------------------


def test_ks_point_mass_vs_normal():
    pmf = ExactPmf(np.array([0.0]), np.array([1.0]))
    assert ll.ks_distance(pmf, ll.normal_cdf) == pytest.approx(0.5, rel=1e-12)


def test_ks_normal_draws(rng):
    draws = rng.standard_normal(10**5)
    assert ll.ks_distance(draws, ll.normal_cdf) <= 0.01


def test_ks_sample_on_reference_grid():
    # a sample placed exactly at the reference quantile midpoints has
    # KS = 1/(2n): the O(1/n) regime
    n = 1000
    z = (np.arange(1, n + 1) - 0.5) / n
    ks = ll.ks_distance(z, lambda t: np.clip(t, 0.0, 1.0))
    assert ks == pytest.approx(0.5 / n, rel=1e-9)


def test_ks_empty_sample():
    with pytest.raises(ValueError):
        ll.ks_distance(np.array([]), ll.normal_cdf)
