import math

import numpy as np
import pytest

from multweight import arith, asympt
from multweight.weights import builtin_weight


def test_euler_constant_uniform_is_one():
    a = asympt.euler_constant(builtin_weight("power", z=0.0), cutoff=10**5)
    assert a.A_alpha == pytest.approx(1.0, abs=1e-12)


def test_euler_constant_powerfree_product():
    a = asympt.euler_constant(builtin_weight("powerfree", k=2), cutoff=10**6)
    ps = arith.primes_upto(10**6).astype(float)
    oracle = float(np.exp(np.sum(np.log1p(-1.0 / ps**2))))
    assert a.A_alpha == pytest.approx(oracle, abs=1e-12)
    assert a.A_alpha == pytest.approx(6.0 / math.pi**2, abs=1e-6)


def test_euler_constant_power_weight():
    for z in (0.5, 1.0):
        a = asympt.euler_constant(builtin_weight("power", z=z), cutoff=10**5)
        assert a.A_alpha == pytest.approx(1.0 / (z + 1.0), abs=1e-10)


def test_euler_constant_monotone_convergent_in_cutoff():
    # direction depends on whether the per-prime factor exceeds 1; for
    # theta_omega(2) it is (1+2/(p-1))(1-1/p)^2 = 1 - 1/p^2 < 1
    for kind, params in (("theta_omega", {"theta": 2.0}), ("divisor", {"k": 2.0}),
                         ("powerfree", {"k": 2}), ("euler_ratio", {}), ("sigma", {"z": 1.0})):
        w = builtin_weight(kind, **params)
        vals = [asympt.euler_constant(w, cutoff=c).A_alpha for c in (10**4, 10**5, 10**6)]
        diffs = [vals[1] - vals[0], vals[2] - vals[1]]
        if all(abs(d) < 1e-10 for d in diffs):
            continue  # constant to rounding (divisor: the factor is exactly 1)
        assert diffs[0] * diffs[1] >= 0, kind  # one direction
        assert abs(diffs[1]) <= abs(diffs[0]), kind  # converging


def test_predict_S_ewens_uniform():
    a = asympt.euler_constant(builtin_weight("power", z=0.0), cutoff=10**5)
    assert asympt.predict_S_ewens(a, 10**6) == pytest.approx(10**6, rel=1e-12)


def test_predict_S_ewens_powerfree_magnitude():
    a = asympt.euler_constant(builtin_weight("powerfree", k=2), cutoff=10**6)
    assert asympt.predict_S_ewens(a, 10**6) == pytest.approx(607927.1, abs=1.0)


def test_predict_scale_consistency():
    # prediction / x^(d+1) depends on x only through log x
    a = asympt.euler_constant(builtin_weight("sigma", z=1.0), cutoff=10**4)
    x1, x2 = 10**4, 10**6
    r1 = asympt.predict_S_ewens(a, x1) / x1 ** (a.d + 1)
    r2 = asympt.predict_S_ewens(a, x2) / x2 ** (a.d + 1)
    assert r1 == pytest.approx(r2 * (math.log(x1) / math.log(x2)) ** (a.theta - 1), rel=1e-12)


def test_G_eval_reference_value():
    # oracle: direct summation to 1e8 plus the density tail gives 0.4930911094
    g = asympt.G_eval(1.0, 2.0, k=0, prime_cutoff=10**6)
    assert g.value == pytest.approx(0.4930911094, abs=1e-6)
    assert g.tail_estimate > 0
    assert g.tail_bound >= g.tail_estimate


def test_G_eval_sign_alternation():
    for k in range(4):
        g = asympt.G_eval(1.0, 1.5, k=k, prime_cutoff=10**5)
        assert math.copysign(1.0, g.value) == (-1.0) ** k


def test_G_eval_requires_s_above_one():
    with pytest.raises(ValueError):
        asympt.G_eval(1.0, 1.0, k=0)


def test_G_near_one_leading_term():
    # (s-1)^(gamma+k) |G^(k)(s)| approaches Gamma(gamma+k) as s -> 1+
    from scipy.special import gamma as G

    for gamma, k in ((1.0, 0), (1.0, 1), (2.0, 1)):
        gaps = []
        for sm1 in (0.1, 0.05, 0.025):
            v = asympt.G_eval(gamma, 1.0 + sm1, k=k, prime_cutoff=10**6).value
            gaps.append(abs(sm1 ** (gamma + k) * abs(v) / G(gamma + k) - 1.0))
        assert gaps[2] < gaps[1] < gaps[0]  # converging is the pass criterion
        assert gaps[2] < 0.05


def test_G_prime_strictly_increasing():
    vals = [asympt.G_eval(1.0, s, k=1, prime_cutoff=10**5).value for s in np.linspace(1.05, 2.0, 12)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_solve_saddle_residual_and_leading():
    s = asympt.solve_saddle(1.0, 1.0, 10**6, prime_cutoff=10**5)
    assert s.residual <= 1e-9
    assert s.sigma_leading == pytest.approx(math.log(10**6) ** -0.5, rel=1e-12)
    assert 1.0 < s.sigma < 2.0


def test_solve_saddle_trend():
    gaps = []
    for x in (1e4, 1e6, 1e8):
        s = asympt.solve_saddle(1.0, 1.0, x, prime_cutoff=10**5)
        gaps.append(abs((s.sigma - 1.0) / s.sigma_leading - 1.0))
    assert gaps[2] < gaps[1] < gaps[0]


def test_B_constant_and_exponent():
    assert asympt.B_constant(1.0, 1.0) == pytest.approx(2.0, rel=1e-12)
    s = asympt.solve_saddle(1.0, 1.0, 10**5, prime_cutoff=10**4)
    # denominator exponent (gamma+2)/(2(gamma+1)) = 3/4 at gamma = 1
    x = 10**5
    base = asympt.predict_S_poly(s, x)
    ratio = base / (x * s.A_alpha_poly * math.exp(s.B * math.log(x) ** 0.5))
    assert ratio == pytest.approx(math.log(x) ** -0.75, rel=1e-12)


def test_predict_mean_omega_examples():
    assert asympt.predict_mean_omega_poly(1.0, 1.0, math.exp(16.0)) == pytest.approx(4.0, rel=1e-12)
    a = asympt.predict_mean_omega_poly(1.0, 1.5, 10**5)
    b = asympt.predict_mean_omega_poly(1.0, 1.5, 10**10)  # log x doubles
    assert b / a == pytest.approx(2.0 ** (1.5 / 2.5), rel=1e-9)


def test_gamma_law_params():
    assert asympt.gamma_law_params(1.0, 1.0) == (2.0, 1.0)
    shape, rate = asympt.gamma_law_params(2.0, 1.0)
    assert shape == 2.0
    assert rate == pytest.approx(math.sqrt(2.0), rel=1e-12)
    # limit mean = shape/rate
    assert shape / rate == pytest.approx((1.0 + 1.0) / (2.0 * math.gamma(2.0)) ** 0.5, rel=1e-12)


def test_saddle_rejects_tiny_x():
    with pytest.raises(ValueError):
        asympt.solve_saddle(1.0, 1.0, 2.0)


def test_saddle_reports_non_bracketing():
    # gamma=3 pushes |G'(2)| ~ 6.8 past log 3: the root leaves (1, 2]
    with pytest.raises(ValueError, match="bracket"):
        asympt.solve_saddle(1.0, 3.0, 3.0, prime_cutoff=10**4)


def test_euler_constant_divergence_detected():
    from multweight.weights import EwensRegime, MultiplicativeWeight

    bad = MultiplicativeWeight(
        name="geometric-growth",
        prime_power_value=lambda p, k: 3.0**k,
        regime=EwensRegime(theta=1.0, d=0.0),
        vec_prime_power_value=lambda ps, k: np.full(len(ps), 3.0**k),
    )
    with pytest.raises(ValueError):
        asympt.euler_constant(bad, cutoff=10**3)
