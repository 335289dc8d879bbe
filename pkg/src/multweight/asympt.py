"""Explicit predictor formulas for partition sums and typical-prime laws.

Ewens regime: S(x) ~ A_alpha x^(d+1) (log x)^(theta-1) with the
Euler-product constant

    A_alpha = (d+1)^-1 Gamma(theta)^-1 prod_p (sum_i alpha(p^i)/p^(i(d+1))) (1 - 1/p)^theta.

Poly regime: the Dirichlet-series exponent G(s) = sum_p log^gamma p / p^s,
the saddle point sigma solving K G'(sigma) = -log x, and

    S(x)/x ~ A_alpha exp(B (log x)^(gamma/(gamma+1))) / (log x)^((gamma+2)/(2(gamma+1))),
    B = (1 + 1/gamma) (K Gamma(gamma+1))^(1/(gamma+1)).

The absolute constant folded into A_alpha for the poly regime is not
computable from its defining formula here, so poly predictions are only
meaningful in ratios across x values, where it cancels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc, gammaln

from .arith import primes_upto
from .weights import MultiplicativeWeight, PolyRegime


@dataclass(frozen=True)
class EwensAsymptotic:
    theta: float
    d: float
    A_alpha: float
    prime_cutoff: int
    tail_estimate: float  # magnitude of the log-product tail beyond the cutoff


@dataclass(frozen=True)
class GEval:
    """A truncated evaluation of G^(k)(s) = (-1)^k sum_p log^(gamma+k) p / p^s.

    value includes the prime-density tail integral
    (-1)^k * integral_T^inf log^(gamma+k-1) t / t^s dt (closed form via the
    upper incomplete gamma function); tail_estimate is that integral and
    tail_bound a Chebyshev-type rigorous cap on the discarded prime sum.
    """

    gamma: float
    s: float
    k: int
    prime_cutoff: int
    value: float
    truncated_sum: float
    tail_estimate: float
    tail_bound: float


class PrimeLogCache:
    """Primes <= cutoff and their logs, shared across G evaluations."""

    def __init__(self, cutoff: int):
        self.cutoff = int(cutoff)
        self.primes = primes_upto(self.cutoff).astype(float)
        self.logs = np.log(self.primes)


_CACHE: dict[int, PrimeLogCache] = {}


def _prime_cache(cutoff: int) -> PrimeLogCache:
    c = _CACHE.get(cutoff)
    if c is None:
        c = PrimeLogCache(cutoff)
        _CACHE[cutoff] = c
    return c


def euler_constant(w: MultiplicativeWeight, cutoff: int = 10**6) -> EwensAsymptotic:
    """Truncated Euler-product constant of the Ewens-regime mean value law.

    Accumulated in log domain; the per-prime series over prime powers is
    summed until terms fall below 1e-18 relative.  The recorded tail
    estimate is the contribution of the top half of the prime range, a
    practical proxy for the (logarithmic) truncation error.
    """
    reg = w.ewens()
    cache = _prime_cache(cutoff)
    ps = cache.primes
    ips = ps.astype(np.int64)
    series = np.ones(len(ps))
    k = 1
    while True:
        term = w.normalized_prime_power_values(ips, k, reg.d)
        if not np.all(np.isfinite(term)):
            raise ValueError(f"{w.name}: non-finite prime-power series term at k={k}")
        series += term
        mx = float(term.max(initial=0.0))
        if mx < 1e-18 or k > 512:
            if mx >= 1e-18:
                raise ValueError("prime-power series did not converge by k=512")
            break
        k += 1
    if np.any(series <= 0) or not np.all(np.isfinite(series)):
        raise ValueError("degenerate Euler factor; series diverged or weight invalid")
    logs = np.log(series) + reg.theta * np.log1p(-1.0 / ps)
    total = float(np.sum(logs))
    half = float(np.sum(logs[ps > cutoff / 2]))
    A = math.exp(total - gammaln(reg.theta)) / (reg.d + 1.0)
    return EwensAsymptotic(
        theta=reg.theta, d=reg.d, A_alpha=A, prime_cutoff=cutoff, tail_estimate=abs(half)
    )


def predict_S_ewens(a: EwensAsymptotic, x: float) -> float:
    """A_alpha x^(d+1) (log x)^(theta-1)."""
    if x < 2:
        raise ValueError("x must be >= 2")
    return a.A_alpha * x ** (a.d + 1.0) * math.log(x) ** (a.theta - 1.0)


def G_eval(gamma: float, s: float, k: int = 0, prime_cutoff: int = 10**6) -> GEval:
    """Evaluate G^(k)(s) over primes <= prime_cutoff plus a density tail.

    The tail integral substitutes u = log t:
    integral_T^inf u^(g-1) e^(-(s-1)u) du = Gamma(g) Q(g, (s-1) log T) / (s-1)^g
    with g = gamma + k and Q the regularized upper incomplete gamma.  Its
    own error is a PNT-size fraction of the estimate; tail_bound caps the
    discarded prime sum with the Chebyshev-type bound pi(t) <= 1.3 t/log t.
    """
    if s <= 1.0:
        raise ValueError("G(s) requires s > 1")
    if not 0 <= k <= 3:
        raise ValueError("derivative order must be 0..3")
    g = gamma + k
    cache = _prime_cache(prime_cutoff)
    truncated = float(np.sum(cache.logs**g / cache.primes**s))
    L = math.log(prime_cutoff)
    tail = math.exp(gammaln(g)) * float(gammaincc(g, (s - 1.0) * L)) / (s - 1.0) ** g
    # crude rigorous cap: 1.3x the density integral with one extra log
    bound = 1.3 * tail * (1.0 + g / ((s - 1.0) * L))
    sign = -1.0 if k % 2 else 1.0
    return GEval(
        gamma=gamma,
        s=s,
        k=k,
        prime_cutoff=prime_cutoff,
        value=sign * (truncated + tail),
        truncated_sum=sign * truncated,
        tail_estimate=tail,
        tail_bound=bound,
    )


@dataclass(frozen=True)
class PolySaddle:
    K: float
    gamma: float
    x: float
    sigma: float
    residual: float  # |K G'(sigma) + log x| for the truncated-plus-tail G'
    sigma_leading: float  # closed-form leading order of sigma - 1
    B: float
    A_alpha_poly: float  # Euler-product factor, up to the absolute constant
    prime_cutoff: int


def B_constant(K: float, gamma: float) -> float:
    """B = (1 + 1/gamma) (K Gamma(gamma+1))^(1/(gamma+1))."""
    return (1.0 + 1.0 / gamma) * (K * math.exp(gammaln(gamma + 1.0))) ** (1.0 / (gamma + 1.0))


def sigma_leading_order(K: float, gamma: float, x: float) -> float:
    """(K Gamma(gamma+1))^(1/(gamma+1)) (log x)^(-1/(gamma+1))."""
    return (K * math.exp(gammaln(gamma + 1.0))) ** (1.0 / (gamma + 1.0)) * math.log(x) ** (
        -1.0 / (gamma + 1.0)
    )


def poly_euler_factor(
    K: float, gamma: float, prime_cutoff: int, w: MultiplicativeWeight | None = None
) -> float:
    """prod_p (sum_k alpha(p^k)/p^k) / exp(K log^gamma p / p) to the cutoff.

    Defaults to the canonical poly weight alpha(p) = K log^gamma p with
    zero tail, for which the numerator is 1 + K log^gamma p / p.
    """
    cache = _prime_cache(prime_cutoff)
    u = K * cache.logs**gamma / cache.primes
    if w is None:
        return float(math.exp(np.sum(np.log1p(u) - u)))
    series = np.ones(len(cache.primes))
    k = 1
    while True:
        term = w.values_on_primes(cache.primes.astype(np.int64), k) / cache.primes**k
        series += term
        if float(term.max(initial=0.0)) < 1e-18 or k > 512:
            break
        k += 1
    return float(math.exp(np.sum(np.log(series) - u)))


def solve_saddle(
    K: float,
    gamma: float,
    x: float,
    prime_cutoff: int = 10**6,
    w: MultiplicativeWeight | None = None,
) -> PolySaddle:
    """Solve K G'(sigma) = -log x by bisection on sigma in (1, 2].

    G' is strictly increasing there (each summand is), so bracketing is
    monotone-safe; bisection runs to 1e-13 in sigma, far below the 1e-9
    residual contract.
    """
    if x < 3:
        raise ValueError("x must be >= 3")
    logx = math.log(x)

    def f(s: float) -> float:
        return K * G_eval(gamma, s, k=1, prime_cutoff=prime_cutoff).value + logx

    lo, hi = 1.0 + 1e-14, 2.0
    if f(hi) < 0:
        raise ValueError("saddle not bracketed in (1, 2]; increase prime_cutoff")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-13:
            break
    sigma = 0.5 * (lo + hi)
    return PolySaddle(
        K=K,
        gamma=gamma,
        x=x,
        sigma=sigma,
        residual=abs(f(sigma)),
        sigma_leading=sigma_leading_order(K, gamma, x),
        B=B_constant(K, gamma),
        A_alpha_poly=poly_euler_factor(K, gamma, prime_cutoff, w),
        prime_cutoff=prime_cutoff,
    )


def predict_S_poly(p: PolySaddle, x: float) -> float:
    """Poly-regime partition-sum predictor, up to one absolute constant.

    x * euler_factor * exp(B (log x)^(gamma/(gamma+1))) / (log x)^((gamma+2)/(2(gamma+1))).
    Use ratios of exact/predicted across x values so the missing absolute
    constant cancels.
    """
    L = math.log(x)
    g = p.gamma
    return (
        x
        * p.A_alpha_poly
        * math.exp(p.B * L ** (g / (g + 1.0)))
        * L ** (-(g + 2.0) / (2.0 * (g + 1.0)))
    )


def predict_mean_omega_poly(K: float, gamma: float, x: float) -> float:
    """(log x)^(gamma/(gamma+1)) (K Gamma(gamma)/gamma^gamma)^(1/(gamma+1))."""
    PolyRegime(K=K, gamma=gamma)  # validate parameters
    return math.log(x) ** (gamma / (gamma + 1.0)) * (
        K * math.exp(gammaln(gamma)) / gamma**gamma
    ) ** (1.0 / (gamma + 1.0))


def gamma_law_params(K: float, gamma: float) -> tuple[float, float]:
    """Limit law of log P_1(N_x)/(log x)^(1/(gamma+1)): gamma distribution
    with shape gamma+1 and rate (K Gamma(gamma+1))^(1/(gamma+1))."""
    PolyRegime(K=K, gamma=gamma)
    shape = gamma + 1.0
    rate = (K * math.exp(gammaln(gamma + 1.0))) ** (1.0 / (gamma + 1.0))
    return shape, rate
