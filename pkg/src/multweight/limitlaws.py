"""Reference limit laws and distribution-comparison metrics.

Covers the beta/gamma/normal conventions used throughout (gamma is
shape/rate: density rate^shape x^(shape-1) e^(-rate x)/Gamma(shape)),
the GEM stick-breaking construction and its sorted version (the
Poisson-Dirichlet law), size-biased permutation and residual ratios,
and the Dickman-type function rho_theta solving

    rho(x) x^theta = integral_{x-1}^{x} theta y^(theta-1) rho(y) dy,

with rho = 1 on [0, 1].
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.integrate import quad

from .sampling import ExactPmf


# ---------------------------------------------------------------------------
# Elementary reference distributions
# ---------------------------------------------------------------------------


def beta_sample(a: float, b: float, rng: np.random.Generator, size=None):
    """Beta(a, b) draws; Beta(1, theta) uses the exact inverse CDF 1 - U^(1/theta)."""
    if a <= 0 or b <= 0:
        raise ValueError("beta shape parameters must be positive")
    if a == 1.0:
        return 1.0 - rng.random(size) ** (1.0 / b)
    return rng.beta(a, b, size)


def beta_cdf(a: float, b: float, t) -> float:
    return stats.beta.cdf(t, a, b)


def gamma_cdf(shape: float, rate: float, t):
    """CDF of the gamma law with mean shape/rate (shape-rate convention)."""
    if shape <= 0 or rate <= 0:
        raise ValueError("gamma parameters must be positive")
    return stats.gamma.cdf(t, a=shape, scale=1.0 / rate)


def normal_cdf(t):
    return stats.norm.cdf(t)


# ---------------------------------------------------------------------------
# GEM / Poisson-Dirichlet
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GemSequence:
    """Stick-breaking fractions Z_j = (1-Y_1)...(1-Y_{j-1}) Y_j with
    i.i.d. Y_j ~ Beta(1, theta), truncated at k terms; remainder is the
    unallocated stick (1-Y_1)...(1-Y_k).
    """

    theta: float
    Y: np.ndarray
    Z: np.ndarray
    remainder: float


@dataclass(frozen=True)
class PdSample:
    """GEM fractions sorted nonincreasing; parts sum to 1 - remainder."""

    theta: float
    parts: np.ndarray
    remainder: float


def stick_break(ys: np.ndarray) -> np.ndarray:
    """Map (y_1, y_2, ...) to ((1-y_1)...(1-y_{j-1}) y_j)_j."""
    ys = np.asarray(ys, dtype=float)
    left = np.concatenate([[1.0], np.cumprod(1.0 - ys[:-1])])
    return left * ys


def stick_break_inverse(zs: np.ndarray) -> np.ndarray:
    """Inverse map: y_j = z_j / (1 - z_1 - ... - z_{j-1})."""
    zs = np.asarray(zs, dtype=float)
    rem = 1.0 - np.concatenate([[0.0], np.cumsum(zs[:-1])])
    if np.any(rem <= 0):
        raise ValueError("prefix sums reach 1; inverse undefined")
    return zs / rem


def gem_sample(theta: float, k: int, rng: np.random.Generator) -> GemSequence:
    if theta <= 0 or k < 1:
        raise ValueError("need theta > 0 and k >= 1")
    Y = beta_sample(1.0, theta, rng, size=k)
    Z = stick_break(Y)
    remainder = float(np.prod(1.0 - Y))
    return GemSequence(theta=theta, Y=Y, Z=Z, remainder=remainder)


def pd_sample(theta: float, k: int, rng: np.random.Generator) -> PdSample:
    g = gem_sample(theta, k, rng)
    return PdSample(theta=theta, parts=np.sort(g.Z)[::-1], remainder=g.remainder)


def gem_matrix(theta: float, k: int, rng: np.random.Generator, size: int) -> np.ndarray:
    """size x k matrix of stick-breaking fractions (vectorized replicates)."""
    Y = beta_sample(1.0, theta, rng, size=(size, k))
    left = np.concatenate([np.ones((size, 1)), np.cumprod(1.0 - Y[:, :-1], axis=1)], axis=1)
    return left * Y


def pd_largest_part_mean(
    theta: float, rng: np.random.Generator, draws: int = 10**6, k: int = 200, chunk: int = 20000
) -> float:
    """Monte Carlo mean of the largest PD(theta) part (oracle helper)."""
    acc = 0.0
    done = 0
    while done < draws:
        m = min(chunk, draws - done)
        acc += float(np.sum(gem_matrix(theta, k, rng, m).max(axis=1)))
        done += m
    return acc / draws


def size_biased_permutation(parts: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Random reordering where each next element is picked with probability
    proportional to its size among the remaining ones.

    Implemented as the exponential race: sorting by E_i / parts_i with
    i.i.d. standard exponentials realizes exactly this sequential law.
    Zero parts sort to the end.
    """
    parts = np.asarray(parts, dtype=float)
    total = parts.sum()
    if total <= 0:
        raise ValueError("parts must have positive total mass")
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"parts must sum to 1 within 1e-9, got {total}")
    with np.errstate(divide="ignore"):
        keys = rng.exponential(size=len(parts)) / parts
    return parts[np.argsort(keys, kind="stable")]


def size_biased_permutation_matrix(parts: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Row-wise size-biased permutation of a replicates x parts matrix."""
    parts = np.asarray(parts, dtype=float)
    with np.errstate(divide="ignore"):
        keys = rng.exponential(size=parts.shape) / parts
    order = np.argsort(keys, axis=1, kind="stable")
    return np.take_along_axis(parts, order, axis=1)


def residual_ratios(reordered: np.ndarray) -> np.ndarray:
    """Ratios x_j / (1 - x_1 - ... - x_{j-1}); rows of a PD size-biased
    permutation come out i.i.d. Beta(1, theta)."""
    arr = np.asarray(reordered, dtype=float)
    one_d = arr.ndim == 1
    if one_d:
        arr = arr[None, :]
    rem = 1.0 - np.concatenate([np.zeros((arr.shape[0], 1)), np.cumsum(arr[:, :-1], axis=1)], axis=1)
    if np.any(rem <= 0):
        raise ValueError("nonpositive remainder; prefix sums reach 1")
    out = arr / rem
    return out[0] if one_d else out


# ---------------------------------------------------------------------------
# Dickman-type rho_theta
# ---------------------------------------------------------------------------


def _rho_on_12(theta: float, xs) -> np.ndarray:
    """Exact rho_theta on [1, 2].

    Integrating the differentiated delay equation from 1 gives
    rho(x) = 1 - theta * integral_1^x (t-1)^(theta-1) t^(-theta) dt, and the
    substitution u = (t-1)/t turns the integral into
    sum_{k>=0} z^(theta+k)/(theta+k) with z = (x-1)/x <= 1/2, which
    converges geometrically.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    z = (xs - 1.0) / xs
    acc = np.zeros_like(z)
    power = z**theta
    k = 0
    while True:
        acc += power / (theta + k)
        power = power * z
        k += 1
        if k > 400 or float(np.max(power)) / (theta + k) < 1e-18:
            break
    return 1.0 - theta * acc


@dataclass(frozen=True)
class DickmanSolution:
    """rho_theta on a uniform grid of step h = 1/steps_per_unit covering
    [0, u_max]; integers are grid nodes, so the delay term never straddles
    a derivative kink.
    """

    theta: float
    h: float
    grid: np.ndarray
    values: np.ndarray

    def rho(self, u: float) -> float:
        """Evaluate at arbitrary u >= 0 (exact for u <= 2, cubic beyond)."""
        if u < 0:
            raise ValueError("u must be nonnegative")
        if u <= 1.0:
            return 1.0
        if u <= 2.0:
            return float(_rho_on_12(self.theta, u)[0])
        if u > self.grid[-1]:
            raise ValueError(f"u={u} beyond solved range {self.grid[-1]}")
        return _cubic_eval(self.grid, self.values, u)

    def at_grid(self, u: float) -> float:
        j = int(round(u / self.h))
        if abs(j * self.h - u) > 1e-9:
            raise ValueError(f"{u} is not a grid point")
        return float(self.values[j])

    def residuals(self) -> np.ndarray:
        """Integral-equation residual at every grid point > 1.

        The re-check quadrature is independent of the solver's stepping:
        the region y <= 2 enters through closed forms (rho is known there
        in series form) and the region y > 2 through composite Simpson
        split at the integer kink points.
        """
        return _residuals(self)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["u", "rho"])
            for u, r in zip(self.grid, self.values):
                wr.writerow([repr(float(u)), repr(float(r))])


def _cubic_eval(grid: np.ndarray, values: np.ndarray, y: float) -> float:
    # 4-point Lagrange on the nearest nodes; O(h^4) for C^3 data
    m = len(grid) - 1
    h = grid[1] - grid[0]
    j = int(y / h)
    j0 = min(max(j - 1, 0), m - 3)
    t = y / h - j0
    v = values[j0 : j0 + 4]
    return float(
        v[0] * (-(t - 1) * (t - 2) * (t - 3) / 6)
        + v[1] * (t * (t - 2) * (t - 3) / 2)
        + v[2] * (-t * (t - 1) * (t - 3) / 2)
        + v[3] * (t * (t - 1) * (t - 2) / 6)
    )


def dickman_rho(theta: float, u_max: float, h: float = 1.0 / 256) -> DickmanSolution:
    """Solve the delay equation for rho_theta on [0, u_max].

    On [1, 2] the series form of the integrated equation is exact; for
    u > 2 the differentiated form rho'(x) = -theta (x-1)^(theta-1)
    rho(x-1) x^(-theta) is integrated panel by panel with adaptive
    quadrature, the delayed value coming from the series (<= 2) or cubic
    interpolation on the already-computed grid (> 2).

    h must satisfy h <= 1/64 and 1/h must be an integer so the kinks of
    rho at integers land on grid nodes.
    """
    if theta <= 0:
        raise ValueError("theta must be positive")
    if u_max < 1:
        raise ValueError("u_max must be >= 1")
    if h > 1.0 / 64 + 1e-15:
        raise ValueError(f"step {h} too large; need h <= 1/64")
    m = round(1.0 / h)
    if abs(m * h - 1.0) > 1e-9:
        raise ValueError("1/h must be an integer so integers are grid nodes")
    h = 1.0 / m
    n = int(math.ceil(u_max * m - 1e-9))
    grid = np.arange(n + 1) / m
    values = np.ones(n + 1)
    two = min(2 * m, n)
    values[m : two + 1] = _rho_on_12(theta, grid[m : two + 1])

    sol = DickmanSolution(theta=theta, h=h, grid=grid, values=values)

    def rho_delayed(t: float) -> float:
        y = t - 1.0
        if y <= 1.0:
            return 1.0
        if y <= 2.0:
            return float(_rho_on_12(theta, y)[0])
        return _cubic_eval(grid, values, y)

    def g(t: float) -> float:
        return -theta * (t - 1.0) ** (theta - 1.0) * rho_delayed(t) * t ** (-theta)

    for i in range(two, n):
        inc, _ = quad(g, grid[i], grid[i + 1], epsabs=1e-13, epsrel=1e-12, limit=200)
        values[i + 1] = values[i] + inc
    return sol


def _f12_integral(theta: float, w: float) -> float:
    # integral_1^w theta y^(theta-1) rho(y) dy in closed form for w in [1,2]:
    # equals w^theta rho(w) - 1 + (w-1)^theta by parts plus the [1,2] series
    return (w**theta) * float(_rho_on_12(theta, w)[0]) - 1.0 + (w - 1.0) ** theta


def _composite_simpson(fs: np.ndarray, h: float) -> float:
    """Composite Simpson over n = len(fs)-1 uniform panels; a leading 3/8
    block absorbs odd panel counts, single panels fall back to trapezoid."""
    n = len(fs) - 1
    if n == 0:
        return 0.0
    if n == 1:
        return h / 2 * (fs[0] + fs[1])
    total = 0.0
    i = 0
    if n % 2 == 1:
        total += 3 * h / 8 * (fs[0] + 3 * fs[1] + 3 * fs[2] + fs[3])
        i = 3
    while i + 2 <= n:
        total += h / 3 * (fs[i] + 4 * fs[i + 1] + fs[i + 2])
        i += 2
    return total


def _residuals(sol: DickmanSolution) -> np.ndarray:
    theta, h, grid, values = sol.theta, sol.h, sol.grid, sol.values
    m = round(1.0 / h)

    def simpson_piece(a_idx: int, b_idx: int) -> float:
        ys = grid[a_idx : b_idx + 1]
        fs = theta * ys ** (theta - 1.0) * values[a_idx : b_idx + 1]
        return _composite_simpson(fs, h)

    out = np.zeros(len(grid))
    for j in range(m + 1, len(grid)):
        x = grid[j]
        a = x - 1.0
        total = 0.0
        if a < 1.0:
            total += min(1.0, x) ** theta - a**theta
            if x > 1.0:
                total += _f12_integral(theta, min(2.0, x))
            if x > 2.0:
                total += simpson_piece(2 * m, j)
        elif a < 2.0:
            total += _f12_integral(theta, min(2.0, x)) - _f12_integral(theta, a)
            if x > 2.0:
                total += simpson_piece(2 * m, j)
        else:
            # split the composite at interior integers (rho kinks)
            cut = [j - m]
            k0 = int(math.floor(a)) + 1
            while k0 * m < j:
                if k0 * m > cut[-1]:
                    cut.append(k0 * m)
                k0 += 1
            cut.append(j)
            for lo, hi in zip(cut[:-1], cut[1:]):
                total += simpson_piece(lo, hi)
        out[j] = abs(values[j] - x ** (-theta) * total)
    return out


# ---------------------------------------------------------------------------
# Comparison metrics
# ---------------------------------------------------------------------------


def ks_distance(obj, cdf) -> float:
    """Sup distance between a distribution and a reference CDF.

    For an empirical sample (array-like): the standard two-sided statistic
    sup_i max(|F(x_(i)) - i/n|, |F(x_(i)) - (i-1)/n|).

    For an ExactPmf: the CDFs are compared at the atoms of the exact law,
    sup_v |F_exact(v) - F_ref(v)| (right-continuous evaluation); for
    lattice laws against a continuous reference this measures the CDF
    mismatch where the law actually lives rather than the lattice gaps.
    """
    if isinstance(obj, ExactPmf):
        ref = np.asarray(cdf(obj.values), dtype=float)
        return float(np.abs(obj.cdf() - ref).max())
    z = np.sort(np.asarray(obj, dtype=float))
    n = len(z)
    if n == 0:
        raise ValueError("empty sample")
    ref = np.asarray(cdf(z), dtype=float)
    hi = np.abs(ref - np.arange(1, n + 1) / n).max()
    lo = np.abs(ref - np.arange(0, n) / n).max()
    return float(max(hi, lo))


def tv_distance_counts(counts_a: dict, counts_b: dict) -> float:
    """Total-variation distance between two normalized count dictionaries."""
    keys = set(counts_a) | set(counts_b)
    ta = sum(counts_a.values())
    tb = sum(counts_b.values())
    return 0.5 * sum(abs(counts_a.get(k, 0) / ta - counts_b.get(k, 0) / tb) for k in keys)


def ks_noise_quantile(n: int, prob: float = 0.999) -> float:
    """c such that a true-hypothesis KS statistic on n draws is below c
    with the given probability (asymptotic Kolmogorov law)."""
    from scipy.special import kolmogi

    return float(kolmogi(1.0 - prob)) / math.sqrt(n)
