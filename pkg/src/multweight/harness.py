"""Acceptance harness: every criterion as a deterministic, seeded check.

Each case maps one acceptance criterion to concrete computations with
pinned tolerances and fixed seeds; run_all executes a scale tier:

* desk: the criteria at their stated sizes (x up to 10^7), < 10 minutes.
* selftest: scaled-down sizes for a < 5 minute smoke run.
* extended: desk plus a 10^8 sieve exactness case (manual tier).

Verdicts are deterministic: no case reads the clock or an unseeded
generator.  Results serialize to a JUnit-style XML file for machines and
one pass/fail line per case for humans.
"""

from __future__ import annotations

import math
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

from . import arith, asympt, limitlaws, permutations, sampling, weights


@dataclass(frozen=True)
class AcceptanceCase:
    id: str
    module: str
    oracle: str
    tolerance: str
    budget_s: float
    fn: Callable[["Context", str], list[tuple[str, bool, str]]]


@dataclass
class CaseResult:
    case_id: str
    passed: bool
    checks: list[tuple[str, bool, str]]
    runtime_s: float

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.case_id} ({self.runtime_s:.1f}s)"


class Context:
    """Shared lazily-built tables.

    The spf and statistic tables persist across cases; weight tables are
    rebuilt per case (cleared by the runner) to bound peak memory.
    """

    def __init__(self):
        self._spf: dict[int, arith.SpfTable] = {}
        self._stat: dict[tuple[str, int], np.ndarray] = {}
        self._wt: dict[tuple[str, int], weights.WeightTable] = {}

    def spf(self, x: int) -> arith.SpfTable:
        for lim, t in self._spf.items():
            if lim >= x:
                return t
        t = arith.build_spf(x)
        self._spf = {x: t}
        return t

    def stat_table(self, kind: str, x: int) -> np.ndarray:
        key = (kind, x)
        if key not in self._stat:
            t = self.spf(x)
            if kind == "big_omega":
                arr = arith.big_omega_table(t)
            elif kind == "omega":
                arr = arith.omega_table(t)
            elif kind == "largest_prime":
                arr = arith.largest_prime_table(t)
            elif kind.startswith("nu_"):
                arr = arith.nu_p_table(x, int(kind[3:]))
            else:
                raise ValueError(kind)
            self._stat[key] = arr[: x + 1]
        return self._stat[key]

    def weight_table(self, kind: str, params: dict, x: int) -> weights.WeightTable:
        name = f"{kind}:{sorted(params.items())}"
        key = (name, x)
        if key not in self._wt:
            w = weights.builtin_weight(kind, **params)
            self._wt[key] = weights.build_weight_table(w, x, self.spf(x))
        return self._wt[key]

    def clear_weight_tables(self):
        self._wt.clear()


# --------------------------------------------------------------------------
# scale parameters
# --------------------------------------------------------------------------

SCALES = ("desk", "selftest", "extended")


def _p(scale: str, desk, selftest):
    return desk if scale in ("desk", "extended") else selftest


# --------------------------------------------------------------------------
# case implementations; each returns a list of (check name, ok, detail)
# --------------------------------------------------------------------------


def _c01_exact_sums(ctx: Context, scale: str):
    x = _p(scale, 10**5, 2 * 10**4)
    spf = ctx.spf(x)
    ws = weights.catalog_weights()
    checks = []
    profiles = [arith.factorize(n, spf) for n in range(1, x + 1)]
    for w in ws:
        table = weights.build_weight_table(w, x, spf)
        brute = math.fsum(
            math.prod(w.value(p, k) for p, k in prof.factors) for prof in profiles
        )
        rel = abs(table.S - brute) / brute
        checks.append((f"S({x:.0e}) {w.name}", rel <= 1e-10, f"sieve={table.S!r} brute={brute!r} rel={rel:.2e}"))
    return checks


def _c02_euler_constants(ctx: Context, scale: str):
    oracle_cut = _p(scale, 10**7, 10**6)
    cut = _p(scale, 10**6, 10**5)
    checks = []
    pf = weights.builtin_weight("powerfree", k=2)
    a = asympt.euler_constant(pf, cutoff=cut)
    ps = arith.primes_upto(oracle_cut).astype(float)
    oracle = float(np.exp(np.sum(np.log1p(-1.0 / ps**2))))
    gap = abs(a.A_alpha - oracle)
    checks.append(("powerfree(2) vs truncated product", gap <= 1e-3, f"A={a.A_alpha:.9f} oracle={oracle:.9f} gap={gap:.2e}"))
    one = asympt.euler_constant(weights.builtin_weight("power", z=0.0), cutoff=cut)
    checks.append(("alpha=1 constant is 1", abs(one.A_alpha - 1.0) <= 1e-12, f"A={one.A_alpha!r}"))
    return checks


def _c03_ewens_mean_value(ctx: Context, scale: str):
    xs = _p(scale, [10**4, 10**5, 10**6, 10**7], [10**4, 10**5, 10**6])
    checks = []
    for kind, params in (("theta_omega", {"theta": 2.0}), ("powerfree", {"k": 2})):
        w = weights.builtin_weight(kind, **params)
        a = asympt.euler_constant(w, cutoff=_p(scale, 10**6, 10**5))
        table = ctx.weight_table(kind, params, xs[-1])
        gaps = []
        for x in xs:
            ratio = table.S_at(x) / asympt.predict_S_ewens(a, x)
            gaps.append(abs(ratio - 1.0))
        # below 1e-4 the gap sits at truncated-constant/error-term noise scale,
        # where strict monotonicity is vacuous (powerfree converges like x^-1/2)
        dec = all(b < a_ or b <= 1e-4 for a_, b in zip(gaps, gaps[1:]))
        checks.append((f"{w.name} |ratio-1| decreasing", dec, f"gaps={['%.2e' % g for g in gaps]}"))
        checks.append((f"{w.name} final gap <= 0.1", gaps[-1] <= 0.1, f"gap({xs[-1]:.0e})={gaps[-1]:.4f}"))
    ctx.clear_weight_tables()
    return checks


def _ek_ks(ctx: Context, theta: float, x: int) -> float:
    # d_theta weights: the canonical family with Ewens parameter theta
    if theta == 1.0:
        table = ctx.weight_table("power", {"z": 0.0}, x)
    else:
        table = ctx.weight_table("divisor", {"k": theta}, x)
    om = ctx.stat_table("big_omega", ctx.spf(x).limit)
    pmf = sampling.exact_pmf_from_values(table, om[: x + 1])
    c = theta * math.log(math.log(x))
    z = pmf.affine(c, math.sqrt(c))
    return limitlaws.ks_distance(z, limitlaws.normal_cdf)


def _c04_prime_factor_clt(ctx: Context, scale: str):
    checks = []
    for theta in (1.0, 2.0):
        ks_lo = _ek_ks(ctx, theta, 10**4)
        ks_hi = _ek_ks(ctx, theta, 10**6)
        checks.append((f"theta={theta:g} KS(1e6) <= 0.25", ks_hi <= 0.25, f"KS={ks_hi:.4f}"))
        checks.append((f"theta={theta:g} KS(1e6) < KS(1e4)", ks_hi < ks_lo, f"{ks_hi:.4f} < {ks_lo:.4f}"))
    ctx.clear_weight_tables()
    return checks


def _c05_pd_largest_part(ctx: Context, scale: str):
    x = _p(scale, 10**7, 10**6)
    draws = _p(scale, 10**4, 5 * 10**3)
    oracle_draws = _p(scale, 10**6, 2 * 10**5)
    rng = np.random.default_rng(20240105)
    table = ctx.weight_table("power", {"z": 0.0}, x)
    spf = ctx.spf(x)
    sampler = sampling.WeightedIntegerSampler(table, rng)
    ns = sampler.sample(draws)
    logx = math.log(x)
    vals = np.array(
        [0.0 if n == 1 else math.log(max(p for p, _ in arith.factorize(int(n), spf).factors)) / logx for n in ns]
    )
    oracle = limitlaws.pd_largest_part_mean(1.0, np.random.default_rng(20240205), draws=oracle_draws)
    gap = abs(float(vals.mean()) - oracle)
    ctx.clear_weight_tables()
    return [
        (
            "mean log p1/log x vs PD(1) largest-part mean",
            gap <= 0.05,
            f"sample={vals.mean():.5f} oracle={oracle:.5f} gap={gap:.4f}",
        )
    ]


def _c06_smoothness(ctx: Context, scale: str):
    x = _p(scale, 10**7, 10**6)
    lpf = ctx.stat_table("largest_prime", ctx.spf(x).limit)[: x + 1]
    smooth = (lpf <= math.sqrt(x)).astype(np.int8)
    checks = []
    uni = ctx.weight_table("power", {"z": 0.0}, x)
    p1 = sampling.exact_pmf_from_values(uni, smooth).prob_of(1.0)
    ref1 = 1.0 - math.log(2.0)
    gap1 = abs(p1 - ref1)
    checks.append(
        (
            "theta=1: P(p1 <= sqrt x) vs rho_1(2), tol 0.02",
            gap1 <= 0.02,
            f"exact={p1:.5f} rho={ref1:.5f} gap={gap1:.4f} (gap decays ~1/log x; see ledger)",
        )
    )
    div2 = ctx.weight_table("divisor", {"k": 2.0}, x)
    p2 = sampling.exact_pmf_from_values(div2, smooth).prob_of(1.0)
    rho2 = limitlaws.dickman_rho(2.0, 2.0, h=1.0 / 256).at_grid(2.0)
    gap2 = abs(p2 - rho2)
    checks.append(
        (
            "theta=2: P(p1 <= sqrt x) vs rho_2(2), tol 0.03",
            gap2 <= 0.03,
            f"exact={p2:.5f} rho={rho2:.5f} gap={gap2:.4f}",
        )
    )
    ctx.clear_weight_tables()
    return checks


def _c07_dickman(ctx: Context, scale: str):
    h = 1.0 / 256
    u_max = _p(scale, 4.0, 3.0)
    checks = []
    sol1 = limitlaws.dickman_rho(1.0, u_max, h)
    gap = abs(sol1.at_grid(2.0) - (1.0 - math.log(2.0)))
    checks.append(("rho_1(2) within 1e-6 of 1-log 2", gap <= 1e-6, f"gap={gap:.2e}"))
    for theta in (0.5, 1.0, 2.0):
        sol = sol1 if theta == 1.0 else limitlaws.dickman_rho(theta, u_max, h)
        r = float(sol.residuals().max())
        checks.append((f"theta={theta:g} residual <= 1e-8", r <= 1e-8, f"max residual={r:.2e}"))
    return checks


def _c08_saddle(ctx: Context, scale: str):
    cutoff = _p(scale, 10**6, 10**5)
    xs = [10**4, 10**6, 10**8]
    checks = []
    gaps = []
    for x in xs:
        s = asympt.solve_saddle(1.0, 1.0, x, prime_cutoff=cutoff)
        checks.append((f"residual at x={x:.0e} <= 1e-9", s.residual <= 1e-9, f"residual={s.residual:.2e}"))
        gaps.append(abs((s.sigma - 1.0) / s.sigma_leading - 1.0))
    dec = all(b < a for a, b in zip(gaps, gaps[1:]))
    checks.append(("|(sigma-1)/closed-form - 1| decreasing", dec, f"gaps={['%.4f' % g for g in gaps]}"))
    return checks


def _c09_poly_partition_sum(ctx: Context, scale: str):
    x1, x2 = _p(scale, (10**6, 10**7), (10**5, 10**6))
    cutoff = _p(scale, 10**6, 10**5)
    table = ctx.weight_table("poly_log", {"K": 1.0, "gamma": 1.0}, x2)
    saddle = asympt.solve_saddle(1.0, 1.0, x2, prime_cutoff=cutoff)
    r1 = table.S_at(x1) / asympt.predict_S_poly(saddle, x1)
    r2 = table.S_at(x2) / asympt.predict_S_poly(saddle, x2)
    dr = r2 / r1
    ctx.clear_weight_tables()
    return [
        (
            f"double ratio [S/pred]({x2:.0e})/[S/pred]({x1:.0e}) within 0.1 of 1",
            abs(dr - 1.0) <= 0.1,
            f"double ratio={dr:.4f} (A cancels)",
        )
    ]


def _c10_poly_typical(ctx: Context, scale: str):
    xs = _p(scale, [10**5, 10**6, 10**7], [10**4, 10**5, 10**6])
    draws = _p(scale, 10**4, 3 * 10**3)
    K, gamma = 1.0, 1.0
    x_top = xs[-1]
    table = ctx.weight_table("poly_log", {"K": K, "gamma": gamma}, x_top)
    om = ctx.stat_table("big_omega", ctx.spf(x_top).limit)
    checks = []
    gaps = []
    for x in xs:
        eo = float(np.dot(om[1 : x + 1].astype(float), table.alpha[1 : x + 1])) / table.S_at(x)
        gaps.append(abs(eo / asympt.predict_mean_omega_poly(K, gamma, x) - 1.0))
    dec = all(b < a for a, b in zip(gaps, gaps[1:]))
    checks.append(("E Omega / prediction monotonically approaching 1", dec, f"|ratio-1|={['%.4f' % g for g in gaps]}"))

    shape, rate = asympt.gamma_law_params(K, gamma)
    spf = ctx.spf(x_top)

    def ks_at(x: int, seed: int) -> float:
        rng = np.random.default_rng(seed)
        sub = weights.WeightTable(x=x, alpha=table.alpha[: x + 1], prefix=table.prefix[: x + 1])
        sampler = sampling.WeightedIntegerSampler(sub, rng)
        ns = sampler.sample(draws)
        scalepow = math.log(x) ** (1.0 / (gamma + 1.0))
        vals = []
        for n in ns:
            n = int(n)
            if n == 1:
                vals.append(0.0)
                continue
            p = sampling.size_biased_prime(arith.factorize(n, spf), rng)
            vals.append(math.log(p) / scalepow)
        return limitlaws.ks_distance(np.array(vals), lambda t: limitlaws.gamma_cdf(shape, rate, t))

    ks_lo = ks_at(xs[0], 20241001)
    ks_hi = ks_at(x_top, 20241002)
    checks.append((f"KS at {x_top:.0e} <= 0.15", ks_hi <= 0.15, f"KS={ks_hi:.4f}"))
    checks.append((f"KS decreasing from {xs[0]:.0e}", ks_hi < ks_lo, f"{ks_hi:.4f} < {ks_lo:.4f}"))
    ctx.clear_weight_tables()
    return checks


def _c11_small_primes(ctx: Context, scale: str):
    x = _p(scale, 10**7, 10**6)
    nu2 = ctx.stat_table("nu_2", ctx.spf(x).limit)[: x + 1]
    nu3 = ctx.stat_table("nu_3", ctx.spf(x).limit)[: x + 1]
    checks = []
    for kind, params in (("theta_omega", {"theta": 2.0}), ("powerfree", {"k": 2})):
        w = weights.builtin_weight(kind, **params)
        table = ctx.weight_table(kind, params, x)
        exact = sampling.exact_pmf_from_values(table, nu2)
        limit = sampling.nu_p_limit_pmf(w, 2)
        gap = 0.0
        for k in range(int(max(exact.values.max(), limit.values.max())) + 1):
            gap = max(gap, abs(exact.prob_of(k) - limit.prob_of(k)))
        checks.append(
            (f"{w.name} nu_2 atoms vs limit, tol 0.01", gap <= 0.01, f"max atom gap={gap:.4f}")
        )
        joint = sampling.joint_pmf_from_values(table, nu2, nu3)
        m2: dict[int, float] = {}
        m3: dict[int, float] = {}
        for (a, b), pr in joint.items():
            m2[a] = m2.get(a, 0.0) + pr
            m3[b] = m3.get(b, 0.0) + pr
        fgap = max(abs(pr - m2[a] * m3[b]) for (a, b), pr in joint.items())
        checks.append(
            (f"{w.name} joint (nu_2,nu_3) factorizes, tol 0.01", fgap <= 0.01, f"max gap={fgap:.4f}")
        )
    ctx.clear_weight_tables()
    return checks


def _c12_partition_function(ctx: Context, scale: str):
    checks = []
    from scipy.special import gammaln

    for theta in (0.5, 1.0, 2.0):
        w = permutations.constant_weights(50, theta)
        t = permutations.partition_function(w)
        worst = 0.0
        for m in range(51):
            ref = gammaln(m + theta) - gammaln(theta) - gammaln(m + 1)
            worst = max(worst, abs(math.exp(t.log_h[m] - ref) - 1.0))
        checks.append(
            (f"h_m = binom(m+theta-1, m), theta={theta:g}, n<=50", worst <= 1e-10, f"max rel err={worst:.2e}")
        )
    draws = _p(scale, 10**6, 2 * 10**5)
    n = 7
    for label, w in (
        ("constant theta=2", permutations.constant_weights(n, 2.0)),
        ("poly gamma=1", permutations.poly_weights(1.0, n)),
    ):
        t = permutations.partition_function(w)
        exact = permutations.enumerate_Sn(n, w)
        rng = np.random.default_rng(20241201)
        counts, _first = permutations.sample_cycle_types_batch(w, t, rng, draws, as_counts=True)
        uniq, cnt = np.unique(counts, axis=0, return_counts=True)
        emp = {}
        for row, c in zip(uniq, cnt):
            lens = []
            for length in range(n, 0, -1):
                lens.extend([length] * int(row[length]))
            emp[tuple(lens)] = c / draws
        tv = 0.5 * sum(
            abs(emp.get(k, 0.0) - exact.type_probs.get(k, 0.0))
            for k in set(emp) | set(exact.type_probs)
        )
        checks.append((f"sampler TV vs enumeration, {label}, n=7", tv <= 0.02, f"TV={tv:.4f} ({draws} draws)"))
    return checks


def _c13_conjugation_invariance(ctx: Context, scale: str):
    checks = []
    for n in range(2, 8):
        for label, w in (
            ("theta=0.5", permutations.constant_weights(n, 0.5)),
            ("theta=1", permutations.constant_weights(n, 1.0)),
            ("theta=2", permutations.constant_weights(n, 2.0)),
            ("poly gamma=1", permutations.poly_weights(1.0, n)),
        ):
            by_perm = permutations.enumerate_Sn_by_permutations(n, w)
            by_part = permutations.enumerate_Sn(n, w)
            gap = float(np.abs(by_perm.l1_pmf - by_part.typ_pmf).max())
            checks.append((f"n={n} {label} L1 pmf == size-biased pmf", gap <= 1e-12, f"max gap={gap:.2e}"))
    return checks


def _c14_pd_round_trip(ctx: Context, scale: str):
    reps = _p(scale, 10**5, 2 * 10**4)
    k = 200
    checks = []
    for theta in (0.5, 1.0, 2.0):
        rng = np.random.default_rng(20241400 + int(10 * theta))
        Z = limitlaws.gem_matrix(theta, k, rng, reps)
        parts = np.sort(Z, axis=1)[:, ::-1]
        reordered = limitlaws.size_biased_permutation_matrix(parts, rng)[:, :6]
        # rows whose float remainder underflows to 0 within 6 picks cannot
        # be renormalized in double precision; drop them (O(1e-3) of rows
        # at theta=0.5, negligible against the 0.02 tolerance)
        rem = 1.0 - np.cumsum(reordered[:, :-1], axis=1)
        good = rem.min(axis=1) > 1e-12
        ratios = limitlaws.residual_ratios(reordered[good])
        worst = 0.0
        for j in range(5):
            d = limitlaws.ks_distance(ratios[:, j], lambda t: limitlaws.beta_cdf(1.0, theta, t))
            worst = max(worst, d)
        checks.append(
            (
                f"theta={theta:g}: first 5 residual ratios ~ Beta(1,theta)",
                worst <= 0.02,
                f"max KS={worst:.4f} ({int((~good).sum())} degenerate rows dropped)",
            )
        )
    return checks


def _c15_permutation_trends(ctx: Context, scale: str):
    checks = []
    # cycle-count CLT trend (constant weights)
    reps = _p(scale, 4000, 2000)
    ns = _p(scale, (10**2, 10**5), (10**2, 10**4))
    for theta in (1.0, 2.0):
        kss = []
        for i, n in enumerate(ns):
            rng = np.random.default_rng(20241500 + i + int(theta))
            c = permutations.ewens_cycle_count_samples(n, theta, rng, reps)
            z = (c - theta * math.log(n)) / math.sqrt(theta * math.log(n))
            kss.append(limitlaws.ks_distance(z, limitlaws.normal_cdf))
        checks.append(
            (f"cycle-count CLT theta={theta:g}: KS(n={ns[1]:.0e}) < KS(n={ns[0]:.0e})", kss[1] < kss[0], f"{kss[1]:.4f} < {kss[0]:.4f}")
        )
    # longest-cycle mean against the PD largest part
    n_w = _p(scale, 10**5, 2 * 10**4)
    reps_w = _p(scale, 1500, 800)
    rng = np.random.default_rng(20241510)
    longest = np.array(
        [lens.max() for lens in permutations.feller_cycle_samples(n_w, 1.0, rng, reps_w)]
    )
    oracle = limitlaws.pd_largest_part_mean(
        1.0, np.random.default_rng(20241511), draws=_p(scale, 3 * 10**5, 10**5)
    )
    gap = abs(float(longest.mean()) / n_w - oracle)
    checks.append(
        (f"longest cycle: mean l1/n at n={n_w:.0e} vs PD(1) largest-part mean, tol 0.02", gap <= 0.02, f"gap={gap:.4f}")
    )
    # polynomial weights: exact E C drift and the L1 gamma law
    ns_e = _p(scale, (10**3, 10**4, 10**5), (10**3, 10**4))
    reps_e = _p(scale, 1500, 600)
    ec_gaps = []
    ks_l1 = []
    for i, n in enumerate(ns_e):
        w = permutations.poly_weights(1.0, n)
        t = permutations.partition_function(w)
        ec = permutations.exact_mean_cycle_count(t)
        ec_gaps.append(abs(ec / (math.sqrt(n) * math.sqrt(math.gamma(1.0))) - 1.0))
        rng = np.random.default_rng(20241520 + i)
        l1 = np.array(
            [permutations.sample_cycle_type(w, t, rng).first_length for _ in range(reps_e)]
        )
        shape, rate = 2.0, math.gamma(2.0) ** 0.5
        ks_l1.append(
            limitlaws.ks_distance(l1 / math.sqrt(n), lambda u: limitlaws.gamma_cdf(shape, rate, u))
        )
    checks.append(
        (
            "poly weights: E C / (n^(1/2) Gamma(1)^(1/2)) drifting to 1",
            all(b < a for a, b in zip(ec_gaps, ec_gaps[1:])),
            f"|ratio-1|={['%.4f' % g for g in ec_gaps]}",
        )
    )
    checks.append(
        (
            "poly weights: KS(L1/sqrt n vs Gamma(2,1)) decreasing",
            all(b < a for a, b in zip(ks_l1, ks_l1[1:])),
            f"KS={['%.4f' % g for g in ks_l1]}",
        )
    )
    # small cycles: (C_1, C_2) near independent Poisson(theta), Poisson(theta/2)
    n_s = _p(scale, 10**4, 3 * 10**3)
    reps_s = _p(scale, 2 * 10**4, 6 * 10**3)
    rng = np.random.default_rng(20241530)
    c12_counts: dict[tuple[int, int], int] = {}
    for lens in permutations.feller_cycle_samples(n_s, 1.0, rng, reps_s):
        key = (int(np.sum(lens == 1)), int(np.sum(lens == 2)))
        c12_counts[key] = c12_counts.get(key, 0) + 1
    kmax = 24
    ref = {}
    for a in range(kmax):
        for b in range(kmax):
            ref[(a, b)] = float(stats.poisson.pmf(a, 1.0) * stats.poisson.pmf(b, 0.5))
    tv = 0.5 * sum(
        abs(c12_counts.get(k, 0) / reps_s - ref.get(k, 0.0)) for k in set(c12_counts) | set(ref)
    )
    checks.append(
        (f"(C_1,C_2) at n={n_s:.0e} vs Poisson(1) x Poisson(1/2), TV tol 0.03", tv <= 0.03, f"TV={tv:.4f}")
    )
    return checks


def _c16_extended_sieve(ctx: Context, scale: str):
    # extended tier only: 10^8 exactness smoke for the uniform weight
    x = 10**8
    spf = arith.build_spf(x)
    w = weights.builtin_weight("power", z=0.0)
    table = weights.build_weight_table(w, x, spf)
    ok = table.S == float(x)
    return [(f"S(1e8) for alpha=1 equals 1e8 exactly", ok, f"S={table.S!r}")]


CASES: tuple[AcceptanceCase, ...] = (
    AcceptanceCase("c01", "weights", "brute-force per-n evaluation", "1e-10 relative", 10.0, _c01_exact_sums),
    AcceptanceCase("c02", "asymptotics", "truncated Euler products", "1e-3 / 1e-12", 30.0, _c02_euler_constants),
    AcceptanceCase("c03", "asymptotics", "mean-value predictor ratios", "decreasing; 0.1 cap", 120.0, _c03_ewens_mean_value),
    AcceptanceCase("c04", "sampler", "exact Omega pmf vs N(0,1)", "KS <= 0.25; decreasing", 60.0, _c04_prime_factor_clt),
    AcceptanceCase("c05", "sampler", "GEM Monte Carlo largest-part mean", "0.05", 120.0, _c05_pd_largest_part),
    AcceptanceCase("c06", "limit-laws", "Dickman rho values", "0.02 / 0.03", 120.0, _c06_smoothness),
    AcceptanceCase("c07", "limit-laws", "analytic rho_1(2); integral-equation residual", "1e-6 / 1e-8", 60.0, _c07_dickman),
    AcceptanceCase("c08", "asymptotics", "saddle residual and closed form", "1e-9; decreasing", 30.0, _c08_saddle),
    AcceptanceCase("c09", "asymptotics", "partition-sum double ratio", "0.1", 180.0, _c09_poly_partition_sum),
    AcceptanceCase("c10", "sampler", "exact E Omega; gamma-law KS", "monotone; 0.15", 180.0, _c10_poly_typical),
    AcceptanceCase("c11", "sampler", "limiting prime-multiplicity law", "0.01 per atom", 120.0, _c11_small_primes),
    AcceptanceCase("c12", "ewens-perm", "binomial identity; exhaustive enumeration", "1e-10; TV 0.02", 120.0, _c12_partition_function),
    AcceptanceCase("c13", "ewens-perm", "exhaustive enumeration, two routes", "1e-12", 60.0, _c13_conjugation_invariance),
    AcceptanceCase("c14", "limit-laws", "Beta(1,theta) residual ratios", "KS 0.02", 120.0, _c14_pd_round_trip),
    AcceptanceCase("c15", "ewens-perm", "permutation-side limit trends", "per-check", 300.0, _c15_permutation_trends),
)

EXTENDED_CASES: tuple[AcceptanceCase, ...] = (
    AcceptanceCase("c16", "arith-core", "10^8 sieve exactness", "exact", 600.0, _c16_extended_sieve),
)


def run_case(case_id: str, scale: str = "desk", ctx: Context | None = None) -> CaseResult:
    if scale not in SCALES:
        raise ValueError(f"unknown scale {scale!r}")
    all_cases = {c.id: c for c in CASES + EXTENDED_CASES}
    case = all_cases[case_id]
    ctx = ctx or Context()
    t0 = time.perf_counter()
    checks = case.fn(ctx, scale)
    dt = time.perf_counter() - t0
    checks = list(checks)
    checks.append(
        ("runtime within budget", dt <= case.budget_s, f"{dt:.1f}s of {case.budget_s:.0f}s")
    )
    return CaseResult(case_id=case_id, passed=all(ok for _, ok, _ in checks), checks=checks, runtime_s=dt)


def run_all(scale: str = "desk", case_ids: list[str] | None = None, verbose: bool = True) -> list[CaseResult]:
    cases = list(CASES)
    if scale == "extended":
        cases += list(EXTENDED_CASES)
    if case_ids:
        wanted = set(case_ids)
        cases = [c for c in cases if c.id in wanted]
        missing = wanted - {c.id for c in cases}
        if missing:
            raise ValueError(f"unknown case ids: {sorted(missing)}")
    ctx = Context()
    results = []
    for case in cases:
        res = run_case(case.id, scale, ctx)
        ctx.clear_weight_tables()
        results.append(res)
        if verbose:
            print(res.line())
            for name, ok, detail in res.checks:
                print(f"    {'ok  ' if ok else 'FAIL'} {name}: {detail}")
    return results


def write_junit(results: list[CaseResult], path) -> None:
    suite = ET.Element(
        "testsuite",
        name="multweight-acceptance",
        tests=str(len(results)),
        failures=str(sum(not r.passed for r in results)),
    )
    for r in results:
        tc = ET.SubElement(suite, "testcase", classname="acceptance", name=r.case_id, time=f"{r.runtime_s:.3f}")
        failed = [f"{name}: {detail}" for name, ok, detail in r.checks if not ok]
        if failed:
            ET.SubElement(tc, "failure", message="; ".join(failed))
        out = ET.SubElement(tc, "system-out")
        out.text = "\n".join(f"{name}: {detail}" for name, _, detail in r.checks)
    ET.ElementTree(suite).write(path, encoding="unicode", xml_declaration=False)
