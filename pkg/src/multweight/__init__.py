"""Random integers weighted by multiplicative functions.

Exact sieving and sampling of the measure P(n) = alpha(n)/S(x) on [1, x],
extraction of prime-factor statistics, the permutation-side Ewens
machinery, and quantitative comparison against the limiting laws (normal,
Poisson-Dirichlet, gamma, geometric-type) and explicit asymptotic
predictors.
"""

from .arith import (
    CapacityError,
    FactorProfile,
    SpfTable,
    big_omega_table,
    build_spf,
    factorize,
    largest_prime_table,
    nu_p_table,
    omega_table,
    primes_in,
    primes_upto,
)
from .asympt import (
    B_constant,
    EwensAsymptotic,
    G_eval,
    PolySaddle,
    euler_constant,
    gamma_law_params,
    predict_S_ewens,
    predict_S_poly,
    predict_mean_omega_poly,
    sigma_leading_order,
    solve_saddle,
)
from .limitlaws import (
    DickmanSolution,
    GemSequence,
    PdSample,
    beta_sample,
    dickman_rho,
    gamma_cdf,
    gem_sample,
    ks_distance,
    normal_cdf,
    pd_sample,
    residual_ratios,
    size_biased_permutation,
)
from .permutations import (
    CycleType,
    CycleWeights,
    PartitionFunctionTable,
    constant_weights,
    enumerate_Sn,
    ewens_crp,
    partition_function,
    poly_weights,
    sample_cycle_type,
)
from .sampling import (
    ExactPmf,
    LogPrimeSpectrum,
    WeightedIntegerSampler,
    exact_pmf,
    exact_pmf_from_values,
    nu_p_limit_pmf,
    size_biased_prime,
    spectrum,
)
from .weights import (
    EwensRegime,
    MultiplicativeWeight,
    PolyRegime,
    WeightTable,
    build_weight_table,
    builtin_weight,
    catalog_weights,
    condition_I_residuals,
    evaluate_weight,
    prime_weighted_sum,
)

__version__ = "0.1.0"
