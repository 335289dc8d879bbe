import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from multweight import arith


def is_prime_trial(n: int) -> bool:
    # independent oracle: trial division only
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def test_spf_small_values():
    t = arith.build_spf(10)
    assert t.spf[2:11].tolist() == [2, 3, 2, 5, 2, 7, 2, 3, 2]


def test_spf_minimal():
    t = arith.build_spf(2)
    assert t.spf[2] == 2


def test_spf_rejects_tiny_limit():
    with pytest.raises(ValueError):
        arith.build_spf(1)


def test_spf_prime_flags_match_trial_division(spf_1e4):
    flags = spf_1e4.spf[2:] == np.arange(2, 10**4 + 1, dtype=np.int32)
    for n in range(2, 10**4 + 1):
        assert flags[n - 2] == is_prime_trial(n)


def test_prime_count_1e6(spf_1e6):
    # oracle count verified by trial division on a sparse sample plus the
    # full count pinned from an independent primality scan
    assert len(spf_1e6.primes()) == 78498


def test_spf_matches_trial_division(spf_1e4):
    # the first divisor >= 2 found by increasing trial is the smallest prime factor
    for n in range(2, 10**4 + 1):
        p = 2
        while n % p:
            p += 1
        assert spf_1e4.spf[n] == p


def test_capacity_budget(monkeypatch):
    monkeypatch.setenv(arith.MAX_SIEVE_ENV, "1000")
    with pytest.raises(arith.CapacityError):
        arith.build_spf(10**4)
    monkeypatch.delenv(arith.MAX_SIEVE_ENV)
    arith.build_spf(10**4)


def test_factorize_examples(spf_1e4):
    t = arith.build_spf(10**7)
    assert arith.factorize(12, spf_1e4).factors == ((2, 2), (3, 1))
    assert arith.factorize(12, spf_1e4).big_omega == 3
    assert arith.factorize(12, spf_1e4).omega == 2
    assert arith.factorize(1, spf_1e4).factors == ()
    assert arith.factorize(1, spf_1e4).big_omega == 0
    assert arith.factorize(9699690, t).factors == (
        (2, 1), (3, 1), (5, 1), (7, 1), (11, 1), (13, 1), (17, 1), (19, 1),
    )


def test_factorize_out_of_range(spf_1e4):
    with pytest.raises(ValueError):
        arith.factorize(0, spf_1e4)
    with pytest.raises(ValueError):
        arith.factorize(10**4 + 1, spf_1e4)


def test_factorize_recompose_exhaustive(spf_1e5):
    for n in range(1, 10**5 + 1):
        assert arith.factorize(n, spf_1e5).reconstruct() == n


@given(st.integers(min_value=1, max_value=10**4))
def test_factorize_log_identity(n):
    t = _shared_table()
    prof = arith.factorize(n, t)
    total = sum(k * math.log(p) for p, k in prof.factors)
    assert abs(total - math.log(n)) <= 1e-12 * max(1.0, abs(math.log(n)))


_T = None


def _shared_table():
    global _T
    if _T is None:
        _T = arith.build_spf(10**4)
    return _T


def test_omega_inequality_and_squarefree(spf_1e4):
    for n in range(1, 10**4 + 1):
        prof = arith.factorize(n, spf_1e4)
        assert prof.big_omega >= prof.omega
        squarefree = all(n % (p * p) != 0 for p in range(2, math.isqrt(n) + 1))
        assert (prof.big_omega == prof.omega) == squarefree


def test_primes_in_examples(spf_1e6):
    assert arith.primes_in(1, 10, spf_1e6).tolist() == [2, 3, 5, 7]
    assert arith.primes_in(90, 100, spf_1e6).tolist() == [97]
    assert len(arith.primes_in(1, 10**6, spf_1e6)) == 78498
    assert arith.primes_in(8, 10, spf_1e6).tolist() == []


def test_primes_in_range_check(spf_1e4):
    with pytest.raises(ValueError):
        arith.primes_in(1, 10**5, spf_1e4)


def test_primes_upto_matches_spf(spf_1e5):
    assert np.array_equal(arith.primes_upto(10**5), spf_1e5.primes())


def test_statistic_tables_match_profiles(spf_1e4):
    om = arith.big_omega_table(spf_1e4)
    wm = arith.omega_table(spf_1e4)
    nu3 = arith.nu_p_table(10**4, 3)
    lpf = arith.largest_prime_table(spf_1e4)
    for n in range(1, 10**4 + 1):
        prof = arith.factorize(n, spf_1e4)
        assert om[n] == prof.big_omega
        assert wm[n] == prof.omega
        assert nu3[n] == prof.nu(3)
        expected_lpf = max((p for p, _ in prof.factors), default=1)
        assert lpf[n] == expected_lpf
