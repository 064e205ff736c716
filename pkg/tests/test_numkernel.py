from fractions import Fraction

import mpmath
import pytest

from hilbert_k3.numkernel import (NonConvergent, PrecisionPolicy, exp_i_pi,
                                  quadratic_constants, sum_series,
                                  working_precision)


def test_geometric_series(policy):
    with working_precision(policy):
        q = mpmath.mpf("0.5")
        res = sum_series(lambda n: q ** n,
                         lambda n: q ** (n + 1) / (1 - q), policy)
        assert abs(res.value - 2) < policy.series_tol


def test_all_zero_generator_stops_after_one_term(policy):
    res = sum_series(lambda n: mpmath.mpc(0), lambda n: mpmath.mpf(0), policy)
    assert res.value == 0
    assert res.terms_used == 1


def test_arithmetico_geometric_series(policy):
    # sum n q^n = q/(1-q)^2 = 90 at q = 0.9, computed independently
    with working_precision(policy):
        q = mpmath.mpf("0.9")
        expected = q / (1 - q) ** 2
        assert abs(expected - 90) < 1e-25

        def tail(n):
            # n q^n decreasing ratio bound for n >= 10
            m = n + 1
            ratio = q * (m + 1) / m
            if ratio >= 1:
                return mpmath.inf
            return m * q ** m / (1 - ratio)

        res = sum_series(lambda n: n * q ** n, tail, policy)
        assert abs(res.value - 90) < policy.series_tol * 100


def test_nonconvergent_cap():
    pol = PrecisionPolicy(64, series_cap=50)
    with pytest.raises(NonConvergent):
        sum_series(lambda n: mpmath.mpf(1), lambda n: mpmath.mpf(1), pol)


def test_exp_i_pi_rational_reduction(policy):
    with working_precision(policy):
        assert abs(exp_i_pi(Fraction(1, 2), policy) - mpmath.mpc(0, 1)) < 1e-35
        assert abs(exp_i_pi(Fraction(1), policy) + 1) < 1e-35
        # huge rational argument: reduction is exact, modulus stays 1
        big = Fraction(10 ** 40 + 1, 3)   # = 5/3 mod 2
        v = exp_i_pi(big, policy)
        assert abs(abs(v) - 1) < 1e-35
        assert abs(v - exp_i_pi(Fraction(5, 3), policy)) < 1e-35


def test_quadratic_constants(policy):
    qc = quadratic_constants(policy)
    with working_precision(policy):
        assert abs(qc.eps * qc.eps_conj + 1) < 1e-36
        assert abs(qc.eps + qc.eps_conj - 1) < 1e-36
        assert abs(qc.sqrt5 ** 2 - 5) < 1e-36


def test_default_policy_reads_environment(monkeypatch):
    from hilbert_k3.numkernel import PRECISION_ENV_VAR, default_policy
    monkeypatch.setenv(PRECISION_ENV_VAR, "192")
    assert default_policy().mantissa_bits == 192
    monkeypatch.delenv(PRECISION_ENV_VAR)
    assert default_policy().mantissa_bits == 128


def test_policy_invariants():
    with pytest.raises(ValueError):
        PrecisionPolicy(128, series_tol=2.0 ** -125)  # finer than 2^-(m-8)
    with pytest.raises(ValueError):
        PrecisionPolicy(128, verify_tol=2.0 ** -121)  # < 10 * series_tol
    with pytest.raises(ValueError):
        PrecisionPolicy(40)
    pol = PrecisionPolicy(128)
    assert pol.series_tol >= 2.0 ** -120
    assert pol.verify_tol >= 10 * pol.series_tol


def test_precision_doubling_consistency(policy):
    # doubling the mantissa moves exported values by less than the coarse tol
    from hilbert_k3.elliptic import eisenstein_and_J, jacobi_theta

    double = policy.doubled()
    import random
    rng = random.Random(11)
    with working_precision(double):
        for _ in range(10):
            z = mpmath.mpc(round(rng.uniform(-0.5, 0.5), 6),
                           round(rng.uniform(0.8, 2.0), 6))
            a = jacobi_theta("00", z, policy)
            b = jacobi_theta("00", z, double)
            assert abs(a - b) < policy.series_tol
            ja = eisenstein_and_J(z, policy).J
            jb = eisenstein_and_J(z, double).J
            # J divides nearly-cancelling Eisenstein combinations; its
            # condition number w.r.t. the series tails is ~ 3 |J| (1 + |J|)
            assert abs(ja - jb) < policy.series_tol * 12 * (1 + abs(jb)) ** 2
