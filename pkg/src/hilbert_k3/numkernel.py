"""Arbitrary-precision complex arithmetic, tail-controlled series summation,
and the golden-ratio constants shared by every numeric module.

All numeric code in this package runs under an explicit :class:`PrecisionPolicy`.
Values are mpmath numbers created at the policy's mantissa width plus a small
guard; error control is heuristic-with-headroom (no ball arithmetic), validated
by precision-doubling consistency tests.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

import mpmath
from mpmath import mp

DEFAULT_MANTISSA_BITS = 128
PRECISION_ENV_VAR = "HILBERT_K3_PREC"

# extra bits carried internally so that rounding noise stays below series_tol
GUARD_BITS = 16


class NonConvergent(Exception):
    """A series summation exceeded its term cap before meeting its tail bound."""


@dataclass(frozen=True)
class PrecisionPolicy:
    """Working mantissa width and the tolerances derived from it.

    series_tol bounds truncation tails of infinite sums; verify_tol is the
    coarser threshold used when asserting analytic identities numerically.
    """

    mantissa_bits: int = DEFAULT_MANTISSA_BITS
    series_tol: float = field(default=None)  # type: ignore[assignment]
    verify_tol: float = field(default=None)  # type: ignore[assignment]
    series_cap: int = 200_000

    def __post_init__(self):
        if self.mantissa_bits < 53:
            raise ValueError("mantissa_bits must be at least 53")
        if self.series_tol is None:
            object.__setattr__(self, "series_tol", 2.0 ** (-(self.mantissa_bits - 8)))
        if self.verify_tol is None:
            object.__setattr__(self, "verify_tol", 10.0 * self.series_tol)
        if self.series_tol < 2.0 ** (-(self.mantissa_bits - 8)):
            raise ValueError("series_tol finer than the mantissa supports")
        if self.verify_tol < 10.0 * self.series_tol:
            raise ValueError("verify_tol must be >= 10 * series_tol")

    def doubled(self) -> "PrecisionPolicy":
        return PrecisionPolicy(mantissa_bits=2 * self.mantissa_bits,
                               series_cap=self.series_cap)


def default_policy() -> PrecisionPolicy:
    """Policy from the environment (HILBERT_K3_PREC, in bits) or 128 bits."""
    bits = os.environ.get(PRECISION_ENV_VAR)
    if bits:
        return PrecisionPolicy(mantissa_bits=int(bits))
    return PrecisionPolicy()


@contextmanager
def working_precision(policy: PrecisionPolicy | None = None,
                      guard_bits: int = GUARD_BITS) -> Iterator[PrecisionPolicy]:
    """Run a block at policy precision (plus guard bits)."""
    policy = policy or default_policy()
    old = mp.prec
    mp.prec = policy.mantissa_bits + guard_bits
    try:
        yield policy
    finally:
        mp.prec = old


def to_mpc(value) -> mpmath.mpc:
    if isinstance(value, Fraction):
        return mpmath.mpc(mpmath.mpf(value.numerator) / value.denominator)
    return mpmath.mpc(value)


def to_mpf(value) -> mpmath.mpf:
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    return mpmath.mpf(value)


@dataclass(frozen=True)
class QuadraticConstants:
    """sqrt(5), eps = (1+sqrt5)/2 and its conjugate, at working precision."""

    sqrt5: mpmath.mpf
    eps: mpmath.mpf
    eps_conj: mpmath.mpf


def quadratic_constants(policy: PrecisionPolicy | None = None) -> QuadraticConstants:
    with working_precision(policy):
        s = mpmath.sqrt(mpmath.mpf(5))
        return QuadraticConstants(sqrt5=s, eps=(1 + s) / 2, eps_conj=(1 - s) / 2)


def exp_i_pi(x, policy: PrecisionPolicy | None = None) -> mpmath.mpc:
    """exp(i*pi*x) with exact argument reduction modulo 2 for rational x.

    For a Fraction input the reduction x mod 2 happens in exact arithmetic, so
    the result magnitude/phase error stays within a few ulp of the working
    precision regardless of the size of x.
    """
    with working_precision(policy):
        if isinstance(x, (int, Fraction)):
            r = Fraction(x) % 2
            xr = to_mpf(r)
        else:
            xf = to_mpf(x)
            xr = xf - 2 * mpmath.floor(xf / 2)
        return mpmath.mpc(mpmath.cospi(xr), mpmath.sinpi(xr))


@dataclass(frozen=True)
class SeriesSum:
    value: mpmath.mpc
    terms_used: int


def sum_series(term: Callable[[int], mpmath.mpc],
               tail_bound: Callable[[int], mpmath.mpf],
               policy: PrecisionPolicy | None = None,
               min_terms: int = 1) -> SeriesSum:
    """Sum term(0) + term(1) + ... until tail_bound(N) < series_tol.

    tail_bound(N) must be an upper bound for |sum_{n > N} term(n)|.  Raises
    NonConvergent when the policy's term cap is exceeded.
    """
    with working_precision(policy) as pol:
        tol = mpmath.mpf(pol.series_tol)
        total = mpmath.mpc(0)
        n = 0
        while True:
            total += term(n)
            if n + 1 >= min_terms and tail_bound(n) < tol:
                return SeriesSum(value=total, terms_used=n + 1)
            n += 1
            if n > pol.series_cap:
                raise NonConvergent(
                    f"series did not meet tail bound within {pol.series_cap} terms")
