"""One-variable modular objects: Jacobi theta constants, Eisenstein series,
the discriminant form, and the elliptic J function normalised by J(i) = 1.

Numerical evaluation goes through divisor-sum q-expansions (the lattice sums
converge far too slowly for high precision); a truncated lattice sum is kept in
the test suite as a one-time cross-check of the normalisation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .numkernel import PrecisionPolicy, sum_series, to_mpc, working_precision


class NotInUpperHalfPlane(ValueError):
    pass


@dataclass(frozen=True)
class UHPoint:
    z: mpmath.mpc

    def __post_init__(self):
        if not (self.z.imag > 0):
            raise NotInUpperHalfPlane(f"Im(z) must be positive, got {self.z}")


def as_uhp(z) -> mpmath.mpc:
    zc = to_mpc(z.z if isinstance(z, UHPoint) else z)
    if not (zc.imag > 0):
        raise NotInUpperHalfPlane(f"Im(z) must be positive, got {zc}")
    return zc


# ------------------------------------------------------------ theta constants


def jacobi_theta(kind: str, z, policy: PrecisionPolicy | None = None) -> mpmath.mpc:
    """theta_ab(z) = sum_n exp(i pi (n + a/2)^2 z + i pi (n + a/2) b)
    for kind 'ab' in {'00', '01', '10'}, truncated by the Gaussian tail."""
    if kind not in ("00", "01", "10"):
        raise ValueError(f"unsupported theta characteristic {kind}")
    a, b = int(kind[0]), int(kind[1])
    with working_precision(policy) as pol:
        zc = as_uhp(z)
        y = zc.imag
        ipiz = mpmath.mpc(0, 1) * mpmath.pi * zc

        def term(n: int) -> mpmath.mpc:
            if a == 0:
                if n == 0:
                    return mpmath.mpc(1)
                # n and -n pair; the b-phase is exp(i pi n b) = (-1)^(n b)
                sign = -1 if (n * b) % 2 else 1
                return 2 * sign * mpmath.exp(ipiz * n * n)
            # a = 1, b = 0: the n and -n-1 terms agree
            h = mpmath.mpf(2 * n + 1) / 2
            return 2 * mpmath.exp(ipiz * h * h)

        def tail(n: int) -> mpmath.mpf:
            m = mpmath.mpf(n) + (mpmath.mpf(1) / 2 if a else 1)
            lead = mpmath.exp(-mpmath.pi * y * m * m)
            ratio = mpmath.exp(-mpmath.pi * y * (2 * m + 1))
            return 4 * lead / (1 - ratio)

        return sum_series(term, tail, pol, min_terms=2).value


# --------------------------------------------------------- exact q-expansions


@dataclass(frozen=True)
class QExpansion:
    """Exact Laurent q-series: sum of coeffs[k] * q^(leading_exponent + k)."""

    leading_exponent: int
    coeffs: tuple[Fraction, ...]

    def coefficient(self, power: int) -> Fraction:
        k = power - self.leading_exponent
        if k < 0 or k >= len(self.coeffs):
            raise IndexError(f"coefficient q^{power} not stored")
        return self.coeffs[k]

    def evaluate(self, z, policy: PrecisionPolicy | None = None) -> mpmath.mpc:
        with working_precision(policy):
            zc = as_uhp(z)
            q = mpmath.exp(2j * mpmath.pi * zc)
            total = mpmath.mpc(0)
            for k, c in enumerate(self.coeffs):
                total += to_mpc(c) * q ** (self.leading_exponent + k)
            return total


_SIGMA_CACHE: dict[int, list[int]] = {}


def _sigma_table(k: int, n: int) -> list[int]:
    """[sigma_k(1), ..., sigma_k(n)] by sieve, cached and grown on demand."""
    table = _SIGMA_CACHE.get(k, [])
    if len(table) < n:
        size = max(n, 2 * len(table), 64)
        table = [0] * (size + 1)
        for d in range(1, size + 1):
            dk = d ** k
            for m in range(d, size + 1, d):
                table[m] += dk
        table = table[1:]
        _SIGMA_CACHE[k] = table
    return table[:n]


def eisenstein_qexp(weight: int, order: int) -> QExpansion:
    """Normalised E4 or E6 as an exact q-series up to q^order inclusive."""
    if weight == 4:
        mult, k = 240, 3
    elif weight == 6:
        mult, k = -504, 5
    else:
        raise ValueError("only weights 4 and 6 are implemented")
    sig = _sigma_table(k, order)
    coeffs = [Fraction(1)] + [Fraction(mult * s) for s in sig]
    return QExpansion(0, tuple(coeffs))


def _series_mul(a: list[Fraction], b: list[Fraction], n: int) -> list[Fraction]:
    out = [Fraction(0)] * n
    for i, x in enumerate(a[:n]):
        if x == 0:
            continue
        for j in range(min(len(b), n - i)):
            if b[j]:
                out[i + j] += x * b[j]
    return out


def _series_inv(a: list[Fraction], n: int) -> list[Fraction]:
    if a[0] == 0:
        raise ZeroDivisionError("series has no inverse")
    out = [Fraction(0)] * n
    out[0] = 1 / a[0]
    for k in range(1, n):
        acc = Fraction(0)
        for j in range(1, min(k, len(a) - 1) + 1):
            acc += a[j] * out[k - j]
        out[k] = -acc / a[0]
    return out


def j_qexpansion(order: int) -> QExpansion:
    """1728*J as an exact q-series from E4^3 / ((E4^3 - E6^2)/1728).

    Coefficients run from q^-1 through q^order.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    n = order + 2
    e4 = list(eisenstein_qexp(4, n).coeffs)
    e6 = list(eisenstein_qexp(6, n).coeffs)
    e4_3 = _series_mul(_series_mul(e4, e4, n + 1), e4, n + 1)
    e6_2 = _series_mul(e6, e6, n + 1)
    delta = [(a - b) / 1728 for a, b in zip(e4_3, e6_2)]
    assert delta[0] == 0 and delta[1] == 1
    unit = delta[1:]  # Delta/q, a unit power series
    inv = _series_inv(unit, n + 1)
    out = _series_mul(e4_3, inv, n + 2)
    return QExpansion(-1, tuple(out[: order + 2]))


# ----------------------------------------------------------- numeric J / E_k


def _eisenstein_value(weight: int, z, policy: PrecisionPolicy) -> mpmath.mpc:
    if weight == 4:
        mult, k = 240, 3
    else:
        mult, k = -504, 5
    with working_precision(policy) as pol:
        zc = as_uhp(z)
        q = mpmath.exp(2j * mpmath.pi * zc)
        qa = abs(q)

        def term(n: int) -> mpmath.mpc:
            if n == 0:
                return mpmath.mpc(1)
            return mpmath.mpf(mult * _sigma_table(k, n)[n - 1]) * q ** n

        def tail(n: int) -> mpmath.mpf:
            # sigma_k(m) <= m^(k+1); ratio bound for m >= n+1
            m = n + 1
            lead = abs(mult) * mpmath.mpf(m) ** (k + 1) * qa ** m
            ratio = qa * (mpmath.mpf(m + 1) / m) ** (k + 1)
            if ratio >= 1:
                return mpmath.inf
            return lead / (1 - ratio)

        return sum_series(term, tail, pol, min_terms=2).value


@dataclass(frozen=True)
class EllipticValues:
    E4: mpmath.mpc
    E6: mpmath.mpc
    Delta: mpmath.mpc
    J: mpmath.mpc


def eisenstein_and_J(z, policy: PrecisionPolicy | None = None) -> EllipticValues:
    """E4, E6, the weight-12 discriminant G2^3 - 27 G3^2, and J = E4^3/(E4^3-E6^2)."""
    with working_precision(policy) as pol:
        e4 = _eisenstein_value(4, z, pol)
        e6 = _eisenstein_value(6, z, pol)
        diff = e4 ** 3 - e6 ** 2
        delta = (64 * mpmath.pi ** 12 / 27) * diff
        return EllipticValues(E4=e4, E6=e6, Delta=delta, J=e4 ** 3 / diff)


def theta_delta_identity(z, policy: PrecisionPolicy | None = None) -> mpmath.mpf:
    """Relative residual of (1/1728)(3/(4 pi^4))^3 Delta = 2^-8 (t00 t01 t10)^8."""
    with working_precision(policy) as pol:
        vals = eisenstein_and_J(z, pol)
        lhs = (mpmath.mpf(3) / (4 * mpmath.pi ** 4)) ** 3 * vals.Delta / 1728
        prod = (jacobi_theta("00", z, pol) * jacobi_theta("01", z, pol)
                * jacobi_theta("10", z, pol))
        rhs = prod ** 8 / 256
        return abs(lhs - rhs) / max(abs(lhs), abs(rhs))
