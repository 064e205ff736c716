"""The one-parameter period story: the Gauss equation with parameters
(1/12, 5/12; 1), the restricted fourth-order equation in the moduli coordinate,
its factorization W4 = W1 o W3, symmetric-square solutions, the Clausen-type
series identities, the Schwarz map branch on (0, 1), and the inverse-period
identity X(z, z) * J(z) = 25/27."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from .diffops import DiffOperator, FormalSeries, LogSeries, series_solve
from .elliptic import eisenstein_and_J
from .moduli import moduli_XYZ
from .numkernel import NonConvergent, PrecisionPolicy, to_mpc, working_precision
from .polynomials import RationalFunction, SparsePoly

T = ("t",)
XV = ("X",)


class NoSchwarzConvergence(Exception):
    pass


@dataclass(frozen=True)
class HypergeomParams:
    upper: tuple[Fraction, ...]
    lower: tuple[Fraction, ...]

    def __post_init__(self):
        for b in self.lower:
            if b.denominator == 1 and b <= 0:
                raise ValueError(f"lower parameter {b} is a nonpositive integer")


def hypergeom_coefficients(upper: Sequence, lower: Sequence, order: int) -> list[Fraction]:
    """Exact Taylor coefficients of pFq through t^order (inclusive)."""
    params = HypergeomParams(tuple(Fraction(a) for a in upper),
                             tuple(Fraction(b) for b in lower))
    out = [Fraction(1)]
    for n in range(order):
        c = out[-1]
        for a in params.upper:
            c *= a + n
        for b in params.lower:
            c /= b + n
        c /= n + 1
        out.append(c)
    return out


def hypergeom_value(upper: Sequence, lower: Sequence, t,
                    policy: PrecisionPolicy | None = None) -> mpmath.mpc:
    """pFq(t) for |t| < 1 by the Pochhammer recurrence with a ratio tail bound."""
    params = HypergeomParams(tuple(Fraction(a) for a in upper),
                             tuple(Fraction(b) for b in lower))
    with working_precision(policy) as pol:
        tc = to_mpc(t)
        ta = abs(tc)
        if ta >= 1:
            raise NonConvergent(f"series evaluation needs |t| < 1, got {ta}")
        term = mpmath.mpc(1)
        total = mpmath.mpc(0)
        tol = mpmath.mpf(pol.series_tol)
        n = 0
        while True:
            total += term
            ratio = tc
            for a in params.upper:
                ratio *= to_mpc(a) + n
            for b in params.lower:
                ratio /= to_mpc(b) + n
            ratio /= n + 1
            term = term * ratio
            # |ratio| -> |t| from above; crude monotone majorant
            bound_ratio = ta
            for a in params.upper:
                bound_ratio *= (n + 1 + abs(to_mpc(a))) / (n + 1)
            if bound_ratio < 1 and abs(term) / (1 - bound_ratio) < tol:
                return total
            n += 1
            if n > pol.series_cap:
                raise NonConvergent("hypergeometric series did not converge")


# -------------------------------------------------------------- the operators


def _rf(num: SparsePoly, den: SparsePoly) -> RationalFunction:
    return RationalFunction(num, den)


def gauss_operator() -> DiffOperator:
    """t(1-t) u'' + (1 - (3/2) t) u' - (5/144) u."""
    t = SparsePoly.variable(T, "t")
    one = SparsePoly.const(T, 1)
    return DiffOperator("t", [
        RationalFunction.from_const(T, Fraction(-5, 144)),
        RationalFunction.from_poly(one - Fraction(3, 2) * t),
        RationalFunction.from_poly(t * (1 - t)),
    ])


def restricted_ode_X() -> DiffOperator:
    """The rank-4 restriction of the two-variable system to the locus Y = 0,
    in the moduli coordinate X (monic in d^4/dX^4)."""
    X = SparsePoly.variable(XV, "X")
    base = X * (81 * X ** 2 - 1155 * X + 1000)
    a3 = _rf(3 * (243 * X ** 2 - 4060 * X + 2000), 2 * base)
    a2 = _rf((2034 * X ** 2 - 40680 * X + 8000), 8 * X * base)
    a1 = _rf(15 * (3 * X - 80), 8 * X * base)
    zero = RationalFunction.from_const(XV, 0)
    one = RationalFunction.from_const(XV, 1)
    return DiffOperator("X", [zero, a1, a2, a3, one])


@dataclass(frozen=True)
class RestrictedODE:
    W4: DiffOperator
    W3: DiffOperator
    W1: DiffOperator
    restdiff3: DiffOperator


def build_restricted_operators() -> RestrictedODE:
    """W4, its factors W1 o W3, and the third-order equation satisfied by the
    derivatives of the periods; all in the rescaled coordinate t = 27 X / 25."""
    t = SparsePoly.variable(T, "t")
    core = t * (t - 1) * (5 * t - 72)
    one = RationalFunction.from_const(T, 1)
    zero = RationalFunction.from_const(T, 0)

    w4 = DiffOperator("t", [
        zero,
        _rf(25 * t - 720, 72 * t * core),
        _rf(565 * t ** 2 - 12204 * t + 2592, 36 * t * core),
        _rf(1620 * t ** 3 - 29232 * t ** 2 + 15552 * t, 72 * t * core),
        one,
    ])
    w3 = DiffOperator("t", [
        _rf(SparsePoly.const(T, 72) - 5 * t, 72 * t ** 3 * (t - 1)),
        _rf(5 * t - 36, 36 * t ** 2 * (t - 1)),
        _rf(SparsePoly.const(T, 3), 2 * (t - 1)),
        one,
    ])
    w1 = DiffOperator("t", [
        _rf(15 * t ** 2 - 298 * t + 216, t * (t - 1) * (5 * t - 72)),
        one,
    ])
    restdiff3 = DiffOperator("t", [
        _rf(25 * t - 720, 72 * t * core),
        _rf(1130 * t ** 2 - 24408 * t + 5184, 72 * t * core),
        _rf(1620 * t ** 3 - 29232 * t ** 2 + 15552 * t, 72 * t * core),
        one,
    ])
    ode = RestrictedODE(W4=w4, W3=w3, W1=w1, restdiff3=restdiff3)
    # the X <-> t = 27X/25 transport must reproduce W4 exactly
    transported = restricted_ode_X().rescale_variable(Fraction(25, 27))
    if transported.monic().rename_variable("t") != w4:
        raise AssertionError("t = 27 X / 25 transport does not reproduce W4")
    return ode


_RESTRICTED: RestrictedODE | None = None


def restricted_operators() -> RestrictedODE:
    global _RESTRICTED
    if _RESTRICTED is None:
        _RESTRICTED = build_restricted_operators()
    return _RESTRICTED


# ------------------------------------------------------- series verifications


def gauss_frobenius_basis(order: int) -> tuple[LogSeries, LogSeries]:
    """(holomorphic solution, log solution) of the Gauss equation at t = 0."""
    basis = series_solve(gauss_operator(), 0, order)
    holo = [b for b in basis if b.log_degree() == 0]
    logs = [b for b in basis if b.log_degree() == 1]
    if len(holo) != 1 or len(logs) != 1:
        raise RuntimeError("unexpected Frobenius structure for the Gauss equation")
    return holo[0], logs[0]


def verify_symmetric_square(order: int) -> dict:
    """W3 annihilates t * y_i * y_j for the Frobenius basis y_1, y_2, including
    the log components; and s2^2 = s1 s3 exactly."""
    if order < 10:
        raise ValueError("order must be >= 10")
    w3 = restricted_operators().W3
    y1, y2 = gauss_frobenius_basis(order + 6)

    def times_t(ls: LogSeries) -> LogSeries:
        return LogSeries(ls.var, {l: s.shift_exponent(1) for l, s in ls.parts.items()})

    s1 = times_t(y1 * y1)
    s2 = times_t(y1 * y2)
    s3 = times_t(y2 * y2)
    report = {}
    for name, s in (("t*y1^2", s1), ("t*y1*y2", s2), ("t*y2^2", s3)):
        res = w3.apply(s)
        comps = {l: c.is_zero_to_precision() for l, c in res.parts.items()}
        report[name] = {
            "annihilated": res.is_zero_to_precision(),
            "log_components_vanish": comps,
            "checked_order": min(int(c.prec) for c in res.parts.values()),
        }
    diff = s2 * s2 - s1 * s3
    report["s2^2 = s1*s3"] = diff.is_zero_to_precision()
    return report


def verify_clausen_and_S(order: int) -> dict:
    """Exact series identities around t = 0:
    3F2(1/6,1/2,5/6;1,1) = 2F1(1/12,5/12;1)^2 (Clausen),
    the displayed antiderivative identity, S annihilated by the third-order
    equation, and d/dt(antiderivative) = S."""
    if order < 10:
        raise ValueError("order must be >= 10")
    f16 = Fraction(1, 6)
    f12 = Fraction(1, 2)
    f56 = Fraction(5, 6)
    f76 = Fraction(7, 6)

    c2f1 = hypergeom_coefficients([Fraction(1, 12), Fraction(5, 12)], [1], order)
    sq = [sum(c2f1[i] * c2f1[n - i] for i in range(n + 1)) for n in range(order + 1)]
    c3f2 = hypergeom_coefficients([f16, f12, f56], [1, 1], order)
    clausen_exact = sq == c3f2

    lhs = [a + Fraction(1, 5) * b for a, b in zip(
        hypergeom_coefficients([f16, f12, f56], [1, 2], order),
        hypergeom_coefficients([f76, f12, f56], [1, 2], order))]
    rhs = [Fraction(6, 5) * c for c in c3f2]
    antiderivative_exact = lhs == rhs

    s_coeffs = [a + Fraction(1, 5) * b for a, b in zip(
        c3f2, hypergeom_coefficients([f76, f12, f56], [1, 1], order))]
    s_series = FormalSeries("t", Fraction(0), s_coeffs)
    resid = restricted_operators().restdiff3.apply(s_series)
    s_annihilated = resid.is_zero_to_precision()

    anti = FormalSeries("t", Fraction(1), [Fraction(6, 5) * c for c in c3f2])
    derivative_matches = (anti.derivative() - s_series).is_zero_to_precision()

    return {
        "clausen_exact_to_order": order if clausen_exact else -1,
        "clausen": clausen_exact,
        "antiderivative_identity": antiderivative_exact,
        "S_annihilated": s_annihilated,
        "S_checked_order": int(min(c.prec for c in resid.parts.values())),
        "derivative_consistency": derivative_matches,
    }


# ----------------------------------------------------------------- Schwarz map


def schwarz_map(t, policy: PrecisionPolicy | None = None) -> mpmath.mpc:
    """The branch of the inverse-J coordinate on (0, 1): purely imaginary z0
    with 1/J(z0) = t, Im z0 > 1, seeded from the leading q-expansion term."""
    with working_precision(policy) as pol:
        tf = mpmath.mpf(to_mpc(t).real)
        if not (0 < tf < 1):
            raise ValueError("the single-valued branch needs t in (0, 1)")
        target = 1 / tf
        y = mpmath.log(1728 / tf) / (2 * mpmath.pi)
        y = max(y, mpmath.mpf("1.0000001"))
        tol = mpmath.mpf(pol.verify_tol) * target

        def jval(yy):
            return eisenstein_and_J(mpmath.mpc(0, yy), pol).J.real

        # near t = 1 the target sits at a critical point of J (double root),
        # so Newton degrades to linear convergence; allow a generous budget
        f = jval(y) - target
        for _ in range(240):
            if abs(f) < tol:
                z0 = mpmath.mpc(0, y)
                if not (z0.imag > 1):
                    raise NoSchwarzConvergence(f"branch left Im > 1 at t = {tf}")
                return z0
            h = max(abs(y) * mpmath.mpf(2) ** (-pol.mantissa_bits // 4), mpmath.mpf(2) ** -60)
            df = (jval(y + h) - jval(y - h)) / (2 * h)
            step = f / df
            ynew = y - step
            fnew = jval(ynew) - target
            halvings = 0
            while abs(fnew) >= abs(f) and halvings < 8:
                step /= 2
                ynew = y - step
                fnew = jval(ynew) - target
                halvings += 1
            y, f = ynew, fnew
        raise NoSchwarzConvergence(f"no convergence at t = {tf}, residual {f}")


def verify_diagonal_inverse_identity(samples, policy: PrecisionPolicy | None = None) -> dict:
    """|X(z, z) * J(z) - 25/27| per diagonal sample point."""
    with working_precision(policy):
        target = mpmath.mpf(25) / 27
        residuals = {}
        for z in samples:
            zc = to_mpc(z)
            x, _, _ = moduli_XYZ((zc, zc), policy)
            j = eisenstein_and_J(zc, policy).J
            residuals[str(zc)] = abs(x * j - target)
        worst = max(residuals.values())
        return {"residuals": residuals, "max_residual": worst}
