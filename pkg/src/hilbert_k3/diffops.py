"""Univariate linear differential operators over Q(t): composition, indicial
equations, and exact Frobenius series solutions (with log terms at resonances).

Everything here is exact rational arithmetic; truncation orders of formal
series are explicit and arithmetic never reads past them.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .polynomials import RationalFunction, SparsePoly, poly_lcm, squarefree_decomposition


class IrregularSingular(Exception):
    """Pole orders exceed the Fuchs bounds at the requested point."""


class NonRationalRoot(Exception):
    """The indicial polynomial has an irreducible factor of degree > 1 over Q."""


INFINITY = "infinity"


def _dense(p: SparsePoly) -> list[Fraction]:
    """Dense coefficient list of a univariate polynomial."""
    if len(p.vars) != 1:
        raise ValueError("dense form needs a univariate polynomial")
    out = [Fraction(0)] * (p.total_degree() + 1)
    for expo, coeff in p.terms.items():
        out[expo[0]] = coeff
    return out


# --------------------------------------------------------------- formal series


class FormalSeries:
    """t^expo * (c_0 + c_1 t + ...), known modulo t^prec (prec = expo + len)."""

    __slots__ = ("var", "expo", "coeffs", "prec")

    def __init__(self, var: str, expo: Fraction, coeffs: Sequence[Fraction],
                 prec: Fraction | None = None):
        self.var = var
        self.expo = Fraction(expo)
        self.coeffs = [Fraction(c) for c in coeffs]
        self.prec = self.expo + len(self.coeffs) if prec is None else Fraction(prec)

    @classmethod
    def zero(cls, var: str, prec) -> "FormalSeries":
        return cls(var, Fraction(0), [], prec=prec)

    def copy(self) -> "FormalSeries":
        return FormalSeries(self.var, self.expo, list(self.coeffs), self.prec)

    def known_length(self) -> int:
        return len(self.coeffs)

    def is_zero_to_precision(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def valuation(self) -> Fraction:
        for n, c in enumerate(self.coeffs):
            if c != 0:
                return self.expo + n
        return self.prec

    def coefficient(self, exponent) -> Fraction:
        """Coefficient of t^exponent (must be below the precision)."""
        exponent = Fraction(exponent)
        if exponent >= self.prec:
            raise ValueError("coefficient beyond truncation order")
        n = exponent - self.expo
        if n.denominator != 1 or n < 0:
            return Fraction(0)
        n = int(n)
        return self.coeffs[n] if n < len(self.coeffs) else Fraction(0)

    def _aligned(self, other: "FormalSeries") -> tuple["FormalSeries", "FormalSeries"]:
        shift = self.expo - other.expo
        if shift.denominator != 1:
            raise ValueError("cannot add series with non-integer exponent offset")
        expo = min(self.expo, other.expo)
        a = [Fraction(0)] * int(self.expo - expo) + self.coeffs
        b = [Fraction(0)] * int(other.expo - expo) + other.coeffs
        prec = min(self.prec, other.prec)
        n = int(prec - expo)
        a = (a + [Fraction(0)] * n)[:n]
        b = (b + [Fraction(0)] * n)[:n]
        return (FormalSeries(self.var, expo, a, prec),
                FormalSeries(self.var, expo, b, prec))

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        a, b = self._aligned(other)
        return FormalSeries(self.var, a.expo,
                            [x + y for x, y in zip(a.coeffs, b.coeffs)], a.prec)

    def __sub__(self, other: "FormalSeries") -> "FormalSeries":
        a, b = self._aligned(other)
        return FormalSeries(self.var, a.expo,
                            [x - y for x, y in zip(a.coeffs, b.coeffs)], a.prec)

    def __neg__(self) -> "FormalSeries":
        return FormalSeries(self.var, self.expo, [-c for c in self.coeffs], self.prec)

    def scale(self, c) -> "FormalSeries":
        c = Fraction(c)
        return FormalSeries(self.var, self.expo, [c * x for x in self.coeffs], self.prec)

    def shift_exponent(self, k) -> "FormalSeries":
        k = Fraction(k)
        return FormalSeries(self.var, self.expo + k, list(self.coeffs), self.prec + k)

    def __mul__(self, other: "FormalSeries") -> "FormalSeries":
        prec = min(self.prec + other.valuation(), other.prec + self.valuation())
        expo = self.expo + other.expo
        n = int(math.ceil(prec - expo))
        if n <= 0:
            return FormalSeries(self.var, expo, [], prec)
        out = [Fraction(0)] * n
        for i, a in enumerate(self.coeffs):
            if a == 0 or i >= n:
                continue
            top = min(len(other.coeffs), n - i)
            for j in range(top):
                b = other.coeffs[j]
                if b:
                    out[i + j] += a * b
        return FormalSeries(self.var, expo, out, prec)

    def derivative(self) -> "FormalSeries":
        coeffs = [(self.expo + n) * c for n, c in enumerate(self.coeffs)]
        return FormalSeries(self.var, self.expo - 1, coeffs, self.prec - 1)

    def multiply_poly(self, p: SparsePoly) -> "FormalSeries":
        dense = _dense(p)
        if not dense:
            return FormalSeries(self.var, self.expo, [Fraction(0)] * len(self.coeffs),
                                self.prec + 0)
        val = next(i for i, c in enumerate(dense) if c != 0)
        prec = self.prec + val
        n = len(self.coeffs) + len(dense) - 1
        out = [Fraction(0)] * n
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(dense):
                if b:
                    out[i + j] += a * b
        keep = int(prec - self.expo)
        return FormalSeries(self.var, self.expo, out[:keep], prec)

    def multiply_rational(self, f: RationalFunction) -> "FormalSeries":
        if f.is_zero():
            return FormalSeries(self.var, self.expo,
                                [Fraction(0)] * len(self.coeffs), self.prec)
        num = self.multiply_poly(f.num)
        dense = _dense(f.den)
        v = next(i for i, c in enumerate(dense) if c != 0)
        unit = dense[v:]
        shifted = num.shift_exponent(-v)
        # power-series inversion of the unit factor, to the known length
        n = len(shifted.coeffs)
        inv = [Fraction(0)] * n
        if n:
            inv[0] = 1 / unit[0]
            for k in range(1, n):
                acc = Fraction(0)
                for j in range(1, min(k, len(unit) - 1) + 1):
                    acc += unit[j] * inv[k - j]
                inv[k] = -acc / unit[0]
        out = [Fraction(0)] * n
        for i, a in enumerate(shifted.coeffs):
            if a == 0:
                continue
            for j in range(n - i):
                if inv[j]:
                    out[i + j] += a * inv[j]
        return FormalSeries(self.var, shifted.expo, out, shifted.prec)

    def __repr__(self) -> str:
        bits = [f"{c}*{self.var}^{self.expo + n}" for n, c in enumerate(self.coeffs) if c]
        body = " + ".join(bits) if bits else "0"
        return f"{body} + O({self.var}^{self.prec})"


class LogSeries:
    """Finite sum over l of series_l(t) * log(t)^l with exact series components."""

    __slots__ = ("var", "parts")

    def __init__(self, var: str, parts: dict[int, FormalSeries]):
        self.var = var
        self.parts = {l: s for l, s in parts.items() if s.coeffs or True}

    @classmethod
    def from_series(cls, s: FormalSeries) -> "LogSeries":
        return cls(s.var, {0: s})

    def log_degree(self) -> int:
        live = [l for l, s in self.parts.items() if not s.is_zero_to_precision()]
        return max(live) if live else 0

    def component(self, l: int) -> FormalSeries | None:
        return self.parts.get(l)

    def is_zero_to_precision(self) -> bool:
        return all(s.is_zero_to_precision() for s in self.parts.values())

    def __add__(self, other: "LogSeries") -> "LogSeries":
        out = dict(self.parts)
        for l, s in other.parts.items():
            out[l] = out[l] + s if l in out else s
        return LogSeries(self.var, out)

    def __sub__(self, other: "LogSeries") -> "LogSeries":
        return self + other.scale(-1)

    def scale(self, c) -> "LogSeries":
        return LogSeries(self.var, {l: s.scale(c) for l, s in self.parts.items()})

    def __mul__(self, other: "LogSeries") -> "LogSeries":
        out: dict[int, FormalSeries] = {}
        for l1, s1 in self.parts.items():
            for l2, s2 in other.parts.items():
                prod = s1 * s2
                key = l1 + l2
                out[key] = out[key] + prod if key in out else prod
        return LogSeries(self.var, out)

    def multiply_rational(self, f: RationalFunction) -> "LogSeries":
        return LogSeries(self.var, {l: s.multiply_rational(f) for l, s in self.parts.items()})

    def derivative(self) -> "LogSeries":
        # d/dt (f log^l) = f' log^l + l f t^-1 log^(l-1)
        out: dict[int, FormalSeries] = {}
        for l, s in self.parts.items():
            d = s.derivative()
            out[l] = out[l] + d if l in out else d
            if l >= 1:
                lower = s.shift_exponent(-1).scale(l)
                out[l - 1] = out[l - 1] + lower if l - 1 in out else lower
        return LogSeries(self.var, out)

    def __repr__(self) -> str:
        bits = [f"log^{l}*({s!r})" for l, s in sorted(self.parts.items())]
        return " + ".join(bits) if bits else "0"


# --------------------------------------------------------------- the operator


class DiffOperator:
    """sum_k coeffs[k] * d^k/dt^k with rational-function coefficients."""

    __slots__ = ("var", "coeffs")

    def __init__(self, var: str, coeffs: Sequence[RationalFunction]):
        coeffs = list(coeffs)
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        if not coeffs:
            raise ValueError("zero operator")
        self.var = var
        self.coeffs = coeffs

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def from_fractions(cls, var: str, entries: Sequence) -> "DiffOperator":
        """Build from constants / SparsePoly / RationalFunction entries."""
        out = []
        for e in entries:
            if isinstance(e, RationalFunction):
                out.append(e)
            elif isinstance(e, SparsePoly):
                out.append(RationalFunction.from_poly(e))
            else:
                out.append(RationalFunction.from_const((var,), e))
        return cls(var, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return (self.var == other.var and len(self.coeffs) == len(other.coeffs)
                and all(a == b for a, b in zip(self.coeffs, other.coeffs)))

    def __hash__(self):
        return hash((self.var, tuple(self.coeffs)))

    def monic(self) -> "DiffOperator":
        lead = self.coeffs[-1]
        return DiffOperator(self.var, [c / lead for c in self.coeffs])

    def cleared(self) -> list[SparsePoly]:
        """Polynomial coefficients after multiplying by the denominator lcm,
        normalised to primitive with positive leading coefficient."""
        den = SparsePoly.const((self.var,), 1)
        for c in self.coeffs:
            den = poly_lcm(den, c.den)
        polys = []
        for c in self.coeffs:
            polys.append(c.num * den.divide_exact(c.den))
        content = polys[-1].content()
        if polys[-1].leading()[1] < 0:
            content = -content
        return [p * (1 / content) for p in polys]

    # ---------------------------------------------------------- application

    def apply(self, f):
        """Apply to a FormalSeries or LogSeries, exactly."""
        if isinstance(f, FormalSeries):
            f = LogSeries.from_series(f)
        total: LogSeries | None = None
        d = f
        for k, c in enumerate(self.coeffs):
            if k > 0:
                d = d.derivative()
            if c.is_zero():
                continue
            term = d.multiply_rational(c)
            total = term if total is None else total + term
        assert total is not None
        return total

    def apply_rational(self, f: RationalFunction) -> RationalFunction:
        """Apply to a rational function of t (for property tests)."""
        total = RationalFunction.from_const((self.var,), 0)
        d = f
        for k, c in enumerate(self.coeffs):
            if k > 0:
                d = d.derivative(self.var)
            total = total + c * d
        return total

    def compose(self, other: "DiffOperator") -> "DiffOperator":
        """(self o other) u = self(other(u)), by Leibniz expansion."""
        if self.var != other.var:
            raise ValueError("operators in different variables")
        zero = RationalFunction.from_const((self.var,), 0)
        result = [zero] * (self.order + other.order + 1)
        # D^k applied to other's coefficient row
        row = list(other.coeffs)
        for k, p_k in enumerate(self.coeffs):
            if k > 0:
                new_row = [zero] * (len(row) + 1)
                for j, b in enumerate(row):
                    new_row[j] = new_row[j] + b.derivative(self.var)
                    new_row[j + 1] = new_row[j + 1] + b
                row = new_row
            if p_k.is_zero():
                continue
            for j, b in enumerate(row):
                result[j] = result[j] + p_k * b
        return DiffOperator(self.var, result)

    # ------------------------------------------------- variable substitutions

    def rescale_variable(self, factor) -> "DiffOperator":
        """Return the operator in s where t = factor * s (same variable name)."""
        factor = Fraction(factor)
        sub = SparsePoly.variable((self.var,), self.var) * factor
        out = []
        for k, c in enumerate(self.coeffs):
            out.append(c.compose(self.var, sub) * Fraction(1, factor ** k))
        return DiffOperator(self.var, out)

    def invert_variable(self) -> "DiffOperator":
        """Return the operator in s where t = 1/s (d/dt = -s^2 d/ds)."""
        var = self.var
        s = SparsePoly.variable((var,), var)
        zero = RationalFunction.from_const((var,), 0)
        minus_s2 = RationalFunction.from_poly(-(s * s))

        def sub_inv(f: RationalFunction) -> RationalFunction:
            dn = f.num.degree_in(var)
            dd = f.den.degree_in(var)
            m = max(dn, dd)
            rev_num = SparsePoly((var,), {(m - e[0],): c for e, c in f.num.terms.items()})
            rev_den = SparsePoly((var,), {(m - e[0],): c for e, c in f.den.terms.items()})
            return RationalFunction(rev_num, rev_den)

        # (-s^2 D)^k built iteratively as rows of rational coefficients
        result = [zero] * (self.order + 1)
        row = [RationalFunction.from_const((var,), 1)]  # identity operator
        for k, c in enumerate(self.coeffs):
            if k > 0:
                new_row = [zero] * (len(row) + 1)
                for j, b in enumerate(row):
                    new_row[j] = new_row[j] + minus_s2 * b.derivative(var)
                    new_row[j + 1] = new_row[j + 1] + minus_s2 * b
                row = new_row
            if c.is_zero():
                continue
            cc = sub_inv(c)
            for j, b in enumerate(row):
                result[j] = result[j] + cc * b
        return DiffOperator(var, result)

    def rename_variable(self, new: str) -> "DiffOperator":
        out = []
        for c in self.coeffs:
            num = SparsePoly((new,), dict(c.num.terms))
            den = SparsePoly((new,), dict(c.den.terms))
            out.append(RationalFunction(num, den, reduce=False))
        return DiffOperator(new, out)

    def shift_variable(self, c) -> "DiffOperator":
        """Return the operator in s where t = s + c."""
        c = Fraction(c)
        if c == 0:
            return self
        out = [coeff.compose(self.var,
                             SparsePoly.variable((self.var,), self.var)
                             + SparsePoly.const((self.var,), c))
               for coeff in self.coeffs]
        return DiffOperator(self.var, out)

    def __repr__(self) -> str:
        bits = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            bits.append(f"({c!r})*D^{k}")
        return " + ".join(reversed(bits))


# ------------------------------------------------------------ indicial theory


def _theta_form(op: DiffOperator) -> tuple[list[SparsePoly], int]:
    """Write the operator as sum_j t^j q_j(theta) (theta = t d/dt).

    Returns (q_0..q_J as polynomials in one variable 'rho', shift s) where the
    operator was premultiplied by t^s / (content) to clear Laurent terms.
    """
    var = op.var
    polys = op.cleared()
    s = max(k - p.valuation_in(var) for k, p in enumerate(polys) if not p.is_zero())
    rho = ("rho",)
    # falling factorials rho (rho-1) ... (rho-k+1)
    ff = [SparsePoly.const(rho, 1)]
    x = SparsePoly.variable(rho, "rho")
    for k in range(1, len(polys)):
        ff.append(ff[-1] * (x - SparsePoly.const(rho, k - 1)))
    max_j = max((p.degree_in(var) - k + s) for k, p in enumerate(polys) if not p.is_zero())
    q = [SparsePoly.zero(rho) for _ in range(max_j + 1)]
    for k, p in enumerate(polys):
        for expo, coeff in p.terms.items():
            j = expo[0] - k + s
            if j < 0:
                raise IrregularSingular(
                    f"pole order too high at t=0 (term k={k}, degree {expo[0]})")
            q[j] = q[j] + ff[k] * coeff
    return q, s


def _rational_roots(p: SparsePoly) -> list[tuple[Fraction, int]]:
    """All roots of a univariate rational polynomial, with multiplicity.

    Raises NonRationalRoot when an irreducible non-linear factor remains.
    Roots are located numerically on the squarefree parts, rationalised, and
    verified exactly.
    """
    import numpy as np

    out: list[tuple[Fraction, int]] = []
    for factor, mult in squarefree_decomposition(p, p.vars[0]):
        dense = _dense(factor)
        deg = len(dense) - 1
        remaining = factor
        found = 0
        if deg >= 1:
            npcoeffs = [float(c) for c in reversed(dense)]
            candidates = np.roots(npcoeffs)
            seen: set[Fraction] = set()
            for r in candidates:
                if abs(r.imag) > 1e-6:
                    continue
                x = float(r.real)
                for denom_cap in (10 ** 3, 10 ** 6, 10 ** 9):
                    cand = Fraction(x).limit_denominator(denom_cap)
                    if abs(float(cand) - x) > 1e-6 or cand in seen:
                        continue
                    if remaining.evaluate({p.vars[0]: cand}) == 0:
                        seen.add(cand)
                        out.append((cand, mult))
                        found += 1
                        root_poly = (SparsePoly.variable(p.vars, p.vars[0])
                                     - SparsePoly.const(p.vars, cand))
                        remaining = remaining.divide_exact(root_poly)
                        break
        if remaining.total_degree() > 0:
            raise NonRationalRoot(f"irrational indicial factor: {remaining!r}")
    return out


def indicial_exponents(op: DiffOperator, point) -> list[Fraction]:
    """Sorted indicial exponents (with multiplicity) at a finite rational point
    or at the string 'infinity'.  Raises IrregularSingular / NonRationalRoot."""
    local = op.invert_variable() if point == INFINITY else op.shift_variable(point)
    q, _ = _theta_form(local)
    q0 = q[0]
    if q0.total_degree() < local.order:
        raise IrregularSingular(
            f"indicial polynomial degenerates at {point} (irregular singularity)")
    roots: list[Fraction] = []
    for root, mult in _rational_roots(q0):
        roots.extend([root] * mult)
    return sorted(roots)


# ------------------------------------------------------------- Frobenius jets


class _Jet:
    """Truncated Taylor expansion in a formal epsilon, exact over Q."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Fraction]):
        self.coeffs = [Fraction(c) for c in coeffs]

    @classmethod
    def const(cls, value, length: int) -> "_Jet":
        return cls([Fraction(value)] + [Fraction(0)] * (length - 1))

    @classmethod
    def linear(cls, value, length: int) -> "_Jet":
        # value + epsilon
        out = [Fraction(value)] + [Fraction(0)] * (length - 1)
        if length > 1:
            out[1] = Fraction(1)
        return cls(out)

    def __len__(self):
        return len(self.coeffs)

    def truncate(self, n: int) -> "_Jet":
        return _Jet(self.coeffs[:n])

    def __add__(self, other: "_Jet") -> "_Jet":
        n = min(len(self), len(other))
        return _Jet([a + b for a, b in zip(self.coeffs[:n], other.coeffs[:n])])

    def __neg__(self) -> "_Jet":
        return _Jet([-c for c in self.coeffs])

    def __sub__(self, other: "_Jet") -> "_Jet":
        return self + (-other)

    def __mul__(self, other: "_Jet") -> "_Jet":
        n = min(len(self), len(other))
        out = [Fraction(0)] * n
        for i, a in enumerate(self.coeffs[:n]):
            if a == 0:
                continue
            for j in range(n - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] += a * b
        return _Jet(out)

    def divide(self, other: "_Jet") -> "_Jet":
        """Division allowing a common epsilon valuation in both jets."""
        v = 0
        while v < len(other) and other.coeffs[v] == 0:
            v += 1
        if v == len(other):
            raise ZeroDivisionError("division by zero jet")
        for i in range(min(v, len(self))):
            if self.coeffs[i] != 0:
                raise ValueError("jet division would produce a pole")
        num = self.coeffs[v:]
        den = other.coeffs[v:]
        n = min(len(num), len(den))
        out = [Fraction(0)] * n
        for k in range(n):
            acc = num[k]
            for j in range(1, k + 1):
                acc -= den[j] * out[k - j]
            out[k] = acc / den[0]
        return _Jet(out)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)


def _eval_poly_at_jet(p: SparsePoly, jet: _Jet) -> _Jet:
    dense = _dense(p) if not p.is_zero() else [Fraction(0)]
    result = _Jet.const(0, len(jet))
    for c in reversed(dense):
        result = result * jet + _Jet.const(c, len(jet))
    return result


def series_solve(op: DiffOperator, point, order: int) -> list[LogSeries]:
    """Exact Frobenius basis at a regular singular (or ordinary) rational point.

    Each element is a LogSeries in the local variable t - point; substituting
    back into the operator gives a residual that vanishes to the truncation
    order.  Solutions at exponent collisions carry explicit log components.
    """
    local = op.shift_variable(point) if point != 0 else op
    q, _ = _theta_form(local)
    q0 = q[0]
    if q0.total_degree() < local.order:
        raise IrregularSingular(f"irregular singular point {point}")
    roots = _rational_roots(q0)

    # group roots into integer-difference classes
    classes: list[list[tuple[Fraction, int]]] = []
    for root, mult in sorted(roots):
        for cls in classes:
            if (root - cls[0][0]).denominator == 1:
                cls.append((root, mult))
                break
        else:
            classes.append([(root, mult)])

    var = local.var
    solutions: list[LogSeries] = []
    for cls in classes:
        cls_sorted = sorted(cls, key=lambda rm: rm[0], reverse=True)
        collected: list[LogSeries] = []
        basis_rows: list[dict] = []  # echelon data over (n, l) keys
        r_min = cls_sorted[-1][0]
        for idx, (root, mult) in enumerate(cls_sorted):
            above = sum(m for r, m in cls_sorted[:idx])
            jet_len = 2 * above + mult + 4
            n_terms = order + int(max(r for r, _ in cls_sorted) - root) + 1
            # coefficient jets c_n(root + eps), with c_0 = eps^above
            c0 = _Jet.const(1, jet_len)
            eps = _Jet([Fraction(0), Fraction(1)] + [Fraction(0)] * (jet_len - 2))
            for _ in range(above):
                c0 = c0 * eps
            coeffs_jets = [c0]
            for n in range(1, n_terms):
                s_jet = _Jet.linear(root + n, len(coeffs_jets[0]))
                acc = _Jet.const(0, len(coeffs_jets[n - 1]))
                for j in range(1, min(n, len(q) - 1) + 1):
                    prev = coeffs_jets[n - j]
                    qj = _eval_poly_at_jet(q[j], _Jet.linear(root + n - j, len(prev)))
                    acc = acc + qj.truncate(len(prev)) * prev
                q0_jet = _eval_poly_at_jet(q0, s_jet)
                coeffs_jets.append((-acc).divide(q0_jet.truncate(len(acc))))
            usable = min(len(j) for j in coeffs_jets)
            for k in range(min(above + mult, usable)):
                if len(collected) >= sum(m for _, m in cls_sorted):
                    break
                # candidate solution: sum_l log^l / l! * sum_n c_n^{(k-l)}/(k-l)! t^(root+n)
                parts: dict[int, FormalSeries] = {}
                for l in range(0, k + 1):
                    d = k - l
                    series = [cj.coeffs[d] if d < len(cj) else Fraction(0)
                              for cj in coeffs_jets]
                    comp = FormalSeries(var, root, series).scale(Fraction(1, math.factorial(l)))
                    parts[l] = comp
                cand = LogSeries(var, parts)
                if cand.is_zero_to_precision():
                    continue
                if _reduce_against(cand, basis_rows, r_min, order):
                    collected.append(cand)
        solutions.extend(collected)

    if len(solutions) != local.order:
        raise RuntimeError(
            f"Frobenius basis incomplete: got {len(solutions)} of {local.order}")
    return solutions


def _reduce_against(cand: LogSeries, basis_rows: list[dict], r_min: Fraction,
                    order: int) -> bool:
    """Echelon-style independence test on (t-power, log-power) coefficients.

    Mutates basis_rows when the candidate is independent; returns that verdict.
    """
    vec: dict = {}
    for l, s in cand.parts.items():
        for n, c in enumerate(s.coeffs):
            if c != 0 and (s.expo - r_min + n) <= order:
                vec[(s.expo + n, l)] = c
    for row in basis_rows:
        pivot = row["pivot"]
        if pivot in vec and vec[pivot] != 0:
            factor = vec[pivot] / row["vec"][pivot]
            for key, val in row["vec"].items():
                vec[key] = vec.get(key, Fraction(0)) - factor * val
                if vec[key] == 0:
                    del vec[key]
    vec = {k: v for k, v in vec.items() if v != 0}
    if not vec:
        return False
    pivot = min(vec)
    basis_rows.append({"pivot": pivot, "vec": vec})
    basis_rows.sort(key=lambda r: r["pivot"])
    return True
