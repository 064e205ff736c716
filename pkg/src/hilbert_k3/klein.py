"""The four icosahedral invariant polynomials on P^2 and their degree-30
relation, built exactly over Q and checked by full sparse expansion."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .numkernel import PrecisionPolicy, to_mpc, working_precision
from .polynomials import SparsePoly

ZETA_VARS = ("z0", "z1", "z2")


class DegenerateChart(Exception):
    """The affine chart A != 0 degenerates at the requested point."""


@dataclass(frozen=True)
class IcosahedralInvariants:
    A: SparsePoly
    B: SparsePoly
    C: SparsePoly
    D: SparsePoly  # coefficients in (1/12) Z


_CACHE: IcosahedralInvariants | None = None


def build_invariants() -> IcosahedralInvariants:
    """Exact transcription of the degree 2/6/10/15 invariants.

    The degree-15 polynomial is stated as 12*D; we divide by 12 once here so
    downstream formulas can use D itself.
    """
    global _CACHE
    if _CACHE is not None:
        return _CACHE
    V = ZETA_VARS
    z0 = SparsePoly.variable(V, "z0")
    z1 = SparsePoly.variable(V, "z1")
    z2 = SparsePoly.variable(V, "z2")

    A = z0 ** 2 + z1 * z2

    B = (8 * z0 ** 4 * z1 * z2
         - 2 * z0 ** 2 * z1 ** 2 * z2 ** 2
         + z1 ** 3 * z2 ** 3
         - z0 * (z1 ** 5 + z2 ** 5))

    C = (320 * z0 ** 6 * z1 ** 2 * z2 ** 2
         - 160 * z0 ** 4 * z1 ** 3 * z2 ** 3
         + 20 * z0 ** 2 * z1 ** 4 * z2 ** 4
         + 6 * z1 ** 5 * z2 ** 5
         - 4 * z0 * (z1 ** 5 + z2 ** 5)
         * (32 * z0 ** 4 - 20 * z0 ** 2 * z1 * z2 + 5 * z1 ** 2 * z2 ** 2)
         + z1 ** 10 + z2 ** 10)

    twelve_D = ((z1 ** 5 - z2 ** 5)
                * (-1024 * z0 ** 10 + 3840 * z0 ** 8 * z1 * z2
                   - 3840 * z0 ** 6 * z1 ** 2 * z2 ** 2
                   + 1200 * z0 ** 4 * z1 ** 3 * z2 ** 3
                   - 100 * z0 ** 2 * z1 ** 4 * z2 ** 4
                   + z1 ** 5 * z2 ** 5)
                + z0 * (z1 ** 10 - z2 ** 10)
                * (352 * z0 ** 4 - 160 * z0 ** 2 * z1 * z2 + 10 * z1 ** 2 * z2 ** 2)
                + (z1 ** 15 - z2 ** 15))
    D = twelve_D * Fraction(1, 12)

    _CACHE = IcosahedralInvariants(A=A, B=B, C=C, D=D)
    return _CACHE


def klein_relation_poly(A: SparsePoly, B: SparsePoly, C: SparsePoly,
                        D: SparsePoly) -> SparsePoly:
    """R = 144 D^2 - (-1728 B^5 + 720 A C B^3 - 80 A^2 C^2 B
    + 64 A^3 (5 B^2 - A C)^2 + C^3)."""
    five_b2_ac = 5 * B ** 2 - A * C
    bracket = (-1728 * B ** 5
               + 720 * A * C * B ** 3
               - 80 * A ** 2 * C ** 2 * B
               + 64 * A ** 3 * five_b2_ac ** 2
               + C ** 3)
    return 144 * D ** 2 - bracket


def verify_klein_relation(inv: IcosahedralInvariants | None = None) -> dict:
    """Expand the relation in the projective coordinates; exact zero expected."""
    inv = inv or build_invariants()
    residual = klein_relation_poly(inv.A, inv.B, inv.C, inv.D)
    return {
        "exact_zero": residual.is_zero(),
        "residual_poly": residual,
        "term_counts": {
            "A": inv.A.term_count(),
            "B": inv.B.term_count(),
            "C": inv.C.term_count(),
            "D": inv.D.term_count(),
        },
    }


def swap_z1_z2(p: SparsePoly) -> SparsePoly:
    """Apply the coordinate swap z1 <-> z2 to the sparse representation."""
    out = {}
    for (e0, e1, e2), coeff in p.terms.items():
        out[(e0, e2, e1)] = coeff
    return SparsePoly(p.vars, out)


def affine_coords(zeta, policy: PrecisionPolicy | None = None):
    """(X, Y, Z) = (B/A^3, C/A^5, D^2/A^15) at a complex projective point."""
    inv = build_invariants()
    with working_precision(policy) as pol:
        vals = {"z0": to_mpc(zeta[0]), "z1": to_mpc(zeta[1]), "z2": to_mpc(zeta[2])}
        a = inv.A.evaluate(vals)
        scale = max(abs(vals["z0"]), abs(vals["z1"]), abs(vals["z2"]), mpmath.mpf(1))
        if abs(a) < mpmath.mpf(pol.series_tol) * scale ** 2:
            raise DegenerateChart("icosahedral A vanishes at this point")
        b = inv.B.evaluate(vals)
        c = inv.C.evaluate(vals)
        d = inv.D.evaluate(vals)
        return b / a ** 3, c / a ** 5, d ** 2 / a ** 15
