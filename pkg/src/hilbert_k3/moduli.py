"""The moduli-side functions X, Y, Z expressed through the theta forms, their
invariance under the modular group, local Newton inversion of (z1, z2) from
(X, Y), and projective matching of point clouds in P^3."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .hilbert_theta import MuellerForms, UHPPair, as_pair, mueller_forms
from .numkernel import PrecisionPolicy, quadratic_constants, to_mpc, working_precision
from .polynomials import SparsePoly

# X = K1 s6/g2^3, Y = K2 s10/g2^5, Z = K3 s15^2/g2^15
K1 = 2 ** 5 * 5 ** 2
K2 = 2 ** 10 * 5 ** 5
K3 = Fraction(2 ** 26 * 5 ** 10, 9)

XY_VARS = ("X", "Y")


def _xy_polys():
    X = SparsePoly.variable(XY_VARS, "X")
    Y = SparsePoly.variable(XY_VARS, "Y")
    return X, Y


def k2_locus_poly() -> SparsePoly:
    """1728 X^5 - 720 X^3 Y + 80 X Y^2 - 64 (5 X^2 - Y)^2 - Y^3, whose zero set
    (together with Y = 0) bounds the good parameter region."""
    X, Y = _xy_polys()
    return (1728 * X ** 5 - 720 * X ** 3 * Y + 80 * X * Y ** 2
            - 64 * (5 * X ** 2 - Y) ** 2 - Y ** 3)


K2_LOCUS = k2_locus_poly()


class NearZeroDenominator(Exception):
    pass


class NoConvergence(Exception):
    pass


class JacobianSingular(Exception):
    pass


class RankDeficient(Exception):
    pass


@dataclass(frozen=True)
class ModuliPoint:
    X: mpmath.mpc
    Y: mpmath.mpc
    in_frak_x: bool


def classify_moduli_point(X, Y, policy: PrecisionPolicy | None = None) -> ModuliPoint:
    """Attach the open-region flag (Y != 0 and the quintic locus poly != 0)."""
    with working_precision(policy) as pol:
        Xc, Yc = to_mpc(X), to_mpc(Y)
        k2v = K2_LOCUS.evaluate({"X": Xc, "Y": Yc})
        scale = (1 + abs(Xc) + abs(Yc)) ** 5
        ok = abs(Yc) > pol.verify_tol and abs(k2v) > pol.verify_tol * scale
        return ModuliPoint(X=Xc, Y=Yc, in_frak_x=bool(ok))


def moduli_XYZ(p, policy: PrecisionPolicy | None = None,
               forms: MuellerForms | None = None):
    """(X, Y, Z) = (800 s6/g2^3, 3200000 s10/g2^5, (2^26 5^10/9) s15^2/g2^15)."""
    with working_precision(policy) as pol:
        f = forms if forms is not None else mueller_forms(p, policy)
        if abs(f.g2) < mpmath.mpf(2) ** (-pol.mantissa_bits // 2):
            raise NearZeroDenominator(f"|g2| = {abs(f.g2)} too small")
        g2_3 = f.g2 ** 3
        X = K1 * f.s6 / g2_3
        Y = K2 * f.s10 / g2_3 / f.g2 ** 2
        Z = to_mpc(K3) * f.s15 ** 2 / g2_3 ** 5
        return X, Y, Z


GENERATORS = ("g1", "g2", "g3", "tau")


def apply_generator(p, name: str, policy: PrecisionPolicy | None = None) -> UHPPair:
    """Action of the group generators on (z1, z2); the conjugate entry acts on
    the second slot."""
    pair = as_pair(p, policy)
    with working_precision(policy):
        z1, z2 = pair.z1, pair.z2
        if name == "g1":
            return UHPPair(z1 + 1, z2 + 1)
        if name == "g2":
            qc = quadratic_constants(policy)
            return UHPPair(z1 + qc.eps, z2 + qc.eps_conj)
        if name == "g3":
            return UHPPair(-1 / z1, -1 / z2)
        if name == "tau":
            return UHPPair(z2, z1)
    raise ValueError(f"unknown generator {name}")


def modular_invariance(p, generator: str,
                       policy: PrecisionPolicy | None = None) -> mpmath.mpf:
    """|X(g p) - X(p)| + |Y(g p) - Y(p)|, relative to 1 + |X| + |Y|."""
    with working_precision(policy):
        x0, y0, _ = moduli_XYZ(p, policy)
        q = apply_generator(p, generator, policy)
        x1, y1, _ = moduli_XYZ(q, policy)
        return (abs(x1 - x0) + abs(y1 - y0)) / (1 + abs(x0) + abs(y0))


# ------------------------------------------------------------ Newton inverse


@dataclass(frozen=True)
class InversionResult:
    z: UHPPair
    residual: mpmath.mpf
    iterations: int


def _xy(p, policy) -> tuple[mpmath.mpc, mpmath.mpc]:
    x, y, _ = moduli_XYZ(p, policy)
    return x, y


def newton_invert(target_X, target_Y, guess,
                  policy: PrecisionPolicy | None = None,
                  max_iter: int = 40,
                  tol=None) -> InversionResult:
    """Damped Newton for (X, Y)(z1, z2) = (X0, Y0), finite-difference Jacobian.

    Returns any preimage reproducing the target; the modular group ambiguity is
    accepted.  The default success threshold is half the working digits
    (finite-difference noise in rank-degenerate directions caps the reachable
    residual well above the raw arithmetic tolerance).  Raises JacobianSingular
    when the iteration stalls on a rank-deficient Jacobian, NoConvergence
    otherwise.
    """
    with working_precision(policy) as pol:
        X0, Y0 = to_mpc(target_X), to_mpc(target_Y)
        pair = as_pair(guess, policy)
        scale = 1 + abs(X0) + abs(Y0)
        if tol is None:
            tol = scale * mpmath.mpf(2) ** (-(pol.mantissa_bits // 2))
        else:
            tol = mpmath.mpf(tol)
        h = mpmath.mpf(2) ** (-(pol.mantissa_bits // 4))

        def F(pr: UHPPair):
            x, y = _xy(pr, pol)
            return x - X0, y - Y0

        def norm(f):
            return abs(f[0]) + abs(f[1])

        f = F(pair)
        for it in range(1, max_iter + 1):
            if norm(f) < tol:
                return InversionResult(z=pair, residual=norm(f), iterations=it - 1)
            z1, z2 = pair.z1, pair.z2
            cols = []
            for slot in (0, 1):
                dz = mpmath.mpc(h, 0)
                if slot == 0:
                    fp = F(UHPPair(z1 + dz, z2))
                    fm = F(UHPPair(z1 - dz, z2))
                else:
                    fp = F(UHPPair(z1, z2 + dz))
                    fm = F(UHPPair(z1, z2 - dz))
                cols.append(((fp[0] - fm[0]) / (2 * h), (fp[1] - fm[1]) / (2 * h)))
            a11, a21 = cols[0]
            a12, a22 = cols[1]
            det = a11 * a22 - a12 * a21
            jnorm = max(abs(a11), abs(a12), abs(a21), abs(a22))
            singular = abs(det) < mpmath.mpf(1e-12) * jnorm ** 2
            if singular:
                # rank-deficient Jacobian: ridge-regularised least-squares step;
                # it makes progress only when the residual lies in the range
                g11 = abs(a11) ** 2 + abs(a21) ** 2
                g12 = mpmath.conj(a11) * a12 + mpmath.conj(a21) * a22
                g22 = abs(a12) ** 2 + abs(a22) ** 2
                lam = mpmath.mpf(1e-24) * (g11 + g22) + mpmath.mpf(2) ** (-2 * pol.mantissa_bits)
                b1 = mpmath.conj(a11) * f[0] + mpmath.conj(a21) * f[1]
                b2 = mpmath.conj(a12) * f[0] + mpmath.conj(a22) * f[1]
                gdet = (g11 + lam) * (g22 + lam) - g12 * mpmath.conj(g12)
                d1 = (b1 * (g22 + lam) - g12 * b2) / gdet
                d2 = ((g11 + lam) * b2 - mpmath.conj(g12) * b1) / gdet
            else:
                d1 = (f[0] * a22 - a12 * f[1]) / det
                d2 = (a11 * f[1] - f[0] * a21) / det
            step = mpmath.mpf(1)
            improved = False
            for _ in range(12):
                try:
                    cand = UHPPair(z1 - step * d1, z2 - step * d2)
                except ValueError:
                    step /= 2
                    continue
                fc = F(cand)
                if norm(fc) < norm(f):
                    pair, f = cand, fc
                    improved = True
                    break
                step /= 2
            if not improved:
                if singular:
                    raise JacobianSingular(
                        f"rank-deficient Jacobian, no consistent progress "
                        f"(residual {norm(f)}, iteration {it})")
                raise NoConvergence(
                    f"damped Newton stalled at residual {norm(f)} (iteration {it})")
        if norm(f) < tol:
            return InversionResult(z=pair, residual=norm(f), iterations=max_iter)
        raise NoConvergence(f"no convergence after {max_iter} iterations, "
                            f"residual {norm(f)}")


def continuation_invert(target_X, target_Y, seed_pair,
                        policy: PrecisionPolicy | None = None,
                        steps: int = 8) -> InversionResult:
    """Path-following inverse: walk (X, Y) linearly from the seed's image to
    the target, Newton-polishing at each step with the previous solution."""
    with working_precision(policy) as pol:
        pair = as_pair(seed_pair, policy)
        Xs, Ys = _xy(pair, pol)
        X0, Y0 = to_mpc(target_X), to_mpc(target_Y)
        result = None
        k = 1
        while k <= steps:
            s = mpmath.mpf(k) / steps
            Xt = (1 - s) * Xs + s * X0
            Yt = (1 - s) * Ys + s * Y0
            result = newton_invert(Xt, Yt, pair, pol)
            pair = result.z
            k += 1
        assert result is not None
        return result


# ------------------------------------------------- projective map estimation


def _whitening_transform(cloud):
    """Projective-linear map spreading a concentrated point cloud: pass to the
    affine chart of the dominant component, centre, and rescale by the
    principal deviations.  Keeps tightly clustered correspondence problems
    well-conditioned."""
    import numpy as np

    m = np.array([v / np.linalg.norm(v) for v in cloud])
    # align phases along the dominant component before averaging
    k0 = int(np.argmax(np.mean(np.abs(m), axis=0)))
    m = np.array([v * (np.conj(v[k0]) / abs(v[k0])) for v in m])
    chart = m / m[:, k0:k0 + 1]
    rest = [i for i in range(4) if i != k0]
    aff = chart[:, rest]
    mean = aff.mean(axis=0)
    dev = aff - mean
    _, svals, vh = np.linalg.svd(dev, full_matrices=False)
    spread_floor = 1e-12 * (1.0 + float(np.max(np.abs(aff))))
    if svals.max() < spread_floor or svals.min() < 1e-10 * svals.max():
        raise RankDeficient(
            "sample cloud is not in general position (degenerate spread)")
    w = np.diag(1.0 / svals) @ vh
    t = np.zeros((4, 4), dtype=complex)
    t[0, k0] = 1.0
    for r in range(3):
        for c, idx in enumerate(rest):
            t[1 + r, idx] = w[r, c]
        t[1 + r, k0] = -(w[r] @ mean)
    return t


def match_projective_maps(samples_a, samples_b, holdout: int = 0,
                          nullity_gap: float = 1e-6):
    """Find G (4x4, up to scale) with G a_k parallel to b_k, by the linear
    cross-product conditions; report the worst holdout misalignment (sine of
    the angle between G a and b, measured in whitened frames).

    The last `holdout` sample pairs are excluded from the fit.  Raises
    RankDeficient when the constraint system has nullity > 1.
    """
    import numpy as np

    va = [np.array([complex(x) for x in v], dtype=complex) for v in samples_a]
    vb = [np.array([complex(x) for x in v], dtype=complex) for v in samples_b]
    if len(va) != len(vb):
        raise ValueError("sample lists differ in length")
    if len(va) - holdout < 8:
        raise ValueError("need at least 8 fitting samples")

    ta = _whitening_transform(va[: len(va) - holdout])
    tb = _whitening_transform(vb[: len(vb) - holdout])
    wa = [ta @ v for v in va]
    wb = [tb @ v for v in vb]
    wa = [v / np.linalg.norm(v) for v in wa]
    wb = [v / np.linalg.norm(v) for v in wb]

    fit_a, fit_b = wa[: len(wa) - holdout], wb[: len(wb) - holdout]
    rows = []
    for v, w in zip(fit_a, fit_b):
        for i in range(4):
            for j in range(i + 1, 4):
                row = np.zeros(16, dtype=complex)
                row[4 * i: 4 * i + 4] = w[j] * v
                row[4 * j: 4 * j + 4] -= w[i] * v
                rows.append(row)
    m = np.vstack(rows)
    _, svals, vh = np.linalg.svd(m)
    if svals[-2] < nullity_gap * svals[0]:
        raise RankDeficient(
            f"nullity > 1 in projective fit (s13={svals[-2]:.3e}, s0={svals[0]:.3e})")
    # right singular vectors are the conjugated rows of vh
    g_white = np.conj(vh[-1]).reshape(4, 4)

    def misalignment(v, w):
        gv = g_white @ v
        gv = gv / np.linalg.norm(gv)
        wn = w / np.linalg.norm(w)
        return float(np.linalg.norm(gv - np.vdot(wn, gv) * wn))

    check_a = wa[len(wa) - holdout:] if holdout else fit_a
    check_b = wb[len(wb) - holdout:] if holdout else fit_b
    residual = max(misalignment(v, w) for v, w in zip(check_a, check_b))
    g = np.linalg.inv(tb) @ g_white @ ta
    g = g / np.linalg.norm(g)
    return g, residual
