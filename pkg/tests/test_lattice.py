import mpmath

from hilbert_k3.lattice import (CONVENTIONS, FORM_A, FORM_A_X, GTILDE,
                                MX_GENERATORS, check_orthogonality,
                                detect_common_convention, intertwine_check,
                                j_map, j_map_symbolic_identities, mat_identity,
                                mat_inverse_int, mat_mul, mat_transpose,
                                preserves_form, projective_distance)
from hilbert_k3.numkernel import working_precision
from hilbert_k3.verify import sample_points


def test_all_generators_preserve_form_exactly():
    rep = check_orthogonality()
    assert all(rep.values()), rep


def test_tau_is_involution():
    assert mat_mul(GTILDE["tau"], GTILDE["tau"]) == mat_identity(4)


def test_g3_orthogonality_explicit():
    g = GTILDE["g3"]
    assert mat_mul(mat_transpose(g), mat_mul(FORM_A, g)) == FORM_A


def test_restricted_generators_preserve_restricted_form():
    for g in MX_GENERATORS:
        assert preserves_form(g, FORM_A_X)


def test_displayed_unit_translation_row_fails_orthogonality():
    # regression: the source display carries a copied first row for the
    # fundamental-unit translation; that matrix is not in the orthogonal group
    displayed = ((1, -1, 2, 1), (0, 1, 0, 0), (0, -1, 1, 0), (0, 1, 0, 1))
    assert not preserves_form(displayed, FORM_A)
    assert preserves_form(GTILDE["g2"], FORM_A)


def test_matrix_inverse_exact():
    for g in GTILDE.values():
        assert mat_mul(g, mat_inverse_int(g)) == mat_identity(4)


def test_symbolic_quadric_and_hermitian_identities():
    rep = j_map_symbolic_identities()
    assert rep["quadric_identically_zero"]
    assert rep["hermitian_matches_4ImIm"]


def test_j_map_numeric_invariants(policy):
    with working_precision(policy):
        jp = j_map((mpmath.mpc(0, "1.2"), mpmath.mpc(0, "0.7")), policy)
        assert abs(jp.quadric_value) < policy.verify_tol
        assert abs(jp.hermitian_value - 4 * mpmath.mpf("1.2") * mpmath.mpf("0.7")) < 1e-30
        assert jp.hermitian_value > 0


def test_j_map_anchor_point(policy):
    with working_precision(policy):
        ji = j_map((mpmath.mpc(0, 1), mpmath.mpc(0, 1)), policy)
        anchor = (mpmath.mpc(1), mpmath.mpc(1), mpmath.mpc(0, -1), mpmath.mpc(0))
        assert projective_distance(ji.xi, anchor) < policy.verify_tol


def test_identity_transform_has_zero_residual(policy):
    with working_precision(policy):
        p = (mpmath.mpc("0.1", "1.2"), mpmath.mpc("-0.2", "0.9"))
        xi = j_map(p, policy).xi
        assert projective_distance(xi, xi) < policy.series_tol


def test_intertwine_tau(policy):
    with working_precision(policy):
        rep = intertwine_check("tau", [(mpmath.mpc(0, "1.1"), mpmath.mpc(0, "1.6"))],
                               policy)
        assert "direct" in rep["passing"]
        assert rep["residuals"]["direct"] < policy.verify_tol


def test_intertwine_g1(policy):
    with working_precision(policy):
        rep = intertwine_check("g1", [(mpmath.mpc(0, "0.9"), mpmath.mpc(0, "1.3"))],
                               policy)
        assert "direct" in rep["passing"]


def test_single_common_convention(policy):
    with working_precision(policy):
        rep = detect_common_convention(sample_points(5), policy)
        assert rep["convention"] == "direct"
        assert rep["residual"] < 1e-8
        for gen, data in rep["per_generator"].items():
            assert "direct" in data["passing"], gen


def test_convention_tags_complete():
    assert CONVENTIONS == ("direct", "transpose", "inverse", "inverse_transpose")
