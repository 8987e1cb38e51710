import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from tvdeblur.blur import (
    BoundaryCondition,
    StructuredBlurOperator,
    SymmetricPsf,
    UnsupportedBoundaryConditionError,
    dense_blur_matrix,
    load_psf,
    save_psf,
    symbol_eval,
)
from tvdeblur.harness import gen_psf

ALL_BCS = list(BoundaryCondition)


def uniform_psf(m):
    """Moving-average kernel fully supported on [-m, m]."""
    return SymmetricPsf(np.full(2 * m + 1, 1.0 / (2 * m + 1)))


# -- SymmetricPsf ------------------------------------------------------------


def test_psf_rejects_asymmetric():
    with pytest.raises(ValueError):
        SymmetricPsf([0.2, 0.5, 0.3])
    with pytest.raises(ValueError):
        SymmetricPsf(np.array([[0.1, 0.2], [0.2, 0.5]]))  # even size
    quad = np.full((3, 3), 1 / 9.0)
    quad[0, 0] += 0.5
    quad[0, 0] -= 0.5  # keep symmetric; sanity that this passes
    SymmetricPsf(quad)


def test_psf_renormalizes_with_warning():
    with pytest.warns(UserWarning):
        psf = SymmetricPsf([1.0, 2.0, 1.0])
    assert abs(psf.coefficients.sum() - 1.0) < 1e-15


def test_psf_text_round_trip(tmp_path):
    psf = uniform_psf(3)
    path = tmp_path / "psf.txt"
    save_psf(psf, path)
    again = load_psf(path)
    np.testing.assert_array_equal(psf.coefficients, again.coefficients)
    assert path.read_text().splitlines()[0] == "3"

    psf2 = gen_psf("gaussian", 2, 1.0)
    save_psf(psf2, path)
    again2 = load_psf(path)
    np.testing.assert_array_equal(psf2.coefficients, again2.coefficients)


# -- symbol -------------------------------------------------------------------


def test_symbol_at_zero_is_one():
    for psf in (uniform_psf(1), uniform_psf(4), gen_psf("gaussian", 3, 1.2)):
        y = 0.0 if psf.ndim == 1 else (0.0, 0.0)
        assert abs(symbol_eval(psf, y) - 1.0) < 1e-14


def test_symbol_out_of_focus_frozen_values():
    psf = uniform_psf(1)  # coefficients (1/3, 1/3, 1/3)
    assert abs(symbol_eval(psf, np.pi) - (-1.0 / 3.0)) < 1e-14
    assert abs(symbol_eval(psf, np.pi / 2) - (1.0 / 3.0)) < 1e-14


def test_symbol_vectorized_matches_scalar():
    psf = uniform_psf(2)
    ys = np.linspace(0, np.pi, 7)
    vals = symbol_eval(psf, ys)
    for y, v in zip(ys, vals):
        assert abs(symbol_eval(psf, float(y)) - v) < 1e-14


# -- blur apply ---------------------------------------------------------------


def test_identity_psf_is_identity(rng):
    psf = SymmetricPsf([1.0])
    u = rng.standard_normal(10)
    for bc in ALL_BCS:
        op = StructuredBlurOperator(psf, bc, 10)
        np.testing.assert_array_equal(op.apply(u), u)


def test_constant_preserved_by_mirroring_extensions():
    psf = uniform_psf(2)
    u = np.full(12, 3.7)
    for bc in (BoundaryCondition.REFLECTIVE, BoundaryCondition.ANTI_REFLECTIVE):
        op = StructuredBlurOperator(psf, bc, 12)
        np.testing.assert_allclose(op.apply(u), u, atol=1e-14)


def test_zero_dirichlet_constant_frozen():
    # ones through the width-3 average with zero padding: (2/3, 1, 1, 2/3)
    psf = uniform_psf(1)
    op = StructuredBlurOperator(psf, BoundaryCondition.ZERO_DIRICHLET, 4)
    np.testing.assert_allclose(op.apply(np.ones(4)),
                               [2 / 3, 1.0, 1.0, 2 / 3], atol=1e-15)


@pytest.mark.parametrize("bc", ALL_BCS)
@pytest.mark.parametrize("n", [8, 16, 33])
def test_apply_matches_dense_oracle(bc, n, rng):
    psf = uniform_psf(2)
    op = StructuredBlurOperator(psf, bc, n)
    dense = oracles.dense_blur_1d(psf.coefficients, bc.value, n)
    u = rng.standard_normal(n)
    np.testing.assert_allclose(op.apply(u), dense @ u, atol=1e-12)
    np.testing.assert_allclose(op.apply_transpose(u), dense.T @ u, atol=1e-12)
    np.testing.assert_allclose(dense_blur_matrix(psf, bc, n), dense, atol=1e-13)


def test_dense_structure_zero_and_periodic():
    psf = uniform_psf(2)
    n = 9
    a_zero = dense_blur_matrix(psf, BoundaryCondition.ZERO_DIRICHLET, n)
    # banded symmetric Toeplitz
    for i in range(n):
        for j in range(n):
            if abs(i - j) > psf.half_width:
                assert a_zero[i, j] == 0.0
            if i + 1 < n and j + 1 < n:
                assert abs(a_zero[i, j] - a_zero[i + 1, j + 1]) < 1e-15
    a_per = dense_blur_matrix(psf, BoundaryCondition.PERIODIC, n)
    for i in range(1, n):
        np.testing.assert_allclose(a_per[i], np.roll(a_per[0], i), atol=1e-15)


def test_row_sums_are_one():
    psf = uniform_psf(3)
    for bc in (BoundaryCondition.REFLECTIVE, BoundaryCondition.ANTI_REFLECTIVE):
        dense = dense_blur_matrix(psf, bc, 14)
        np.testing.assert_allclose(dense.sum(axis=1), np.ones(14), atol=1e-12)


# -- eigenvalues and fast path -------------------------------------------------


def test_ar_similarity_is_diagonal_and_grid_matches():
    psf = uniform_psf(2)
    n = 8
    a = dense_blur_matrix(psf, BoundaryCondition.ANTI_REFLECTIVE, n)
    t = oracles.dense_ar(n)
    sim = np.linalg.solve(t, a @ t)
    off = sim - np.diag(np.diag(sim))
    assert np.linalg.norm(off) < 1e-8
    op = StructuredBlurOperator(psf, BoundaryCondition.ANTI_REFLECTIVE, n)
    np.testing.assert_allclose(np.diag(sim), op.eigenvalues(), atol=1e-10)
    assert abs(op.eigenvalues()[-1] - 1.0) < 1e-14  # grid ends at angle zero


def test_identity_psf_eigenvalues_are_one():
    psf = SymmetricPsf([1.0])
    for bc in (BoundaryCondition.REFLECTIVE, BoundaryCondition.ANTI_REFLECTIVE):
        op = StructuredBlurOperator(psf, bc, 9)
        np.testing.assert_allclose(op.eigenvalues(), np.ones(9), atol=1e-15)


def test_reflective_eigenvalues_match_similarity():
    psf = uniform_psf(1)
    n = 8
    a = dense_blur_matrix(psf, BoundaryCondition.REFLECTIVE, n)
    c = oracles.dense_dct(n)
    sim = c.T @ a @ c
    assert np.linalg.norm(sim - np.diag(np.diag(sim))) < 1e-12
    op = StructuredBlurOperator(psf, BoundaryCondition.REFLECTIVE, n)
    np.testing.assert_allclose(op.eigenvalues(), np.diag(sim), atol=1e-10)


@pytest.mark.parametrize("bc", [BoundaryCondition.REFLECTIVE,
                                BoundaryCondition.ANTI_REFLECTIVE])
@pytest.mark.parametrize("n", [8, 16, 33])
def test_fast_apply_matches_reference(bc, n, rng):
    psf = uniform_psf(2)
    op = StructuredBlurOperator(psf, bc, n)
    u = rng.standard_normal(n)
    np.testing.assert_allclose(op.apply_fast(u), op.apply(u), atol=1e-10)
    np.testing.assert_allclose(op.apply_transpose_fast(u), op.apply_transpose(u),
                               atol=1e-10)


def test_2d_anti_reflective_corner_rules(rng):
    """Corners follow the four bilinear anti-reflection formulas exactly."""
    from tvdeblur.blur import pad_extend

    n, m = 6, 2
    u = rng.standard_normal((n, n))
    ext = pad_extend(u, m, BoundaryCondition.ANTI_REFLECTIVE)
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            # positions (1-i, 1-j) etc. in 1-based interior coordinates
            assert np.isclose(
                ext[m - i, m - j],
                4 * u[0, 0] - 2 * u[0, j] - 2 * u[i, 0] + u[i, j])
            assert np.isclose(
                ext[m - i, m + n - 1 + j],
                4 * u[0, -1] - 2 * u[0, -1 - j] - 2 * u[i, -1] + u[i, -1 - j])
            assert np.isclose(
                ext[m + n - 1 + i, m - j],
                4 * u[-1, 0] - 2 * u[-1, j] - 2 * u[-1 - i, 0] + u[-1 - i, j])
            assert np.isclose(
                ext[m + n - 1 + i, m + n - 1 + j],
                4 * u[-1, -1] - 2 * u[-1, -1 - j] - 2 * u[-1 - i, -1]
                + u[-1 - i, -1 - j])


def test_2d_eigenvalues_diagonalize_dense(rng):
    psf = gen_psf("gaussian", 2, 1.0)
    n = 8
    for bc, kind in ((BoundaryCondition.REFLECTIVE, "dct"),
                     (BoundaryCondition.ANTI_REFLECTIVE, "ar")):
        op = StructuredBlurOperator(psf, bc, n)
        a = dense_blur_matrix(psf, bc, n)
        x1 = oracles.dense_dct(n) if kind == "dct" else oracles.dense_ar(n)
        xx = np.kron(x1, x1)
        sim = np.linalg.solve(xx, a @ xx)
        off = sim - np.diag(np.diag(sim))
        assert np.linalg.norm(off) < 1e-8
        np.testing.assert_allclose(np.diag(sim), op.eigenvalues().reshape(-1),
                                   atol=1e-10)


def test_2d_apply_matches_oracle_and_fast_path(rng):
    psf = gen_psf("gaussian", 2, 1.0)
    n = 8
    u = rng.standard_normal((n, n))
    for bc in ALL_BCS:
        op = StructuredBlurOperator(psf, bc, n)
        expected = oracles.blur_2d(u, psf.coefficients, bc.value)
        np.testing.assert_allclose(op.apply(u), expected, atol=1e-12)
        dense = dense_blur_matrix(psf, bc, n)
        np.testing.assert_allclose(dense @ u.reshape(-1),
                                   op.apply(u).reshape(-1), atol=1e-12)
        np.testing.assert_allclose(op.apply_transpose(u).reshape(-1),
                                   dense.T @ u.reshape(-1), atol=1e-12)
    for bc in (BoundaryCondition.REFLECTIVE, BoundaryCondition.ANTI_REFLECTIVE):
        op = StructuredBlurOperator(psf, bc, n)
        np.testing.assert_allclose(op.apply_fast(u), op.apply(u), atol=1e-10)
        np.testing.assert_allclose(op.apply_transpose_fast(u),
                                   op.apply_transpose(u), atol=1e-10)


def test_reblur_alias_is_forward_apply(rng):
    psf = uniform_psf(2)
    op = StructuredBlurOperator(psf, BoundaryCondition.ANTI_REFLECTIVE, 12)
    u = rng.standard_normal(12)
    np.testing.assert_array_equal(op.reblur_apply(u), op.apply(u))


# -- errors --------------------------------------------------------------------


def test_errors():
    psf = uniform_psf(4)
    with pytest.raises(ValueError):
        StructuredBlurOperator(psf, BoundaryCondition.REFLECTIVE, 4)  # m >= n
    op = StructuredBlurOperator(psf, BoundaryCondition.PERIODIC, 16)
    with pytest.raises(UnsupportedBoundaryConditionError):
        op.eigenvalues()
    with pytest.raises(UnsupportedBoundaryConditionError):
        op.apply_fast(np.zeros(16))
    with pytest.raises(ValueError):
        dense_blur_matrix(psf, BoundaryCondition.PERIODIC, 300)
    with pytest.raises(ValueError):
        op.apply(np.zeros(7))


@given(c=st.floats(0.1, 10.0), m=st.integers(1, 4))
def test_constant_preservation_property(c, m):
    psf = uniform_psf(m)
    n = 20
    u = np.full(n, c)
    for bc in (BoundaryCondition.REFLECTIVE, BoundaryCondition.ANTI_REFLECTIVE):
        op = StructuredBlurOperator(psf, bc, n)
        np.testing.assert_allclose(op.apply(u), u, atol=1e-12 * c)
