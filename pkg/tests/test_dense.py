"""Tests for the dense QZ reference path."""

import numpy as np
import pytest

from fastqz.dense import (
    accumulate_rotations,
    dense_eigenvalues,
    dense_qz_sweep,
    right_annihilator,
)
from fastqz.generators import make_givens
from fastqz.structured import shift_from_blocks

from conftest import crandn

EPS = np.finfo(np.float64).eps


def random_hess_tri_pair(rng, n):
    A = np.triu(crandn(rng, n, n), -1)
    B = np.triu(crandn(rng, n, n))
    # keep subdiagonal and diagonal comfortably away from zero
    for k in range(n - 1):
        A[k + 1, k] += 2.0
    B[np.diag_indices(n)] += 2.0
    return A, B


def pencil_roots_by_interpolation(A, B):
    """Roots of det(A - lam B) via evaluation + polynomial interpolation.

    Independent of any QZ code path; fine for tiny n.
    """
    n = A.shape[0]
    pts = 1.5 * np.exp(2j * np.pi * np.arange(n + 1) / (n + 1))
    vals = np.array([np.linalg.det(A - lam * B) for lam in pts])
    coeffs = np.linalg.solve(np.vander(pts), vals)
    return np.roots(coeffs)


def max_min_dist(found, reference):
    found = np.asarray(found)
    reference = np.asarray(reference)
    return max(np.abs(found - r).min() for r in reference)


# ---------------------------------------------------------------------------
# single sweep
# ---------------------------------------------------------------------------

def test_first_rotation_bulge_position(rng):
    A, B = random_hess_tri_pair(rng, 4)
    alpha = 0.7 - 0.2j
    G = make_givens(A[0, 0] - alpha, A[1, 0])
    Bq = B.copy()
    Bq[:2, :] = G.mat.conj().T @ Bq[:2, :]
    # exactly one entry below the diagonal of B, at (2, 1) in 1-based terms
    below = np.tril(Bq, -1)
    assert below[1, 0] != 0
    below[1, 0] = 0
    assert np.abs(below).max() == 0


def test_sweep_output_is_structurally_clean(rng):
    for n in (4, 7, 12):
        A, B = random_hess_tri_pair(rng, n)
        A1, B1, _, _ = dense_qz_sweep(A, B, 0.3 + 0.1j)
        scale = max(np.abs(A1).max(), np.abs(B1).max())
        assert np.abs(np.tril(A1, -2)).max() <= 1e-13 * scale
        assert np.abs(np.tril(B1, -1)).max() <= 1e-13 * scale


def test_sweep_is_equivalence_transform(rng):
    n = 9
    A, B = random_hess_tri_pair(rng, n)
    A1, B1, q_rots, z_rots = dense_qz_sweep(A, B, -0.4 + 1.1j)
    Q = accumulate_rotations(n, q_rots)
    Z = accumulate_rotations(n, z_rots)
    assert np.abs(Q @ Q.conj().T - np.eye(n)).max() <= 1e-12
    assert np.abs(Z @ Z.conj().T - np.eye(n)).max() <= 1e-12
    scale = max(np.abs(A).max(), np.abs(B).max())
    assert np.abs(Q.conj().T @ A @ Z - A1).max() <= 1e-11 * scale
    assert np.abs(Q.conj().T @ B @ Z - B1).max() <= 1e-11 * scale


def test_exact_shift_deflates_in_one_sweep(rng):
    for _ in range(5):
        A, B = random_hess_tri_pair(rng, 3)
        lam = pencil_roots_by_interpolation(A, B)[0]
        A1, _, _, _ = dense_qz_sweep(A, B, lam * B[0, 0])
        assert abs(A1[2, 1]) <= 1e-10 * np.abs(A1).max()


def test_identity_B_reduces_to_qr_sweep(rng):
    # B = I: the Z rotations undo the Q rotations on B, so B stays a
    # unitary diagonal and the sweep acts like shifted Hessenberg QR on A
    coeffs = np.array([-3.0 + 1.0j, 2.0, -1.5, 0.25, 1.0])
    n = 4
    A = np.zeros((n, n), dtype=np.complex128)
    for i in range(n - 1):
        A[i + 1, i] = 1.0
    A[:, n - 1] = -coeffs[:n]
    B = np.eye(n, dtype=np.complex128)
    A1, B1, _, _ = dense_qz_sweep(A, B, 0.5 + 0.5j)
    off = B1 - np.diag(np.diag(B1))
    assert np.abs(off).max() <= 1e-13
    np.testing.assert_allclose(np.abs(np.diag(B1)), 1.0, atol=1e-13)
    res = dense_eigenvalues(A, B)
    assert max_min_dist(res.roots, np.roots(coeffs[::-1])) <= 1e-11


def test_sweep_rejects_bad_structure(rng):
    A = crandn(rng, 4, 4)  # dense, not Hessenberg
    B = np.triu(crandn(rng, 4, 4))
    with pytest.raises(ValueError):
        dense_qz_sweep(A, B, 0.0)


def test_right_annihilator_convention(rng):
    u1, u2 = 1.3 - 0.2j, -0.7 + 2.1j
    Z = right_annihilator(u1, u2)
    out = np.array([u1, u2]) @ Z.mat
    nrm = np.hypot(abs(u1), abs(u2))
    assert abs(out[0]) <= 4 * EPS * nrm
    assert abs(out[1] - nrm) <= 4 * EPS * nrm


# ---------------------------------------------------------------------------
# shift selection
# ---------------------------------------------------------------------------

def test_wilkinson_shift_is_exact_eigenvalue(rng):
    for _ in range(10):
        A2 = crandn(rng, 2, 2)
        B2 = np.triu(crandn(rng, 2, 2))
        lam = shift_from_blocks(A2, B2)
        assert abs(np.linalg.det(A2 - lam * B2)) <= 1e-12 * \
            max(1.0, np.abs(A2).max() ** 2)


def test_wilkinson_shift_picks_corner_root():
    A2 = np.array([[5.0, 1.0], [0.1, 1.0]], dtype=np.complex128)
    B2 = np.eye(2, dtype=np.complex128)
    lam = shift_from_blocks(A2, B2)
    # roots are near 5 and 1; the corner quotient is 1
    assert abs(lam - 1.0) < abs(lam - 5.0)


def test_wilkinson_shift_singular_B_corner():
    A2 = np.array([[2.0, 1.0], [1.0, 3.0]], dtype=np.complex128)
    B2 = np.array([[1.0, 0.5], [0.0, 0.0]], dtype=np.complex128)
    lam = shift_from_blocks(A2, B2)
    # with b22 = 0 the pencil has one finite eigenvalue: the linear root
    assert abs(np.linalg.det(A2 - lam * B2)) <= 1e-12


# ---------------------------------------------------------------------------
# full driver
# ---------------------------------------------------------------------------

def test_fourth_roots_of_unity():
    from fastqz.generators import build_companion_pencil, reconstruct_dense
    gen = build_companion_pencil([-1.0, 0.0, 0.0, 0.0, 1.0])
    A, B, _, _ = reconstruct_dense(gen)
    res = dense_eigenvalues(A, B)
    ref = np.array([1.0, 1.0j, -1.0, -1.0j])
    assert max_min_dist(res.roots, ref) <= 1e-13
    assert len(res.eigenvalues) == 4


def test_prediagonalized_pencil_needs_no_sweeps():
    A = np.diag(np.arange(1.0, 6.0)).astype(np.complex128)
    B = np.eye(5, dtype=np.complex128)
    res = dense_eigenvalues(A, B)
    assert res.total_sweeps == 0
    np.testing.assert_allclose(sorted(res.roots.real), np.arange(1.0, 6.0))


def test_degree20_power_sum_roots():
    # x^20 + x^19 + ... + 1: roots are the 21st roots of unity except 1
    coeffs = np.ones(21, dtype=np.complex128)
    from fastqz.generators import build_companion_pencil, reconstruct_dense
    gen = build_companion_pencil(coeffs)
    A, B, _, _ = reconstruct_dense(gen)
    res = dense_eigenvalues(A, B)
    ref = np.exp(2j * np.pi * np.arange(1, 21) / 21.0)
    assert max_min_dist(res.roots, ref) <= 1e-13


def test_driver_counts_and_result_shape(rng):
    from fastqz.generators import build_companion_pencil, reconstruct_dense
    gen = build_companion_pencil(crandn(rng, 13))
    A, B, _, _ = reconstruct_dense(gen)
    res = dense_eigenvalues(A, B)
    assert len(res.eigenvalues) == 12
    assert len(res.iterations) == 12
    assert sum(res.iterations) == res.total_sweeps
    assert res.total_sweeps <= 30 * 12


def test_nonconvergence_carries_partial_result(rng):
    from fastqz.generators import build_companion_pencil, reconstruct_dense
    from fastqz.structured import ConvergenceError
    gen = build_companion_pencil(crandn(rng, 41))
    A, B, _, _ = reconstruct_dense(gen)
    with pytest.raises(ConvergenceError) as exc:
        dense_eigenvalues(A, B, max_iter_per_eig=0)
    assert exc.value.partial.eigenvalues == []
