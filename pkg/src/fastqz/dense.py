"""Classical unstructured single-shift implicit QZ on explicit matrices.

This is the correctness oracle for the structured path and the baseline
for timing comparisons: same Givens primitive, same shift and deflation
policies, but O(N^2) storage and O(N^3) work.  Gated to moderate sizes;
it exists for testing and benchmarking, not production use.
"""

import numpy as np

from .generators import GivensRotation, make_givens
from .structured import (
    DEFAULT_MAX_SWEEPS_PER_EIG,
    EPS,
    STAGNATION_PERIOD,
    ConvergenceError,
    EigenResult,
    exceptional_shift,
    shift_from_blocks,
)

MAX_DENSE_N = 2000


def right_annihilator(u1, u2):
    """Rotation Z with (u1, u2) @ Z = (0, r), r >= 0 real."""
    return make_givens(u2, -u1)


def _rowrot(M, i, G):
    """M <- (I + G + I)* M, rotation acting on rows i, i+1."""
    c, s = G.c, G.s
    r0 = M[i, :].copy()
    r1 = M[i + 1, :]
    M[i, :] = np.conj(c) * r0 + np.conj(s) * r1
    M[i + 1, :] = -s * r0 + c * r1


def _colrot(M, j, Z):
    """M <- M (I + Z + I), rotation acting on columns j, j+1."""
    c, s = Z.c, Z.s
    c0 = M[:, j].copy()
    c1 = M[:, j + 1]
    M[:, j] = c * c0 + s * c1
    M[:, j + 1] = -np.conj(s) * c0 + np.conj(c) * c1


def check_structure(A, B, tol=1e-8):
    """Raise if A is not Hessenberg or B not triangular within tol."""
    n = A.shape[0]
    if A.shape != (n, n) or B.shape != (n, n):
        raise ValueError("A and B must be square and of equal size")
    scale_a = max(np.abs(A).max(), 1.0)
    scale_b = max(np.abs(B).max(), 1.0)
    if n > 2 and np.abs(np.tril(A, -2)).max() > tol * scale_a:
        raise ValueError("A is not upper Hessenberg")
    if n > 1 and np.abs(np.tril(B, -1)).max() > tol * scale_b:
        raise ValueError("B is not upper triangular")


def _sweep_inplace(A, B, alpha, lo, hi, q_rots=None, z_rots=None,
                   bulge_log=None):
    """One implicit shifted QZ sweep on the window [lo, hi], in place.

    Rotations act on full rows/columns, so deflated parts outside the
    window are transformed consistently (their zeros are preserved).
    When a SweepScratch is passed as bulge_log, the 2x2 bulge blocks are
    recorded at the same points the structured sweep records them.
    """
    G = make_givens(A[lo, lo] - alpha, A[lo + 1, lo])
    _rowrot(A, lo, G)
    if q_rots is not None:
        q_rots.append((lo, G))
    for k in range(lo, hi - 1):
        _rowrot(B, k, G)                      # bulge appears at B[k+1, k]
        if bulge_log is not None:
            bulge_log.b_bulges.append((k, B[k:k + 2, k:k + 2].copy()))
        Z = right_annihilator(B[k + 1, k], B[k + 1, k + 1])
        _colrot(B, k, Z)
        B[k + 1, k] = 0.0
        _colrot(A, k, Z)                      # bulge appears at A[k+2, k]
        if bulge_log is not None:
            bulge_log.a_bulges.append((k, A[k + 1:k + 3, k:k + 2].copy()))
        if z_rots is not None:
            z_rots.append((k, Z))
        G = make_givens(A[k + 1, k], A[k + 2, k])
        _rowrot(A, k + 1, G)
        A[k + 2, k] = 0.0
        if q_rots is not None:
            q_rots.append((k + 1, G))
    _rowrot(B, hi - 1, G)
    if bulge_log is not None:
        bulge_log.b_bulges.append(
            (hi - 1, B[hi - 1:hi + 1, hi - 1:hi + 1].copy()))
    Z = right_annihilator(B[hi, hi - 1], B[hi, hi])
    _colrot(B, hi - 1, Z)
    B[hi, hi - 1] = 0.0
    _colrot(A, hi - 1, Z)
    if z_rots is not None:
        z_rots.append((hi - 1, Z))


def dense_qz_sweep(A, B, alpha):
    """One full implicit single-shift QZ sweep on a dense pair.

    Parameters
    ----------
    A, B : (N, N) arrays
        Upper Hessenberg / upper triangular input pair (validated).
    alpha : complex
        Shift as used in the first implicit column: the starting
        rotation annihilates (A[0,0] - alpha, A[1,0]).  For a shift
        value lam of the pencil, pass lam * B[0,0].

    Returns
    -------
    (A1, B1, q_rots, z_rots)
        Transformed pair plus the rotations (index, GivensRotation),
        where index i means the rotation acts on rows/columns (i, i+1).
    """
    A = np.array(A, dtype=np.complex128)
    B = np.array(B, dtype=np.complex128)
    check_structure(A, B)
    n = A.shape[0]
    if n < 2:
        raise ValueError("sweep needs N >= 2")
    if n > MAX_DENSE_N:
        raise ValueError("dense path gated to N <= %d" % MAX_DENSE_N)
    q_rots, z_rots = [], []
    _sweep_inplace(A, B, alpha, 0, n - 1, q_rots, z_rots)
    return A, B, q_rots, z_rots


def accumulate_rotations(n, rots):
    """Dense product of embedded rotations, in application order."""
    Q = np.eye(n, dtype=np.complex128)
    for i, G in rots:
        Qi = np.eye(n, dtype=np.complex128)
        Qi[i:i + 2, i:i + 2] = G.mat
        Q = Q @ Qi
    return Q


def dense_eigenvalues(A, B, max_iter_per_eig=DEFAULT_MAX_SWEEPS_PER_EIG,
                      tol_a=None, tol_b=None):
    """All generalized eigenvalues of a Hessenberg/triangular pair.

    Same shift, deflation and exceptional-shift policies as the
    structured driver.  Returns an EigenResult with (alpha, beta) pairs
    in diagonal order; beta is set to zero when the corresponding
    diagonal entry of B is negligible (infinite eigenvalue).
    """
    A = np.array(A, dtype=np.complex128)
    B = np.array(B, dtype=np.complex128)
    check_structure(A, B)
    n = A.shape[0]
    if n > MAX_DENSE_N:
        raise ValueError("dense path gated to N <= %d" % MAX_DENSE_N)
    if tol_a is None:
        tol_a = EPS
    if tol_b is None:
        tol_b = EPS

    iters = []
    total = 0
    since = 0
    budget = max_iter_per_eig * n
    hi = n - 1

    def negligible(k):
        return abs(A[k, k - 1]) <= tol_a * (abs(A[k - 1, k - 1])
                                            + abs(A[k, k]))

    while True:
        while hi > 0 and negligible(hi):
            A[hi, hi - 1] = 0.0
            iters.append(since)
            since = 0
            hi -= 1
        if hi == 0:
            iters.append(since)
            break
        lo = hi
        while lo > 0 and not negligible(lo):
            lo -= 1
        if lo > 0:
            A[lo, lo - 1] = 0.0  # interior split found by the scan
        if total >= budget:
            partial = _extract(A, B, tol_b, converged_from=hi + 1)
            partial.iterations = iters
            partial.total_sweeps = total
            raise ConvergenceError(
                "QZ failed to converge within %d sweeps (%d of %d "
                "eigenvalues found)" % (budget, n - 1 - hi, n), partial)
        SA = A[hi - 1:hi + 1, hi - 1:hi + 1]
        SB = B[hi - 1:hi + 1, hi - 1:hi + 1]
        root = shift_from_blocks(SA, SB)
        if since > 0 and since % STAGNATION_PERIOD == 0:
            root = exceptional_shift(root, abs(A[hi, hi - 1]),
                                     abs(B[hi - 1, hi - 1]), abs(B[hi, hi]))
        _sweep_inplace(A, B, root * B[lo, lo], lo, hi)
        total += 1
        since += 1

    result = _extract(A, B, tol_b)
    result.iterations = iters[::-1]  # bottom-up deflation order -> index order
    result.total_sweeps = total
    return result


def _extract(A, B, tol_b, converged_from=0):
    d = np.abs(np.diag(B))
    thresh = tol_b * (d.max() if d.size else 0.0)
    pairs = []
    for k in range(converged_from, A.shape[0]):
        beta = B[k, k]
        if abs(beta) <= thresh:
            pairs.append((complex(A[k, k]), 0.0 + 0.0j))
        else:
            pairs.append((complex(A[k, k]), complex(beta)))
    return EigenResult(eigenvalues=pairs)
