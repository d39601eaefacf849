"""Structured implicit single-shift QZ on generator-represented pencils.

The sweep chases the shift bulge down the pencil entirely in terms of
quasiseparable generators: each chase step mixes two adjacent rows with
a left rotation Q_t, restores B's triangularity with a right rotation
Z_t, and rewrites the O(1) generator slots those rotations touch.  At
fixed generator order one sweep costs O(N), against O(N^2) for rotating
explicit matrices.

Shift selection, deflation policy and the result/error types are defined
here and shared with the dense reference driver so the two paths stay
comparable rotation by rotation.
"""

from dataclasses import dataclass, field

import numpy as np

from .generators import (
    NumericalError,
    PencilGenerators,
    QuasiseparableGenerators,
    TriangularGenerators,
    diag_entries_A,
    make_givens,
    trailing_block,
)

EPS = np.finfo(np.float64).eps

# Driver policy knobs.  An "exceptional" shift rotates the computed shift
# in the complex plane after every STAGNATION_PERIOD sweeps without a
# deflation, breaking symmetry-induced cycles.  (Tying the trigger to a
# decrease of the trailing subdiagonal instead does not work: cyclic
# companion pencils orbit with period n under the zero Wilkinson shift,
# and the periodic dip of the subdiagonal keeps resetting such a
# counter forever.)
DEFAULT_MAX_SWEEPS_PER_EIG = 30
STAGNATION_PERIOD = 12
EXCEPTIONAL_ROTATION = complex(np.exp(0.4j))


@dataclass
class EigenResult:
    """Generalized eigenvalues as (alpha, beta) pairs plus sweep counts."""

    eigenvalues: list = field(default_factory=list)
    iterations: list = field(default_factory=list)
    total_sweeps: int = 0

    @property
    def roots(self):
        """Eigenvalues alpha/beta as a vector; beta = 0 maps to inf."""
        out = np.empty(len(self.eigenvalues), dtype=np.complex128)
        for k, (alpha, beta) in enumerate(self.eigenvalues):
            out[k] = alpha / beta if beta != 0 else complex(np.inf)
        return out


@dataclass
class SweepScratch:
    """2x2 bulge blocks recorded while a sweep runs, for cross-checking.

    ``b_bulges[j] = (t, block)`` is the B-side block over rows/columns
    (t, t+1) right after the left rotation hit those rows;
    ``a_bulges[j] = (t, block)`` is the A-side block over rows
    (t+1, t+2) x columns (t, t+1) right after the column rotation Z_t.
    The dense sweep can log the same blocks, which pins down the exact
    interleaving of row and column rotations.
    """

    b_bulges: list = field(default_factory=list)
    a_bulges: list = field(default_factory=list)


class ConvergenceError(RuntimeError):
    """QZ iteration exceeded its sweep budget; carries partial results."""

    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


def exceptional_shift(root, subdiag_abs, b_tail_abs, b_corner_abs):
    """Perturbed shift used after STAGNATION_PERIOD sweeps of no progress.

    Rotating the shift alone cannot help when the Wilkinson root is
    exactly zero (e.g. pure cyclic companion matrices), so a real offset
    at the scale of the trailing subdiagonal is added before rotating.
    """
    bscale = max(b_tail_abs, b_corner_abs, EPS)
    return (root + subdiag_abs / bscale) * EXCEPTIONAL_ROTATION


def shift_from_blocks(A2, B2):
    """Eigenvalue of a 2x2 pencil closest to its trailing corner quotient.

    Parameters
    ----------
    A2, B2 : (2, 2) arrays
        Trailing blocks of the pencil; B2 upper triangular (B2[1,0]
        ignored).

    Returns
    -------
    complex
        The root of det(A2 - lam*B2) nearest A2[1,1]/B2[1,1].  Degenerate
        cases fall back to the linear root or to A2[1,1].
    """
    a11, a12 = complex(A2[0, 0]), complex(A2[0, 1])
    a21, a22 = complex(A2[1, 0]), complex(A2[1, 1])
    b11, b12, b22 = complex(B2[0, 0]), complex(B2[0, 1]), complex(B2[1, 1])

    # det(A2 - lam B2) = ca*lam^2 + cb*lam + cc
    ca = b11 * b22
    cb = -(a11 * b22 + a22 * b11 - b12 * a21)
    cc = a11 * a22 - a12 * a21

    if ca == 0:
        if cb != 0:
            return -cc / cb
        return a22
    disc = np.sqrt(cb * cb - 4.0 * ca * cc)
    # pick the sign that avoids cancellation in cb + disc
    if (np.conj(cb) * disc).real < 0.0:
        disc = -disc
    qq = -0.5 * (cb + disc)
    if qq == 0:
        return 0.0 + 0.0j  # double root at zero
    r1 = qq / ca
    r2 = cc / qq
    target = a22 / b22  # b22 != 0 here, else ca would vanish
    return r1 if abs(r1 - target) <= abs(r2 - target) else r2


def wilkinson_shift(gen):
    """Shift from the trailing 2x2 subpencil of a generator pair."""
    A2, B2 = trailing_block(gen)
    return shift_from_blocks(A2, B2)


def deflation_scan(gen, tol_a=None, tol_b=None):
    """Zero negligible subdiagonal entries and flag tiny B diagonals.

    A subdiagonal sigma[k] is negligible relative to its two diagonal
    neighbours of A; it is then set to exactly zero in place.  Positions
    where |d_b[k]| is negligible against the largest B diagonal signal
    infinite eigenvalues (beta = 0) once deflated down to 1x1.

    Returns
    -------
    (splits, infinite)
        Lists of subdiagonal indices zeroed during this scan and of
        diagonal indices flagged as infinite.
    """
    tol_a = EPS if tol_a is None else tol_a
    tol_b = EPS if tol_b is None else tol_b
    diag = diag_entries_A(gen)
    splits = []
    for k in range(gen.n - 1):
        if abs(gen.sigma[k]) <= tol_a * (abs(diag[k]) + abs(diag[k + 1])):
            gen.sigma[k] = 0.0
            splits.append(k)
    scale = np.abs(gen.d_b).max() if gen.n else 0.0
    infinite = [k for k in range(gen.n) if abs(gen.d_b[k]) <= tol_b * scale]
    return splits, infinite


def _rot2(rot, a, b):
    """Apply rot.mat* to the 2-vector (a, b)."""
    return (np.conj(rot.c) * a + np.conj(rot.s) * b,
            -rot.s * a + rot.c * b)


def _cell(x):
    return np.array([[x]], dtype=np.complex128)


def qz_sweep(gen, alpha, *, window=None, capture=False, scratch=None):
    """One implicit single-shift QZ sweep carried out on generators.

    The first rotation annihilates (A[lo,lo] - alpha, A[lo+1,lo]); for a
    shift value lam of the pencil, pass ``alpha = lam * B[lo,lo]``.  The
    bulge is then chased to the window foot, restoring the Hessenberg /
    triangular pattern.  With ``window=(lo, hi)`` only rows lo..hi are
    rotated; entries of A and B outside the window are rewritten
    consistently (exact zeros at the window borders stay exact).

    Parameters
    ----------
    gen : PencilGenerators
        Input pencil; not modified.
    alpha : complex
        Shift, already multiplied by B[lo, lo].
    window : (int, int), optional
        Inclusive row range [lo, hi] of the active unreduced block.
    capture : bool
        When true, also return the rotation lists.
    scratch : SweepScratch, optional
        Collects the 2x2 bulge blocks for diagnostics.

    Returns
    -------
    (PencilGenerators, rotations)
        The transformed pencil and, when captured, a pair of lists
        ``(q_rots, z_rots)`` of (index, GivensRotation) acting on rows
        resp. columns (index, index+1); rotations is None otherwise.

    Notes
    -----
    Output generator orders grow by one (V up to order 3, U up to 2
    when starting from compressed input); run the unitary-side
    compression afterwards to restore minimal orders.
    """
    n = gen.n
    if n < 2:
        raise ValueError("sweep needs N >= 2")
    lo, hi = (0, n - 1) if window is None else window
    if not 0 <= lo < hi <= n - 1:
        raise ValueError("window must satisfy 0 <= lo < hi <= N-1")

    gv, hv, bv = list(gen.v.g), list(gen.v.h), list(gen.v.b)
    gu, hu, bu = list(gen.u.g), list(gen.u.h), list(gen.u.b)
    sigma = np.array(gen.sigma, dtype=np.complex128)
    db = np.array(gen.d_b, dtype=np.complex128)
    z = np.array(gen.z, dtype=np.complex128)
    w = np.array(gen.w, dtype=np.complex128)
    p = np.array(gen.p, dtype=np.complex128)
    q = np.array(gen.q, dtype=np.complex128)

    q_rots, z_rots = [], []

    def giv(v1, v2, col):
        try:
            return make_givens(v1, v2)
        except ValueError as exc:
            raise NumericalError(
                "non-finite value while chasing at column %d" % col) from exc

    # First rotation from the shifted leading column of the window.
    a_diag = (gv[lo] @ hv[lo])[0, 0] - z[lo] * np.conj(w[lo])
    sig_v = sigma[lo] + z[lo + 1] * np.conj(w[lo])
    qrot = giv(a_diag - alpha, sigma[lo], lo)
    q_rots.append((lo, qrot))

    # Rows (lo, lo+1) of V over columns (lo | lo+1 onward).
    gam = qrot.mat.conj().T @ np.vstack([
        np.hstack([gv[lo] @ hv[lo], gv[lo] @ bv[lo]]),
        np.hstack([_cell(sig_v), gv[lo + 1]]),
    ])
    new_gv_lo = gam[0:1, :]
    f_v, ph_v = gam[1, 0], gam[1:2, 1:]

    z[lo], chi = _rot2(qrot, z[lo], z[lo + 1])
    f_a, ph_a = f_v - chi * np.conj(w[lo]), ph_v

    # B-side carriers start from the untouched window head.
    gamma, c, theta = w[lo], p[lo], q[lo]
    f_u = db[lo] + p[lo] * np.conj(q[lo])
    ph_u = gu[lo]
    f_b = db[lo]

    # Rows above the window see the window's columns through one old
    # interface; fold the first column map into it so their entries are
    # expressed over the new generators without touching those rows.
    x_bridge = None
    if lo > 0:
        bv[lo - 1] = bv[lo - 1] @ np.hstack([hv[lo], bv[lo]])
        x_bridge = np.hstack([hu[lo], bu[lo]])
    gv[lo] = new_gv_lo

    for t in range(lo, hi - 1):
        # Bulge blocks and the two new rotations.
        eps_b = (ph_u @ hu[t + 1])[0, 0] - c * np.conj(q[t + 1])
        eps_a = (ph_a @ hv[t + 1])[0, 0] - chi * np.conj(w[t + 1])
        du_next = db[t + 1] + p[t + 1] * np.conj(q[t + 1])
        phi = qrot.mat.conj().T @ np.array(
            [[f_b, eps_b], [0.0, db[t + 1]]], dtype=np.complex128)
        zrot = giv(phi[1, 1], -phi[1, 0], t)  # (u1, u2) Z = (0, r)
        z_rots.append((t, zrot))
        om = np.array([[f_a, eps_a], [0.0, sigma[t + 1]]],
                      dtype=np.complex128) @ zrot.mat
        if scratch is not None:
            scratch.b_bulges.append((t, phi.copy()))
            scratch.a_bulges.append((t, om.copy()))
        qnext = giv(om[0, 0], om[1, 0], t + 1)
        q_rots.append((t + 1, qnext))
        sigma[t] = np.conj(qnext.c) * om[0, 0] + np.conj(qnext.s) * om[1, 0]

        # V rows (t+1, t+2) over columns (t | t+1 | t+2 onward).
        sig_v = sigma[t + 1] + z[t + 2] * np.conj(w[t + 1])
        gam = qnext.mat.conj().T @ np.vstack([
            np.hstack([_cell(f_v), ph_v @ hv[t + 1], ph_v @ bv[t + 1]]),
            np.hstack([_cell(z[t + 2] * np.conj(gamma)), _cell(sig_v),
                       gv[t + 2]]),
        ])
        gam[:, :2] = gam[:, :2] @ zrot.mat
        gv[t + 1] = gam[0:1, 1:]
        f_v, ph_v = gam[1, 1], gam[1:2, 2:]

        cmat = np.vstack([
            np.zeros((1, gam.shape[1]), dtype=np.complex128),
            np.hstack([np.zeros((hv[t + 1].shape[0], 1),
                                dtype=np.complex128),
                       hv[t + 1], bv[t + 1]]),
        ])
        cmat[0, 0] = 1.0
        cmat[:, :2] = cmat[:, :2] @ zrot.mat
        hv[t] = cmat[:, 0:1]
        bv[t] = cmat[:, 1:]

        # U rows (t, t+1) over columns (t | t+1 | t+2 onward).
        lam = qrot.mat.conj().T @ np.vstack([
            np.hstack([_cell(f_u), ph_u @ hu[t + 1], ph_u @ bu[t + 1]]),
            np.hstack([_cell(p[t + 1] * np.conj(theta)), _cell(du_next),
                       gu[t + 1]]),
        ])
        lam[:, :2] = lam[:, :2] @ zrot.mat
        du_diag = lam[0, 0]
        gu[t] = lam[0:1, 1:]
        f_u, ph_u = lam[1, 1], lam[1:2, 2:]

        dmat = np.vstack([
            np.zeros((1, lam.shape[1]), dtype=np.complex128),
            np.hstack([np.zeros((hu[t + 1].shape[0], 1),
                                dtype=np.complex128),
                       hu[t + 1], bu[t + 1]]),
        ])
        dmat[0, 0] = 1.0
        dmat[:, :2] = dmat[:, :2] @ zrot.mat
        if t > lo:
            hu[t] = dmat[:, 0:1]
            bu[t] = dmat[:, 1:]
        elif lo > 0:
            hu[lo] = x_bridge @ dmat[:, 0:1]
            bu[lo] = x_bridge @ dmat[:, 1:]
        # at the very top (t == lo == 0) column 0 has no rows above it

        # Perturbation vectors ride along with the rotations.
        z[t + 1], chi = _rot2(qnext, chi, z[t + 2])
        w[t], gamma = _rot2(zrot, gamma, w[t + 1])
        q[t], theta = _rot2(zrot, theta, q[t + 1])
        p[t], c = _rot2(qrot, c, p[t + 1])

        f_a, ph_a = f_v - chi * np.conj(gamma), ph_v
        f_b = f_u - c * np.conj(theta)
        db[t] = du_diag - p[t] * np.conj(q[t])
        qrot = qnext

    # Closing column rotation at the window foot.
    t = hi - 1
    eps_b = (ph_u @ hu[hi])[0, 0] - c * np.conj(q[hi])
    du_last = db[hi] + p[hi] * np.conj(q[hi])
    phi = qrot.mat.conj().T @ np.array(
        [[f_b, eps_b], [0.0, db[hi]]], dtype=np.complex128)
    zrot = giv(phi[1, 1], -phi[1, 0], t)
    z_rots.append((t, zrot))
    if scratch is not None:
        scratch.b_bulges.append((t, phi.copy()))

    # V: final row hi over columns (hi-1 | hi | onward).
    if hi == n - 1:
        row = np.hstack([_cell(f_v), ph_v @ hv[hi]]) @ zrot.mat
        td_v = row[0, 0]
        gv[hi] = row[0:1, 1:]
        cmat = np.vstack([
            np.zeros((1, 2), dtype=np.complex128),
            np.hstack([np.zeros((hv[hi].shape[0], 1), dtype=np.complex128),
                       hv[hi]]),
        ])
        cmat[0, 0] = 1.0
        cmat = cmat @ zrot.mat
        hv[hi - 1] = cmat[:, 0:1]
        bv[hi - 1] = cmat[:, 1:]
        hv[hi] = _cell(1.0)
    else:
        r_tail = bv[hi].shape[1]
        row = np.hstack([_cell(f_v), ph_v @ hv[hi], ph_v @ bv[hi]])
        row[:, :2] = row[:, :2] @ zrot.mat
        td_v = row[0, 0]
        gv[hi] = row[0:1, 1:]
        cmat = np.vstack([
            np.zeros((1, 2 + r_tail), dtype=np.complex128),
            np.hstack([np.zeros((hv[hi].shape[0], 1), dtype=np.complex128),
                       hv[hi], bv[hi]]),
        ])
        cmat[0, 0] = 1.0
        cmat[:, :2] = cmat[:, :2] @ zrot.mat
        hv[hi - 1] = cmat[:, 0:1]
        bv[hi - 1] = cmat[:, 1:]
        ecol = np.zeros((1 + r_tail, 1), dtype=np.complex128)
        ecol[0, 0] = 1.0
        hv[hi] = ecol
        bv[hi] = np.vstack([np.zeros((1, r_tail), dtype=np.complex128),
                            np.eye(r_tail, dtype=np.complex128)])

    # U: final rows (hi-1, hi).
    if hi == n - 1:
        lam = qrot.mat.conj().T @ np.vstack([
            np.hstack([_cell(f_u), ph_u @ hu[hi]]),
            np.hstack([_cell(p[hi] * np.conj(theta)), _cell(du_last)]),
        ]) @ zrot.mat
        du_pen, du_end = lam[0, 0], lam[1, 1]
        gu[hi - 1] = lam[0:1, 1:]
        dmat = np.vstack([
            np.zeros((1, 2), dtype=np.complex128),
            np.hstack([np.zeros((hu[hi].shape[0], 1), dtype=np.complex128),
                       hu[hi]]),
        ])
        dmat[0, 0] = 1.0
        dmat = dmat @ zrot.mat
        if hi - 1 > lo:
            hu[hi - 1] = dmat[:, 0:1]
            bu[hi - 1] = dmat[:, 1:]
        elif lo > 0:
            hu[lo] = x_bridge @ dmat[:, 0:1]
            bu[lo] = x_bridge @ dmat[:, 1:]
        hu[hi] = _cell(1.0)
    else:
        ru_tail = bu[hi].shape[1]
        lam = qrot.mat.conj().T @ np.vstack([
            np.hstack([_cell(f_u), ph_u @ hu[hi], ph_u @ bu[hi]]),
            np.hstack([_cell(p[hi] * np.conj(theta)), _cell(du_last),
                       gu[hi]]),
        ])
        lam[:, :2] = lam[:, :2] @ zrot.mat
        du_pen, du_end = lam[0, 0], lam[1, 1]
        gu[hi - 1] = lam[0:1, 1:]
        gu[hi] = lam[1:2, 2:]
        dmat = np.vstack([
            np.zeros((1, 2 + ru_tail), dtype=np.complex128),
            np.hstack([np.zeros((hu[hi].shape[0], 1), dtype=np.complex128),
                       hu[hi], bu[hi]]),
        ])
        dmat[0, 0] = 1.0
        dmat[:, :2] = dmat[:, :2] @ zrot.mat
        if hi - 1 > lo:
            hu[hi - 1] = dmat[:, 0:1]
            bu[hi - 1] = dmat[:, 1:]
        elif lo > 0:
            hu[lo] = x_bridge @ dmat[:, 0:1]
            bu[lo] = x_bridge @ dmat[:, 1:]
        ecol = np.zeros((1 + ru_tail, 1), dtype=np.complex128)
        ecol[0, 0] = 1.0
        hu[hi] = ecol
        bu[hi] = np.vstack([np.zeros((1, ru_tail), dtype=np.complex128),
                            np.eye(ru_tail, dtype=np.complex128)])

    # Finish the perturbation vectors and recover the last diagonals.
    w[hi - 1], w[hi] = _rot2(zrot, gamma, w[hi])
    q[hi - 1], q[hi] = _rot2(zrot, theta, q[hi])
    p[hi - 1], p[hi] = _rot2(qrot, c, p[hi])
    z[hi] = chi
    sigma[hi - 1] = td_v - z[hi] * np.conj(w[hi - 1])
    db[hi - 1] = du_pen - p[hi - 1] * np.conj(q[hi - 1])
    db[hi] = du_end - p[hi] * np.conj(q[hi])

    out = PencilGenerators(
        n=n,
        sigma=sigma,
        v=TriangularGenerators(g=gv, h=hv, b=bv),
        d_b=db,
        u=QuasiseparableGenerators(g=gu, h=hu, b=bu),
        z=z, w=w, p=p, q=q,
    )
    return (out, (q_rots, z_rots)) if capture else (out, None)


# ---------------------------------------------------------------------------
# Full iteration
# ---------------------------------------------------------------------------

def _padded_diag_a(pp):
    """Diagonal of A from padded arrays (dead lanes are zero)."""
    return (pp.gv * pp.hv).sum(axis=1) - pp.z * np.conj(pp.w)


def _extract_padded(pp, tol_b, converged_from=0):
    diag = _padded_diag_a(pp)
    d = np.abs(pp.db)
    thresh = tol_b * (d.max() if d.size else 0.0)
    pairs = []
    for k in range(converged_from, pp.n):
        beta = pp.db[k]
        if abs(beta) <= thresh:
            pairs.append((complex(diag[k]), 0.0 + 0.0j))
        else:
            pairs.append((complex(diag[k]), complex(beta)))
    return EigenResult(eigenvalues=pairs)


def eigenvalues(gen, max_iter_per_eig=DEFAULT_MAX_SWEEPS_PER_EIG,
                tol_a=None, tol_b=None):
    """All generalized eigenvalues of a generator-represented pencil.

    Implicit single-shift QZ on the active trailing unreduced block,
    recompressing the unitary parts after every sweep so the generator
    orders stay at one for U and at most two for V.  One sweep costs
    O(N), giving O(N^2) for the full spectrum at the usual O(1) sweeps
    per eigenvalue.  Shift, deflation and exceptional-shift policies are
    shared with dense_eigenvalues so the two paths stay comparable.

    Returns an EigenResult with (alpha, beta) pairs in diagonal order;
    beta is zero for infinite eigenvalues.  Raises ConvergenceError
    (carrying the partial spectrum) after max_iter_per_eig * N sweeps.
    """
    # The compiled kernels pull in numba; import on first use so plain
    # generator work stays light.
    from ._kernels import (U_CAP, V_CAP, compress_u_kernel,
                           compress_v_kernel, pad_pencil, sweep_kernel)
    from .compress import ORTHONORMALITY_TOL, compress_pencil

    if tol_a is None:
        tol_a = EPS
    if tol_b is None:
        tol_b = EPS

    n = gen.n
    if n == 1:
        res = _extract_padded(pad_pencil(gen), tol_b)
        res.iterations = [0]
        return res

    if max(gen.v.orders) > V_CAP - 1 or max(gen.u.orders) > U_CAP - 1:
        gen = compress_pencil(gen)
    pp = pad_pencil(gen)

    def run_compress():
        code = compress_u_kernel(pp.db, pp.p, pp.q, pp.gu, pp.hu, pp.bu,
                                 pp.ru, ORTHONORMALITY_TOL)
        if code == 0:
            code = compress_v_kernel(pp.sigma, pp.z, pp.w, pp.gv, pp.hv,
                                     pp.bv, pp.rv, ORTHONORMALITY_TOL)
        if code > 0:
            raise NumericalError(
                "finalized columns at block %d lost orthonormality; "
                "the unitary part drifted" % (code - 1))
        if code < 0:
            raise NumericalError(
                "non-finite value while compressing at block %d"
                % (-code - 1))

    iters = []
    total = 0
    since = 0
    budget = max_iter_per_eig * n
    hi = n - 1
    diag = _padded_diag_a(pp)

    def negligible(k):
        return abs(pp.sigma[k - 1]) <= tol_a * (abs(diag[k - 1])
                                                + abs(diag[k]))

    while True:
        while hi > 0 and negligible(hi):
            pp.sigma[hi - 1] = 0.0
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
            pp.sigma[lo - 1] = 0.0  # interior split found by the scan
        if total >= budget:
            partial = _extract_padded(pp, tol_b, converged_from=hi + 1)
            partial.iterations = iters
            partial.total_sweeps = total
            raise ConvergenceError(
                "QZ failed to converge within %d sweeps (%d of %d "
                "eigenvalues found)" % (budget, n - 1 - hi, n), partial)

        # Trailing 2x2 blocks straight off the padded generators.
        a12 = ((pp.gv[hi - 1] @ pp.bv[hi - 1]) @ pp.hv[hi]
               - pp.z[hi - 1] * np.conj(pp.w[hi]))
        b12 = pp.gu[hi - 1] @ pp.hu[hi] - pp.p[hi - 1] * np.conj(pp.q[hi])
        A2 = np.array([[diag[hi - 1], a12],
                       [pp.sigma[hi - 1], diag[hi]]], dtype=np.complex128)
        B2 = np.array([[pp.db[hi - 1], b12],
                       [0.0, pp.db[hi]]], dtype=np.complex128)
        root = shift_from_blocks(A2, B2)
        if since > 0 and since % STAGNATION_PERIOD == 0:
            root = exceptional_shift(root, abs(pp.sigma[hi - 1]),
                                     abs(pp.db[hi - 1]), abs(pp.db[hi]))
        code = sweep_kernel(lo, hi, complex(root * pp.db[lo]),
                            pp.sigma, pp.db, pp.z, pp.w, pp.p, pp.q,
                            pp.gv, pp.hv, pp.bv, pp.rv,
                            pp.gu, pp.hu, pp.bu, pp.ru)
        if code != 0:
            raise NumericalError(
                "non-finite value while chasing at column %d" % (code - 1))
        run_compress()
        total += 1
        since += 1
        diag = _padded_diag_a(pp)

    result = _extract_padded(pp, tol_b)
    result.iterations = iters[::-1]  # bottom-up deflation order -> index order
    result.total_sweeps = total
    return result
