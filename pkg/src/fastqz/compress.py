"""Minimal-order upper generators for block unitary matrices.

A sweep leaves the unitary parts of the pencil with upper generators one
order larger than necessary.  Because the matrices are unitary, the rank
of every upper off-diagonal block is pinned down by the complementary
lower block, so the redundancy can be squeezed out again.  The engine
here does that in one forward pass: per block column it splits off the
directions already explained by the lower generators (a small QR), then
completes the remaining orthonormal columns to a unitary row mixer whose
trailing columns *are* the new upper generators.

Everything below the block diagonal, and the diagonal itself, is reused
verbatim; only g/b/h are replaced.  Two wrappers adapt the pencil
storage: U compresses with scalar blocks, V through a blocking shifted
by one column so that V's subdiagonal becomes the block diagonal and the
compressed generators cover V's main diagonal as well.
"""

from dataclasses import dataclass, field

import numpy as np

from .generators import (
    NumericalError,
    PencilGenerators,
    QuasiseparableGenerators,
    TriangularGenerators,
    make_givens,
)

# Inputs come out of floating-point sweeps, so the orthonormality that
# unitarity guarantees in exact arithmetic is only checked loosely.
ORTHONORMALITY_TOL = 1e-8


def _empty(rows, cols):
    return np.zeros((rows, cols), dtype=np.complex128)


@dataclass
class CompressionState:
    """Per-step quantities kept around for checks and debugging.

    ``rho[k]`` is the achieved lower rank at cut k+1 and ``nu[k]`` the
    number of columns finalized at step k+1 (``nu`` has one extra entry
    for the last block).  ``s[k]`` is the resulting upper order.  The
    unitary column mixers W and row mixers F are the factors verified by
    :func:`wf_factorization_check`; ``x``, ``y`` and ``z_aux`` hold the
    final recursion matrices.
    """

    rho: list = field(default_factory=list)
    nu: list = field(default_factory=list)
    s: list = field(default_factory=list)
    w_factors: list = field(default_factory=list)
    f_factors: list = field(default_factory=list)
    x: np.ndarray = None
    y: np.ndarray = None
    z_aux: np.ndarray = None


def _unitary_with_leading_columns(cols, dim):
    """Complete orthonormal ``cols`` to a dim x dim unitary matrix.

    Built as a product of Givens rotations, so the result is unitary to
    machine precision regardless of the quality of ``cols``; its leading
    columns match ``cols`` up to their own orthonormality defect.
    """
    f = np.eye(dim, dtype=np.complex128)
    if cols.shape[1] == 0:
        return f
    r = np.array(cols, dtype=np.complex128, copy=True)
    for j in range(cols.shape[1]):
        for i in range(dim - 1, j, -1):
            rot = make_givens(r[i - 1, j], r[i, j])
            r[i - 1:i + 1, :] = rot.mat.conj().T @ r[i - 1:i + 1, :]
            f[:, i - 1:i + 1] = f[:, i - 1:i + 1] @ rot.mat
    return f


def _check_block_shapes(p, q, a, g, b, h, d, m, n):
    nblocks = len(m)
    if len(n) != nblocks:
        raise ValueError("row and column block counts differ")
    if not (len(p) == len(h) == len(d) == nblocks
            and len(q) == len(g) == len(a) == len(b) == nblocks - 1):
        raise ValueError("generator list lengths do not match block count")
    rl = [qj.shape[0] for qj in q]
    ru = [gi.shape[1] for gi in g]
    for t in range(nblocks - 1):
        if q[t].shape != (rl[t], n[t]):
            raise ValueError(f"q[{t}] has shape {q[t].shape}")
        if g[t].shape != (m[t], ru[t]):
            raise ValueError(f"g[{t}] has shape {g[t].shape}")
    for t in range(1, nblocks):
        if p[t].shape != (m[t], rl[t - 1]):
            raise ValueError(f"p[{t}] has shape {p[t].shape}")
        if h[t].shape != (ru[t - 1], n[t]):
            raise ValueError(f"h[{t}] has shape {h[t].shape}")
    for t in range(1, nblocks - 1):
        if a[t].shape != (rl[t], rl[t - 1]):
            raise ValueError(f"a[{t}] has shape {a[t].shape}")
        if b[t].shape != (ru[t - 1], ru[t]):
            raise ValueError(f"b[{t}] has shape {b[t].shape}")
    for t in range(nblocks):
        if d[t].shape != (m[t], n[t]):
            raise ValueError(f"d[{t}] has shape {d[t].shape}")
    return rl, ru


def compress_unitary(lower, upper, diag, block_sizes, *, state=None):
    """Rebuild the upper generators of a block unitary matrix at minimal
    order.

    Parameters
    ----------
    lower : (p, q, a)
        Lower generators as 0-based lists: ``p[i]`` for block rows
        i >= 1, ``q[j]`` for block columns j <= N-2 and transition
        matrices ``a[k]`` for k >= 1.  ``p[0]``, ``a[0]`` are never read.
    upper : (g, b, h)
        Upper generators of possibly redundant order, laid out the same
        way (``b[0]`` and ``h[0]`` are never read).
    diag : list
        Block diagonal entries, one m_k x n_k array per block.
    block_sizes : (m, n)
        Row and column sizes of the blocks.
    state : CompressionState, optional
        Filled with the per-step factors and rank bookkeeping.

    Returns
    -------
    (g_s, h_s, b_s)
        New upper generators: ``g_s[i]`` for rows i = 0..N-2, ``h_s[j]``
        for columns j = 1..N-1 stored from index 0, and ``b_s[k]`` for
        k = 1..N-2 stored from index 0.  Their orders are the minimal
        ones implied by the block sizes and lower orders.

    Raises
    ------
    ValueError
        If generator shapes are inconsistent with the block sizes.
    NumericalError
        If the columns that unitarity forces to be orthonormal are not,
        beyond ORTHONORMALITY_TOL; this is how a non-unitary input shows
        itself.
    """
    p, q, a = lower
    g, b, h = upper
    m, n = block_sizes
    nblocks = len(m)
    rl, ru = _check_block_shapes(p, q, a, g, b, h, d=diag, m=m, n=n)

    x_cur = _empty(0, 0)
    y_cur = _empty(0, 0)
    z_aux = _empty(0, 0)
    hs_cur = _empty(0, n[0]) if nblocks else None
    rho_prev = 0
    s_prev = 0

    gs, hs, bs = [], [], []
    for t in range(nblocks - 1):
        a_t = a[t] if t else _empty(rl[0], 0)
        p_t = p[t] if t else _empty(m[0], 0)
        b_t = b[t] if t else _empty(0, ru[0])

        rho = min(n[t] + rho_prev, rl[t])
        nu = n[t] + rho_prev - rho
        s_cur = m[t] + s_prev - nu
        if s_cur < 0:
            raise ValueError(
                f"block sizes leave a negative upper order at cut {t + 1}")

        # Column mixer: rotate the lower-generator span of the columns
        # handled so far onto the trailing rho coordinates, leaving nu
        # columns with no lower part at all.
        width = n[t] + rho_prev
        if width:
            mixed = np.hstack([a_t @ x_cur, q[t]])
            qf, rf = np.linalg.qr(mixed.conj().T, mode="complete")
            wmat = qf[:, ::-1].conj().T
            x_next = rf[:rho][::-1].conj().T
        else:
            wmat = _empty(0, 0)
            x_next = _empty(rl[t], 0)

        zmat = np.vstack([
            np.hstack([z_aux, hs_cur]),
            np.hstack([p_t @ x_cur, diag[t]]),
        ]) @ wmat.conj().T

        finalized = zmat[:, :nu]
        h_top = zmat[:s_prev, nu:]
        h_bot = zmat[s_prev:, nu:]
        if nu:
            gram = finalized.conj().T @ finalized
            defect = float(np.max(np.abs(gram - np.eye(nu))))
            if defect > ORTHONORMALITY_TOL:
                raise NumericalError(
                    "finalized columns at block %d lost orthonormality "
                    "by %.2e; input is not unitary" % (t + 1, defect))

        fmat = _unitary_with_leading_columns(finalized, s_prev + m[t])
        bs_k = fmat[:s_prev, nu:]
        gs_k = fmat[s_prev:, nu:]

        y_cur = gs_k.conj().T @ g[t] + bs_k.conj().T @ y_cur @ b_t
        z_aux = gs_k.conj().T @ h_bot + bs_k.conj().T @ h_top
        hs_cur = y_cur @ h[t + 1]

        gs.append(gs_k)
        bs.append(bs_k)
        hs.append(hs_cur)
        if state is not None:
            state.rho.append(rho)
            state.nu.append(nu)
            state.s.append(s_cur)
            state.w_factors.append(wmat)
            state.f_factors.append(fmat)
        x_cur = x_next
        rho_prev = rho
        s_prev = s_cur

    # Terminal block: everything left is already expressed through the
    # accumulated coordinates, so the last mixer needs no computation --
    # assembling it (and checking it is unitary, which tests do) is the
    # whole terminal step.
    p_last = p[nblocks - 1] if nblocks > 1 else _empty(m[0], 0)
    f_last = np.vstack([
        np.hstack([z_aux, hs_cur]),
        np.hstack([p_last @ x_cur, diag[nblocks - 1]]),
    ])
    if state is not None:
        state.nu.append(n[nblocks - 1] + rho_prev)
        state.f_factors.append(f_last)
        state.x = x_cur
        state.y = y_cur
        state.z_aux = z_aux
    return gs, hs, bs[1:]


def wf_factorization_check(u_dense, w_factors, f_factors, nu):
    """Residual of reassembling a matrix from its compression factors.

    Test-only utility.  Each row mixer F_k and column mixer W_k acts on
    a window starting at offset nu_1 + ... + nu_{k-1}; embedding them
    into full-size identities, the product of all F's times the product
    of all W's in reverse step order must reproduce the original matrix.
    Returns the max-abs deviation from ``u_dense``.
    """
    size = u_dense.shape[0]
    offsets = [0]
    for count in nu[:-1]:
        offsets.append(offsets[-1] + count)

    def embed(mat, off):
        out = np.eye(size, dtype=np.complex128)
        dim = mat.shape[0]
        out[off:off + dim, off:off + dim] = mat
        return out

    f_full = np.eye(size, dtype=np.complex128)
    for k, fk in enumerate(f_factors):
        f_full = f_full @ embed(fk, offsets[k])
    w_full = np.eye(size, dtype=np.complex128)
    for k, wk in enumerate(w_factors):
        w_full = embed(wk, offsets[k]) @ w_full
    return float(np.max(np.abs(f_full @ w_full - u_dense)))


# ---------------------------------------------------------------------------
# Pencil-facing wrappers
# ---------------------------------------------------------------------------

def _cell(value):
    return np.array([[value]], dtype=np.complex128)


def _compressed_u(gen, state=None):
    """Order-1 strictly-upper generators for the unitary part of B."""
    nb = gen.n
    m = [1] * nb
    n = [1] * nb
    d = [_cell(gen.d_b[k] + gen.p[k] * np.conj(gen.q[k])) for k in range(nb)]
    p = [None] + [_cell(gen.p[i]) for i in range(1, nb)]
    q = [_cell(np.conj(gen.q[j])) for j in range(nb - 1)]
    a = ([None] + [_cell(1.0) for _ in range(nb - 2)]) if nb >= 2 else []
    b = gen.u.b if nb >= 2 else []

    gs, hs, bs = compress_unitary(
        (p, q, a), (gen.u.g, b, gen.u.h), d, (m, n), state=state)
    return QuasiseparableGenerators(gs, [None] + hs, [None] + bs)


def _compressed_v(gen, state=None):
    """Diagonal-inclusive upper generators for the unitary part of A.

    Blocking: row blocks are the scalar rows followed by an empty one,
    column blocks an empty one followed by the scalar columns.  That
    shift puts V's subdiagonal on the block diagonal and its main
    diagonal strictly above, so the compressed block-upper generators
    are exactly the diagonal-inclusive scalar ones, at orders
    (1, 2, ..., 2).
    """
    nb = gen.n
    m = [1] * nb + [0]
    n = [0] + [1] * nb
    sigma_v = np.empty(nb - 1, dtype=np.complex128)
    for k in range(nb - 1):
        sigma_v[k] = gen.sigma[k] + gen.z[k + 1] * np.conj(gen.w[k])

    d = ([_empty(1, 0)]
         + [_cell(sigma_v[t - 1]) for t in range(1, nb)]
         + [_empty(0, 1)])
    p = [None] + [_cell(gen.z[t]) for t in range(1, nb)] + [_empty(0, 1)]
    q = [_empty(1, 0)] + [_cell(np.conj(gen.w[t - 1])) for t in range(1, nb)]
    a = [None] + [_cell(1.0) for _ in range(nb - 1)]
    g = list(gen.v.g)
    h = [None] + list(gen.v.h)
    b = [None] + list(gen.v.b)

    gs, hs, bs = compress_unitary(
        (p, q, a), (g, b, h), d, (m, n), state=state)
    return TriangularGenerators(gs, hs, bs)


def compress_pencil(gen):
    """Same pencil, minimal-order generators for both unitary parts.

    The scalar data (sigma, d_b, z, w, p, q) is copied unchanged; only
    the upper generator lists of U and V are rebuilt.  Deflated
    subdiagonal zeros therefore survive compression exactly.
    """
    u_new = _compressed_u(gen)
    v_new = _compressed_v(gen)
    return PencilGenerators(gen.n, gen.sigma.copy(), v_new, gen.d_b.copy(),
                            u_new, gen.z.copy(), gen.w.copy(),
                            gen.p.copy(), gen.q.copy())
