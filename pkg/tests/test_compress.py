"""Order reduction of redundant unitary-matrix generators.

The oracle throughout is dense reconstruction: block generators are
multiplied out entry by entry (independently of the engine's recursions)
and compared against either an explicitly constructed unitary matrix or
the pre-compression reconstruction.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import crandn
from fastqz.compress import (
    CompressionState,
    _compressed_u,
    _compressed_v,
    compress_pencil,
    compress_unitary,
    wf_factorization_check,
)
from fastqz.generators import (
    NumericalError,
    build_companion_pencil,
    reconstruct_dense,
)
from fastqz.structured import deflation_scan, qz_sweep, wilkinson_shift


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def dense_from_blocks(p, q, a, g, b, h, d, m, n):
    """Multiply block generators out into a dense matrix (test oracle)."""
    rows = np.concatenate([[0], np.cumsum(m)])
    cols = np.concatenate([[0], np.cumsum(n)])
    nb = len(m)
    out = np.zeros((rows[-1], cols[-1]), dtype=np.complex128)
    for i in range(nb):
        for j in range(nb):
            if i == j:
                blk = d[i]
            elif i < j:
                acc = g[i]
                for k in range(i + 1, j):
                    acc = acc @ b[k]
                blk = acc @ h[j]
            else:
                acc = p[i]
                for k in range(i - 1, j, -1):
                    acc = acc @ a[k]
                blk = acc @ q[j]
            out[rows[i]:rows[i + 1], cols[j]:cols[j + 1]] = blk
    return out


def cell(x):
    return np.array([[x]], dtype=np.complex128)


def scalar_blocks(n, fill):
    return [cell(v) for v in fill]


def ascending_rotation_unitary(rng, n):
    """Dense n x n unitary: adjacent rotations applied bottom-up on the
    left of a diagonal phase matrix.  Its strictly lower part is exactly
    rank one, its upper part is confined to the first superdiagonal."""
    u = np.diag(np.exp(2j * np.pi * rng.random(n))).astype(np.complex128)
    for k in range(n - 1):
        v = crandn(rng, 2)
        c, s = v / np.linalg.norm(v)
        rot = np.eye(n, dtype=np.complex128)
        rot[k:k + 2, k:k + 2] = [[c, -np.conj(s)], [s, np.conj(c)]]
        u = rot @ u
    return u


def generators_of_ascending_unitary(u):
    """Order-one block generators read off the dense matrix."""
    n = u.shape[0]
    p = [None] + [cell(u[i, 0]) for i in range(1, n)]
    q = [cell(u[n - 1, j] / u[n - 1, 0]) for j in range(n - 1)]
    a = [None] + [cell(1.0) for _ in range(n - 2)]
    g = [cell(u[i, i + 1]) for i in range(n - 1)]
    h = [None] + [cell(1.0) for _ in range(n - 1)]
    b = [None] + [cell(0.0) for _ in range(n - 2)]
    d = [cell(u[k, k]) for k in range(n)]
    return (p, q, a), (g, b, h), d


def inflate_upper(upper, rng, extra):
    """Equivalent upper generators carrying ``extra`` junk dimensions.

    The junk columns of g and b never reach h (whose padding is zero),
    so reconstruction is unchanged while every order grows by ``extra``.
    """
    g, b, h = upper
    g2 = [np.hstack([gi, crandn(rng, 1, extra)]) for gi in g]
    h2 = [None] + [np.vstack([hj, np.zeros((extra, 1))]) for hj in h[1:]]
    b2 = [None]
    for bk in b[1:]:
        rows, colstd = bk.shape
        b2.append(np.vstack([
            np.hstack([bk, crandn(rng, rows, extra)]),
            np.hstack([np.zeros((extra, colstd)), crandn(rng, extra, extra)]),
        ]))
    return g2, b2, h2


def swept_companion(rng, degree, sweeps=1):
    gen = build_companion_pencil(crandn(rng, degree + 1))
    for _ in range(sweeps):
        alpha = wilkinson_shift(gen) * gen.d_b[0]
        gen, _ = qz_sweep(gen, alpha)
    return gen


# ---------------------------------------------------------------------------
# engine on explicit block inputs
# ---------------------------------------------------------------------------

def test_identity_with_padded_generators_is_exact():
    n = 6
    m = [1] * n
    p = [None] + [cell(0.0)] * (n - 1)
    q = [cell(0.0)] * (n - 1)
    a = [None] + [cell(1.0)] * (n - 2)
    g = [np.zeros((1, 2), dtype=np.complex128)] * (n - 1)
    h = [None] + [np.zeros((2, 1), dtype=np.complex128)] * (n - 1)
    b = [None] + [np.zeros((2, 2), dtype=np.complex128)] * (n - 2)
    d = [cell(1.0)] * n

    gs, hs, bs = compress_unitary((p, q, a), (g, b, h), d, (m, m))
    assert all(gi.shape == (1, 1) for gi in gs)
    rebuilt = dense_from_blocks(p, q, a, gs, [None] + bs, [None] + hs,
                                d, m, m)
    assert np.array_equal(rebuilt, np.eye(n))


def test_rotation_product_unitary_compresses_to_order_one(rng):
    n = 8
    u = ascending_rotation_unitary(rng, n)
    lower, upper, d = generators_of_ascending_unitary(u)
    m = [1] * n
    # the extraction itself must reproduce the matrix before we inflate
    base = dense_from_blocks(*lower, *upper, d, m, m)
    assert np.max(np.abs(base - u)) <= 1e-13

    fat = inflate_upper(upper, rng, extra=2)
    assert [gi.shape[1] for gi in fat[0]] == [3] * (n - 1)
    assert np.max(np.abs(dense_from_blocks(*lower, *fat, d, m, m) - u)) \
        <= 1e-12

    gs, hs, bs = compress_unitary(lower, fat, d, (m, m))
    assert [gi.shape[1] for gi in gs] == [1] * (n - 1)
    rebuilt = dense_from_blocks(*lower, gs, [None] + bs, [None] + hs,
                                d, m, m)
    assert np.max(np.abs(rebuilt - u)) <= 1e-13


@settings(deadline=None, max_examples=40)
@given(n=st.integers(2, 9), seed=st.integers(0, 2**31 - 1))
def test_rotation_product_property(n, seed):
    rng = np.random.default_rng(seed)
    u = ascending_rotation_unitary(rng, n)
    lower, upper, d = generators_of_ascending_unitary(u)
    m = [1] * n
    gs, hs, bs = compress_unitary(lower, upper, d, (m, m))
    assert [gi.shape[1] for gi in gs] == [1] * (n - 1)
    rebuilt = dense_from_blocks(*lower, gs, [None] + bs, [None] + hs,
                                d, m, m)
    assert np.max(np.abs(rebuilt - u)) <= 1e-12


def test_non_unitary_input_is_detected(rng):
    n = 6
    u = ascending_rotation_unitary(rng, n)
    lower, upper, d = generators_of_ascending_unitary(u)
    d[2] *= 2.0  # breaks unitarity, not shapes
    with pytest.raises(NumericalError, match="orthonormality"):
        compress_unitary(lower, upper, d, ([1] * n, [1] * n))


def test_shape_mismatch_is_rejected(rng):
    n = 5
    u = ascending_rotation_unitary(rng, n)
    (p, q, a), (g, b, h), d = generators_of_ascending_unitary(u)
    b[2] = np.zeros((2, 2), dtype=np.complex128)  # inconsistent with g
    with pytest.raises(ValueError, match="b\\[2\\]"):
        compress_unitary((p, q, a), (g, b, h), d, ([1] * n, [1] * n))


# ---------------------------------------------------------------------------
# pencil wrappers
# ---------------------------------------------------------------------------

def test_swept_pencil_compresses_to_minimal_orders(rng):
    swept = swept_companion(rng, 10)
    before = reconstruct_dense(swept)
    comp = compress_pencil(swept)
    after = reconstruct_dense(comp)
    assert comp.u.orders == [1] * 9
    assert comp.v.orders == [1] + [2] * 9
    for got, want in zip(after, before):
        assert np.max(np.abs(got - want)) <= 1e-13


def test_double_sweep_orders_three_still_compress(rng):
    # sweeping a compressed pencil pushes V's orders to three
    swept = swept_companion(rng, 7)
    comp = compress_pencil(swept)
    alpha = wilkinson_shift(comp) * comp.d_b[0]
    again, _ = qz_sweep(comp, alpha)
    assert max(again.v.orders) == 3
    before = reconstruct_dense(again)
    final = compress_pencil(again)
    after = reconstruct_dense(final)
    assert final.u.orders == [1] * 6
    assert final.v.orders == [1] + [2] * 6
    for got, want in zip(after, before):
        assert np.max(np.abs(got - want)) <= 1e-13


def test_compression_is_idempotent(rng):
    comp = compress_pencil(swept_companion(rng, 8))
    twice = compress_pencil(comp)
    assert twice.u.orders == comp.u.orders
    assert twice.v.orders == comp.v.orders
    for got, want in zip(reconstruct_dense(twice), reconstruct_dense(comp)):
        assert np.max(np.abs(got - want)) <= 1e-14


def test_degree_one_pencil_passes_through(rng):
    comp = compress_pencil(build_companion_pencil([1.5 - 0.5j, 2.0]))
    a, b, _, _ = reconstruct_dense(comp)
    assert a.shape == (1, 1)
    assert abs(a[0, 0] - (-1.5 + 0.5j)) <= 1e-15
    assert abs(b[0, 0] - 2.0) <= 1e-15


def test_deflated_zeros_survive_compression():
    # an exact-root shift deflates the trailing subdiagonal for real
    roots = np.array([1.0, -2.0, 3.0 + 1.0j, 0.5j, -1.5])
    gen = build_companion_pencil(np.ascontiguousarray(np.poly(roots)[::-1]))
    swept, _ = qz_sweep(gen, roots[0] * gen.d_b[0])
    deflation_scan(swept, tol_a=1e-12)
    assert swept.sigma[-1] == 0.0
    comp = compress_pencil(swept)
    assert comp.sigma[-1] == 0.0
    a1, _, _, _ = reconstruct_dense(comp)
    assert a1[4, 3] == 0.0


# ---------------------------------------------------------------------------
# factorization of the matrix into the captured mixers
# ---------------------------------------------------------------------------

def test_wf_factorization_u_case(rng):
    swept = swept_companion(rng, 8)
    u_dense = reconstruct_dense(swept)[3]
    state = CompressionState()
    _compressed_u(swept, state=state)
    assert wf_factorization_check(
        u_dense, state.w_factors, state.f_factors, state.nu) <= 1e-13


def test_wf_factorization_v_case(rng):
    swept = swept_companion(rng, 8)
    v_dense = reconstruct_dense(swept)[2]
    state = CompressionState()
    _compressed_v(swept, state=state)
    assert wf_factorization_check(
        v_dense, state.w_factors, state.f_factors, state.nu) <= 1e-13


def test_wf_factorization_single_block():
    gen = build_companion_pencil([2.0, 1.0])
    u_dense = reconstruct_dense(gen)[3]
    state = CompressionState()
    _compressed_u(gen, state=state)
    assert state.w_factors == []
    assert len(state.f_factors) == 1
    assert wf_factorization_check(
        u_dense, state.w_factors, state.f_factors, state.nu) == 0.0
