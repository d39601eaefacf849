"""Compiled inner loops over zero-padded generator arrays.

The readable reference implementations live in `structured` (the sweep)
and `compress` (the recompression); this module repeats them step for
step on flat arrays so numba can compile the O(N) inner loops.  Keep the
two in lockstep: any change to the reference must land here too.

Layout.  Generator slots are rows/planes of fixed-capacity arrays whose
unused entries are exactly zero:

* ``gv[k, :]``, ``hv[k, :]`` -- V's diagonal-inclusive upper generators,
  capacity ``V_CAP`` per slot, logical width ``rv[k]``;
* ``bv[k, :, :]`` -- the (rv[k], rv[k+1]) transition block;
* ``gu``, ``hu``, ``bu``, ``ru`` -- the same for U's strictly upper
  generators (capacity ``U_CAP``; slot 0 of ``hu``/``bu`` is unused);
* ``sigma, db, z, w, p, q`` -- the subdiagonal, B-diagonal and rank-one
  vectors, plain complex128.

Because the padding is zero, every product can run over full capacity:
the dead lanes contribute nothing and results come out zero-padded
again.  A sweep grows each order by one, so callers must keep inputs at
``rv <= V_CAP - 1`` and ``ru <= U_CAP - 1`` (what the compressions
produce) or the slots overflow silently.

Kernels return 0 on success; nonzero codes identify the failing column
or block so the Python caller can raise with context.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .generators import (PencilGenerators, QuasiseparableGenerators,
                         TriangularGenerators)

V_CAP = 3
U_CAP = 2


@dataclass
class PaddedPencil:
    """Flat-array mirror of PencilGenerators for the compiled kernels."""

    n: int
    sigma: np.ndarray
    db: np.ndarray
    z: np.ndarray
    w: np.ndarray
    p: np.ndarray
    q: np.ndarray
    gv: np.ndarray
    hv: np.ndarray
    bv: np.ndarray
    rv: np.ndarray
    gu: np.ndarray
    hu: np.ndarray
    bu: np.ndarray
    ru: np.ndarray


def pad_pencil(gen):
    """Copy a generator set into fixed-capacity zero-padded arrays.

    Orders must fit the kernel capacities; callers holding fatter
    generators compress first.
    """
    n = gen.n
    nb = max(n - 1, 1)
    rv = np.zeros(n, dtype=np.int64)
    for k in range(n):
        rv[k] = gen.v.g[k].shape[1]
    ru = np.zeros(nb, dtype=np.int64)
    for k in range(n - 1):
        ru[k] = gen.u.g[k].shape[1]
    if rv.max() > V_CAP or (n > 1 and ru.max() > U_CAP):
        raise ValueError("generator orders (%d, %d) exceed the kernel "
                         "capacities (%d, %d)"
                         % (rv.max(), ru.max(), V_CAP, U_CAP))

    pp = PaddedPencil(
        n=n,
        sigma=np.array(gen.sigma, dtype=np.complex128),
        db=np.array(gen.d_b, dtype=np.complex128),
        z=np.array(gen.z, dtype=np.complex128),
        w=np.array(gen.w, dtype=np.complex128),
        p=np.array(gen.p, dtype=np.complex128),
        q=np.array(gen.q, dtype=np.complex128),
        gv=np.zeros((n, V_CAP), dtype=np.complex128),
        hv=np.zeros((n, V_CAP), dtype=np.complex128),
        bv=np.zeros((nb, V_CAP, V_CAP), dtype=np.complex128),
        rv=rv,
        gu=np.zeros((nb, U_CAP), dtype=np.complex128),
        hu=np.zeros((n, U_CAP), dtype=np.complex128),
        bu=np.zeros((nb, U_CAP, U_CAP), dtype=np.complex128),
        ru=ru,
    )
    for k in range(n):
        pp.gv[k, :rv[k]] = gen.v.g[k][0, :]
        pp.hv[k, :rv[k]] = gen.v.h[k][:, 0]
    for k in range(n - 1):
        pp.bv[k, :rv[k], :rv[k + 1]] = gen.v.b[k]
    for k in range(n - 1):
        pp.gu[k, :ru[k]] = gen.u.g[k][0, :]
    for j in range(1, n):
        pp.hu[j, :ru[j - 1]] = gen.u.h[j][:, 0]
    for k in range(1, n - 1):
        pp.bu[k, :ru[k - 1], :ru[k]] = gen.u.b[k]
    return pp


def unpad_pencil(pp):
    """Rebuild a PencilGenerators from the padded arrays."""
    n = pp.n
    rv, ru = pp.rv, pp.ru
    gv = [pp.gv[k, :rv[k]].reshape(1, -1).copy() for k in range(n)]
    hv = [pp.hv[k, :rv[k]].reshape(-1, 1).copy() for k in range(n)]
    bv = [pp.bv[k, :rv[k], :rv[k + 1]].copy() for k in range(n - 1)]
    gu = [pp.gu[k, :ru[k]].reshape(1, -1).copy() for k in range(n - 1)]
    hu = [None] + [pp.hu[j, :ru[j - 1]].reshape(-1, 1).copy()
                   for j in range(1, n)]
    bu = [None] + [pp.bu[k, :ru[k - 1], :ru[k]].copy()
                   for k in range(1, n - 1)]
    if n == 1:
        gu, hu, bu = [], [None], [None]
    return PencilGenerators(
        n=n,
        sigma=pp.sigma.copy(),
        v=TriangularGenerators(g=gv, h=hv, b=bv),
        d_b=pp.db.copy(),
        u=QuasiseparableGenerators(g=gu, h=hu, b=bu),
        z=pp.z.copy(), w=pp.w.copy(), p=pp.p.copy(), q=pp.q.copy(),
    )


@njit(cache=True, inline="always")
def _giv(v1, v2):
    """(c, s, ok) with [[c,-s*],[s,c*]]* @ (v1,v2) = (r, 0), r >= 0."""
    if not (math.isfinite(v1.real) and math.isfinite(v1.imag)
            and math.isfinite(v2.real) and math.isfinite(v2.imag)):
        return 1.0 + 0.0j, 0.0 + 0.0j, False
    a1 = abs(v1)
    a2 = abs(v2)
    if a2 == 0.0:
        if a1 == 0.0:
            return 1.0 + 0.0j, 0.0 + 0.0j, True
        return v1 / a1, 0.0 + 0.0j, True
    m = a1 if a1 > a2 else a2
    r = m * np.sqrt((a1 / m) ** 2 + (a2 / m) ** 2)
    return v1 / r, v2 / r, True


@njit(cache=True)
def sweep_kernel(lo, hi, alpha, sigma, db, z, w, p, q,
                 gv, hv, bv, rv, gu, hu, bu, ru):
    """One implicit-shift chase over columns [lo, hi], in place.

    Returns 0, or (failing column + 1) when a rotation input turned
    non-finite.  Mirrors structured.qz_sweep exactly.
    """
    n = db.shape[0]
    pv = gv.shape[1]
    pu = gu.shape[1]

    ga0 = np.zeros(2 + pv, np.complex128)
    ga1 = np.zeros(2 + pv, np.complex128)
    la0 = np.zeros(2 + pu, np.complex128)
    la1 = np.zeros(2 + pu, np.complex128)
    phv = np.zeros(pv, np.complex128)
    phu = np.zeros(pu, np.complex128)
    xb = np.zeros((pu, pu + 1), np.complex128)
    rtmp = np.zeros(pv, np.complex128)

    # First rotation from the shifted leading column of the window.
    v_diag = 0.0 + 0.0j
    for c in range(pv):
        v_diag += gv[lo, c] * hv[lo, c]
    a_diag = v_diag - z[lo] * np.conj(w[lo])
    sig_v = sigma[lo] + z[lo + 1] * np.conj(w[lo])
    qc, qs, ok = _giv(a_diag - alpha, sigma[lo])
    if not ok:
        return lo + 1

    # Rows (lo, lo+1) of V over columns (lo | lo+1 onward); the head
    # entry is V's own diagonal, not the shifted A entry.
    ga0[0] = v_diag
    for j in range(pv):
        acc = 0.0 + 0.0j
        for c in range(pv):
            acc += gv[lo, c] * bv[lo, c, j]
        ga0[1 + j] = acc
    ga1[0] = sig_v
    for j in range(pv):
        ga1[1 + j] = gv[lo + 1, j]
    for j in range(1 + pv):
        t0 = ga0[j]
        t1 = ga1[j]
        ga0[j] = np.conj(qc) * t0 + np.conj(qs) * t1
        ga1[j] = -qs * t0 + qc * t1
    f_v = ga1[0]
    for c in range(pv):
        phv[c] = ga1[1 + c]

    z_new = np.conj(qc) * z[lo] + np.conj(qs) * z[lo + 1]
    chi = -qs * z[lo] + qc * z[lo + 1]
    z[lo] = z_new
    f_a = f_v - chi * np.conj(w[lo])

    # B-side carriers start from the untouched window head.
    gamma = w[lo]
    cc = p[lo]
    theta = q[lo]
    f_u = db[lo] + p[lo] * np.conj(q[lo])
    for c in range(pu):
        phu[c] = gu[lo, c]
    f_b = db[lo]

    # Rows above the window see the window's columns through one old
    # interface; fold the first column map into it so their entries are
    # expressed over the new generators without touching those rows.
    if lo > 0:
        for i in range(pv):
            for c in range(pv):
                rtmp[c] = bv[lo - 1, i, c]
            acc = 0.0 + 0.0j
            for c in range(pv):
                acc += rtmp[c] * hv[lo, c]
            bv[lo - 1, i, 0] = acc
            for j in range(pv - 1):
                acc = 0.0 + 0.0j
                for c in range(pv):
                    acc += rtmp[c] * bv[lo, c, j]
                bv[lo - 1, i, 1 + j] = acc
        for i in range(pu):
            xb[i, 0] = hu[lo, i]
            for j in range(pu):
                xb[i, 1 + j] = bu[lo, i, j]
    for c in range(pv):
        gv[lo, c] = ga0[c]

    for t in range(lo, hi - 1):
        # Bulge blocks and the two new rotations.
        eps_b = -cc * np.conj(q[t + 1])
        for c in range(pu):
            eps_b += phu[c] * hu[t + 1, c]
        eps_a = -chi * np.conj(w[t + 1])
        for c in range(pv):
            eps_a += phv[c] * hv[t + 1, c]
        du_next = db[t + 1] + p[t + 1] * np.conj(q[t + 1])
        phi10 = -qs * f_b
        phi11 = -qs * eps_b + qc * db[t + 1]
        zc, zs, ok = _giv(phi11, -phi10)
        if not ok:
            return t + 1
        om00 = f_a * zc + eps_a * zs
        om10 = sigma[t + 1] * zs
        nc, ns, ok = _giv(om00, om10)
        if not ok:
            return t + 2
        sigma[t] = np.conj(nc) * om00 + np.conj(ns) * om10

        # V rows (t+1, t+2) over columns (t | t+1 | t+2 onward).
        sig_v = sigma[t + 1] + z[t + 2] * np.conj(w[t + 1])
        ga0[0] = f_v
        acc = 0.0 + 0.0j
        for c in range(pv):
            acc += phv[c] * hv[t + 1, c]
        ga0[1] = acc
        for j in range(pv):
            acc = 0.0 + 0.0j
            for c in range(pv):
                acc += phv[c] * bv[t + 1, c, j]
            ga0[2 + j] = acc
        ga1[0] = z[t + 2] * np.conj(gamma)
        ga1[1] = sig_v
        for j in range(pv):
            ga1[2 + j] = gv[t + 2, j]
        for j in range(2 + pv):
            t0 = ga0[j]
            t1 = ga1[j]
            ga0[j] = np.conj(nc) * t0 + np.conj(ns) * t1
            ga1[j] = -ns * t0 + nc * t1
        t0 = ga0[0]
        t1 = ga0[1]
        ga0[0] = t0 * zc + t1 * zs
        ga0[1] = -t0 * np.conj(zs) + t1 * np.conj(zc)
        t0 = ga1[0]
        t1 = ga1[1]
        ga1[0] = t0 * zc + t1 * zs
        ga1[1] = -t0 * np.conj(zs) + t1 * np.conj(zc)
        for c in range(pv):
            gv[t + 1, c] = ga0[1 + c]
        f_v = ga1[1]
        for c in range(pv):
            phv[c] = ga1[2 + c]

        # hv[t] and bv[t] from the Z-rotated column frame.
        hv[t, 0] = zc
        for i in range(pv - 1):
            hv[t, 1 + i] = hv[t + 1, i] * zs
        bv[t, 0, 0] = -np.conj(zs)
        for j in range(1, pv):
            bv[t, 0, j] = 0.0
        for i in range(pv - 1):
            bv[t, 1 + i, 0] = hv[t + 1, i] * np.conj(zc)
            for j in range(pv - 1):
                bv[t, 1 + i, 1 + j] = bv[t + 1, i, j]

        # U rows (t, t+1) over columns (t | t+1 | t+2 onward).
        la0[0] = f_u
        acc = 0.0 + 0.0j
        for c in range(pu):
            acc += phu[c] * hu[t + 1, c]
        la0[1] = acc
        for j in range(pu):
            acc = 0.0 + 0.0j
            for c in range(pu):
                acc += phu[c] * bu[t + 1, c, j]
            la0[2 + j] = acc
        la1[0] = p[t + 1] * np.conj(theta)
        la1[1] = du_next
        for j in range(pu):
            la1[2 + j] = gu[t + 1, j]
        for j in range(2 + pu):
            t0 = la0[j]
            t1 = la1[j]
            la0[j] = np.conj(qc) * t0 + np.conj(qs) * t1
            la1[j] = -qs * t0 + qc * t1
        t0 = la0[0]
        t1 = la0[1]
        la0[0] = t0 * zc + t1 * zs
        la0[1] = -t0 * np.conj(zs) + t1 * np.conj(zc)
        t0 = la1[0]
        t1 = la1[1]
        la1[0] = t0 * zc + t1 * zs
        la1[1] = -t0 * np.conj(zs) + t1 * np.conj(zc)
        du_diag = la0[0]
        for c in range(pu):
            gu[t, c] = la0[1 + c]
        f_u = la1[1]
        for c in range(pu):
            phu[c] = la1[2 + c]

        if t > lo:
            hu[t, 0] = zc
            for i in range(pu - 1):
                hu[t, 1 + i] = hu[t + 1, i] * zs
            bu[t, 0, 0] = -np.conj(zs)
            for j in range(1, pu):
                bu[t, 0, j] = 0.0
            for i in range(pu - 1):
                bu[t, 1 + i, 0] = hu[t + 1, i] * np.conj(zc)
                for j in range(pu - 1):
                    bu[t, 1 + i, 1 + j] = bu[t + 1, i, j]
        elif lo > 0:
            for i in range(pu):
                acc = xb[i, 0] * zc
                for r in range(pu):
                    acc += xb[i, 1 + r] * hu[t + 1, r] * zs
                hu[lo, i] = acc
            for i in range(pu):
                acc = -xb[i, 0] * np.conj(zs)
                for r in range(pu):
                    acc += xb[i, 1 + r] * hu[t + 1, r] * np.conj(zc)
                bu[lo, i, 0] = acc
                for j in range(pu - 1):
                    acc = 0.0 + 0.0j
                    for r in range(pu):
                        acc += xb[i, 1 + r] * bu[t + 1, r, j]
                    bu[lo, i, 1 + j] = acc
        # at the very top (t == lo == 0) column 0 has no rows above it

        # Perturbation vectors ride along with the rotations.
        t0 = chi
        z[t + 1] = np.conj(nc) * t0 + np.conj(ns) * z[t + 2]
        chi = -ns * t0 + nc * z[t + 2]
        t0 = gamma
        w[t] = np.conj(zc) * t0 + np.conj(zs) * w[t + 1]
        gamma = -zs * t0 + zc * w[t + 1]
        t0 = theta
        q[t] = np.conj(zc) * t0 + np.conj(zs) * q[t + 1]
        theta = -zs * t0 + zc * q[t + 1]
        t0 = cc
        p[t] = np.conj(qc) * t0 + np.conj(qs) * p[t + 1]
        cc = -qs * t0 + qc * p[t + 1]

        f_a = f_v - chi * np.conj(gamma)
        f_b = f_u - cc * np.conj(theta)
        db[t] = du_diag - p[t] * np.conj(q[t])
        qc = nc
        qs = ns

    # Closing column rotation at the window foot.
    eps_b = -cc * np.conj(q[hi])
    for c in range(pu):
        eps_b += phu[c] * hu[hi, c]
    du_last = db[hi] + p[hi] * np.conj(q[hi])
    phi10 = -qs * f_b
    phi11 = -qs * eps_b + qc * db[hi]
    zc, zs, ok = _giv(phi11, -phi10)
    if not ok:
        return hi

    # V: final row hi over columns (hi-1 | hi | onward).
    if hi == n - 1:
        acc = 0.0 + 0.0j
        for c in range(pv):
            acc += phv[c] * hv[hi, c]
        td_v = f_v * zc + acc * zs
        g_tail = -f_v * np.conj(zs) + acc * np.conj(zc)
        hv[hi - 1, 0] = zc
        for i in range(pv - 1):
            hv[hi - 1, 1 + i] = hv[hi, i] * zs
        bv[hi - 1, 0, 0] = -np.conj(zs)
        for j in range(1, pv):
            bv[hi - 1, 0, j] = 0.0
        for i in range(pv - 1):
            bv[hi - 1, 1 + i, 0] = hv[hi, i] * np.conj(zc)
            for j in range(1, pv):
                bv[hi - 1, 1 + i, j] = 0.0
        for c in range(pv):
            gv[hi, c] = 0.0
            hv[hi, c] = 0.0
        gv[hi, 0] = g_tail
        hv[hi, 0] = 1.0
    else:
        r_tail = rv[hi + 1]
        acc = 0.0 + 0.0j
        for c in range(pv):
            acc += phv[c] * hv[hi, c]
        td_v = f_v * zc + acc * zs
        ga0[1] = -f_v * np.conj(zs) + acc * np.conj(zc)
        for j in range(pv):
            acc = 0.0 + 0.0j
            for c in range(pv):
                acc += phv[c] * bv[hi, c, j]
            ga0[2 + j] = acc
        hv[hi - 1, 0] = zc
        for i in range(pv - 1):
            hv[hi - 1, 1 + i] = hv[hi, i] * zs
        bv[hi - 1, 0, 0] = -np.conj(zs)
        for j in range(1, pv):
            bv[hi - 1, 0, j] = 0.0
        for i in range(pv - 1):
            bv[hi - 1, 1 + i, 0] = hv[hi, i] * np.conj(zc)
            for j in range(pv - 1):
                bv[hi - 1, 1 + i, 1 + j] = bv[hi, i, j]
        for c in range(pv):
            gv[hi, c] = ga0[1 + c]
        for c in range(pv):
            hv[hi, c] = 0.0
        hv[hi, 0] = 1.0
        for i in range(pv):
            for j in range(pv):
                bv[hi, i, j] = 0.0
        for i in range(r_tail):
            bv[hi, 1 + i, i] = 1.0

    # U: final rows (hi-1, hi).
    if hi == n - 1:
        acc = 0.0 + 0.0j
        for c in range(pu):
            acc += phu[c] * hu[hi, c]
        a00 = f_u
        a01 = acc
        a10 = p[hi] * np.conj(theta)
        a11 = du_last
        l00 = np.conj(qc) * a00 + np.conj(qs) * a10
        l01 = np.conj(qc) * a01 + np.conj(qs) * a11
        l10 = -qs * a00 + qc * a10
        l11 = -qs * a01 + qc * a11
        du_pen = l00 * zc + l01 * zs
        g_pen = -l00 * np.conj(zs) + l01 * np.conj(zc)
        du_end = -l10 * np.conj(zs) + l11 * np.conj(zc)
        if hi - 1 > lo:
            hu[hi - 1, 0] = zc
            for i in range(pu - 1):
                hu[hi - 1, 1 + i] = hu[hi, i] * zs
            bu[hi - 1, 0, 0] = -np.conj(zs)
            for j in range(1, pu):
                bu[hi - 1, 0, j] = 0.0
            for i in range(pu - 1):
                bu[hi - 1, 1 + i, 0] = hu[hi, i] * np.conj(zc)
                for j in range(1, pu):
                    bu[hi - 1, 1 + i, j] = 0.0
        elif lo > 0:
            for i in range(pu):
                acc = xb[i, 0] * zc
                for r in range(pu):
                    acc += xb[i, 1 + r] * hu[hi, r] * zs
                hu[lo, i] = acc
            for i in range(pu):
                acc = -xb[i, 0] * np.conj(zs)
                for r in range(pu):
                    acc += xb[i, 1 + r] * hu[hi, r] * np.conj(zc)
                bu[lo, i, 0] = acc
                for j in range(1, pu):
                    bu[lo, i, j] = 0.0
        gu[hi - 1, 0] = g_pen
        for c in range(1, pu):
            gu[hi - 1, c] = 0.0
        for c in range(pu):
            hu[hi, c] = 0.0
        hu[hi, 0] = 1.0
    else:
        ru_tail = ru[hi]
        la0[0] = f_u
        acc = 0.0 + 0.0j
        for c in range(pu):
            acc += phu[c] * hu[hi, c]
        la0[1] = acc
        for j in range(pu):
            acc = 0.0 + 0.0j
            for c in range(pu):
                acc += phu[c] * bu[hi, c, j]
            la0[2 + j] = acc
        la1[0] = p[hi] * np.conj(theta)
        la1[1] = du_last
        for j in range(pu):
            la1[2 + j] = gu[hi, j]
        for j in range(2 + pu):
            t0 = la0[j]
            t1 = la1[j]
            la0[j] = np.conj(qc) * t0 + np.conj(qs) * t1
            la1[j] = -qs * t0 + qc * t1
        t0 = la0[0]
        t1 = la0[1]
        la0[0] = t0 * zc + t1 * zs
        la0[1] = -t0 * np.conj(zs) + t1 * np.conj(zc)
        t0 = la1[0]
        t1 = la1[1]
        la1[0] = t0 * zc + t1 * zs
        la1[1] = -t0 * np.conj(zs) + t1 * np.conj(zc)
        du_pen = la0[0]
        du_end = la1[1]
        if hi - 1 > lo:
            hu[hi - 1, 0] = zc
            for i in range(pu - 1):
                hu[hi - 1, 1 + i] = hu[hi, i] * zs
            bu[hi - 1, 0, 0] = -np.conj(zs)
            for j in range(1, pu):
                bu[hi - 1, 0, j] = 0.0
            for i in range(pu - 1):
                bu[hi - 1, 1 + i, 0] = hu[hi, i] * np.conj(zc)
                for j in range(pu - 1):
                    bu[hi - 1, 1 + i, 1 + j] = bu[hi, i, j]
        elif lo > 0:
            for i in range(pu):
                acc = xb[i, 0] * zc
                for r in range(pu):
                    acc += xb[i, 1 + r] * hu[hi, r] * zs
                hu[lo, i] = acc
            for i in range(pu):
                acc = -xb[i, 0] * np.conj(zs)
                for r in range(pu):
                    acc += xb[i, 1 + r] * hu[hi, r] * np.conj(zc)
                bu[lo, i, 0] = acc
                for j in range(pu - 1):
                    acc = 0.0 + 0.0j
                    for r in range(pu):
                        acc += xb[i, 1 + r] * bu[hi, r, j]
                    bu[lo, i, 1 + j] = acc
        for c in range(pu):
            gu[hi - 1, c] = la0[1 + c]
        for c in range(pu):
            gu[hi, c] = la1[2 + c]
        for c in range(pu):
            hu[hi, c] = 0.0
        hu[hi, 0] = 1.0
        for i in range(pu):
            for j in range(pu):
                bu[hi, i, j] = 0.0
        for i in range(ru_tail):
            bu[hi, 1 + i, i] = 1.0

    # Finish the perturbation vectors and recover the last diagonals.
    wa = np.conj(zc) * gamma + np.conj(zs) * w[hi]
    wb = -zs * gamma + zc * w[hi]
    w[hi - 1] = wa
    w[hi] = wb
    qa = np.conj(zc) * theta + np.conj(zs) * q[hi]
    qb = -zs * theta + zc * q[hi]
    q[hi - 1] = qa
    q[hi] = qb
    pa = np.conj(qc) * cc + np.conj(qs) * p[hi]
    pb = -qs * cc + qc * p[hi]
    p[hi - 1] = pa
    p[hi] = pb
    z[hi] = chi
    sigma[hi - 1] = td_v - z[hi] * np.conj(w[hi - 1])
    db[hi - 1] = du_pen - p[hi - 1] * np.conj(q[hi - 1])
    db[hi] = du_end - p[hi] * np.conj(q[hi])

    # New slot widths: each order grows by one inside the window.
    for s in range(lo, hi):
        rv[s] = 1 + rv[s + 1]
    if hi == n - 1:
        rv[hi] = 1
    else:
        rv[hi] = 1 + rv[hi + 1]
    for s in range(lo, hi - 1):
        ru[s] = 1 + ru[s + 1]
    if hi == n - 1:
        ru[hi - 1] = 1
    else:
        ru[hi - 1] = 1 + ru[hi]
    return 0


@njit(cache=True)
def compress_u_kernel(db, p, q, gu, hu, bu, ru, tol):
    """Rebuild U's upper generators at order one, in place.

    Scalar specialisation of compress.compress_unitary for the B-side
    unitary U = B + p q*: every block is 1x1 and the lower rank is one,
    so the column mixers W_k and completions F_k collapse to single
    Givens rotations.  Returns 0, or (block + 1) when the finalized
    column drifts off unit norm past `tol` (input not unitary), or
    -(block + 1) on a non-finite value.
    """
    n = db.shape[0]
    pu = gu.shape[1]
    if n < 2:
        return 0

    y = np.zeros(pu, np.complex128)
    yb = np.zeros(pu, np.complex128)

    # Leading block: nothing is finalized yet; the running row Y starts
    # as g(0) and the auxiliary entry as the first diagonal of U.
    for c in range(pu):
        y[c] = gu[0, c]
    za = db[0] + p[0] * np.conj(q[0])
    x = np.conj(q[0])
    hs = 0.0 + 0.0j
    for c in range(pu):
        hs += y[c] * hu[1, c]
    gu[0, 0] = 1.0
    for c in range(1, pu):
        gu[0, c] = 0.0
    hu[1, 0] = hs
    for c in range(1, pu):
        hu[1, c] = 0.0
    ru[0] = 1

    for t in range(1, n - 1):
        qd = np.conj(q[t])
        du = db[t] + p[t] * np.conj(q[t])
        wc, ws, ok = _giv(qd, -x)
        if not ok:
            return -(t + 1)
        # Z = [[za, hs], [p[t]*x, du]] @ W*; first column is finalized.
        px = p[t] * x
        z00 = za * wc + hs * ws
        z01 = -za * np.conj(ws) + hs * np.conj(wc)
        z10 = px * wc + du * ws
        z11 = -px * np.conj(ws) + du * np.conj(wc)
        x = np.conj(wc) * qd - np.conj(ws) * x  # = r, the new X

        defect = abs(z00 * np.conj(z00) + z10 * np.conj(z10) - 1.0)
        if defect > tol:
            return t + 1
        fc, fs, ok = _giv(z00, z10)
        if not ok:
            return -(t + 1)
        # F = [[fc, -fs*], [fs, fc*]]: column 2 completes the basis.
        bs = -np.conj(fs)
        gs = np.conj(fc)

        for j in range(pu):
            acc = 0.0 + 0.0j
            for c in range(pu):
                acc += y[c] * bu[t, c, j]
            yb[j] = acc
        for j in range(pu):
            y[j] = np.conj(gs) * gu[t, j] + np.conj(bs) * yb[j]
        za = np.conj(gs) * z11 + np.conj(bs) * z01
        hs = 0.0 + 0.0j
        for c in range(pu):
            hs += y[c] * hu[t + 1, c]

        gu[t, 0] = gs
        for c in range(1, pu):
            gu[t, c] = 0.0
        for i in range(pu):
            for j in range(pu):
                bu[t, i, j] = 0.0
        bu[t, 0, 0] = bs
        hu[t + 1, 0] = hs
        for c in range(1, pu):
            hu[t + 1, c] = 0.0
        ru[t] = 1
    return 0


@njit(cache=True)
def compress_v_kernel(sigma, z, w, gv, hv, bv, rv, tol):
    """Rebuild V's upper generators at orders (1, 2, ..., 2), in place.

    Scalar specialisation of compress.compress_unitary for the A-side
    unitary V = A + z w*, blocked so that the subdiagonal joins the
    lower rank-one part: block k has the diagonal entry sigma[k-2] +
    z[k-1] w*[k-2] and lower couplings through z and w.  Error codes as
    in compress_u_kernel.
    """
    n = z.shape[0]
    pv = gv.shape[1]

    y0 = np.zeros(pv, np.complex128)
    y1 = np.zeros(pv, np.complex128)
    yb0 = np.zeros(pv, np.complex128)
    yb1 = np.zeros(pv, np.complex128)

    # Block 1 contributes no column yet: Y starts as g(0).
    for c in range(pv):
        y0[c] = gv[0, c]
    hs0 = 0.0 + 0.0j
    for c in range(pv):
        hs0 += y0[c] * hv[0, c]
    gv[0, 0] = 1.0
    for c in range(1, pv):
        gv[0, c] = 0.0
    hv[0, 0] = hs0
    for c in range(1, pv):
        hv[0, c] = 0.0
    rv[0] = 1
    if n == 1:
        return 0

    # Block 2: still no finalized column (nu = 0); the running basis
    # grows to two rows and X picks up the first w entry.
    x = np.conj(w[0])
    d2 = sigma[0] + z[1] * np.conj(w[0])
    for j in range(pv):
        acc = 0.0 + 0.0j
        for c in range(pv):
            acc += y0[c] * bv[0, c, j]
        yb0[j] = acc
    for c in range(pv):
        y0[c] = yb0[c]
        y1[c] = gv[1, c]
    za0 = hs0
    za1 = d2
    hs0 = 0.0 + 0.0j
    hs1 = 0.0 + 0.0j
    for c in range(pv):
        hs0 += y0[c] * hv[1, c]
        hs1 += y1[c] * hv[1, c]
    gv[1, 0] = 0.0
    gv[1, 1] = 1.0
    for c in range(2, pv):
        gv[1, c] = 0.0
    hv[1, 0] = hs0
    hv[1, 1] = hs1
    for c in range(2, pv):
        hv[1, c] = 0.0
    for i in range(pv):
        for j in range(pv):
            bv[0, i, j] = 0.0
    bv[0, 0, 0] = 1.0
    rv[1] = 2

    for k in range(3, n + 1):
        qd = np.conj(w[k - 2])
        dk = sigma[k - 2] + z[k - 1] * np.conj(w[k - 2])
        wc, ws, ok = _giv(qd, -x)
        if not ok:
            return -(k - 1)
        px = z[k - 1] * x
        z00 = za0 * wc + hs0 * ws
        z01 = -za0 * np.conj(ws) + hs0 * np.conj(wc)
        z10 = za1 * wc + hs1 * ws
        z11 = -za1 * np.conj(ws) + hs1 * np.conj(wc)
        z20 = px * wc + dk * ws
        z21 = -px * np.conj(ws) + dk * np.conj(wc)
        x = np.conj(wc) * qd - np.conj(ws) * x

        defect = abs(z00 * np.conj(z00) + z10 * np.conj(z10)
                     + z20 * np.conj(z20) - 1.0)
        if defect > tol:
            return k - 1
        # Complete (z00, z10, z20) to a unitary basis, bottom pair first.
        c1, s1, ok = _giv(z10, z20)
        if not ok:
            return -(k - 1)
        tmid = np.conj(c1) * z10 + np.conj(s1) * z20
        c2, s2, ok = _giv(z00, tmid)
        if not ok:
            return -(k - 1)
        bs00 = -np.conj(s2)
        bs01 = 0.0 + 0.0j
        bs10 = c1 * np.conj(c2)
        bs11 = -np.conj(s1)
        gs0 = s1 * np.conj(c2)
        gs1 = np.conj(c1)

        for j in range(pv):
            acc0 = 0.0 + 0.0j
            acc1 = 0.0 + 0.0j
            for c in range(pv):
                acc0 += y0[c] * bv[k - 2, c, j]
                acc1 += y1[c] * bv[k - 2, c, j]
            yb0[j] = acc0
            yb1[j] = acc1
        for j in range(pv):
            t0 = np.conj(gs0) * gv[k - 1, j]
            t1 = np.conj(gs1) * gv[k - 1, j]
            y0[j] = t0 + np.conj(bs00) * yb0[j] + np.conj(bs10) * yb1[j]
            y1[j] = t1 + np.conj(bs01) * yb0[j] + np.conj(bs11) * yb1[j]
        na0 = np.conj(gs0) * z21 + np.conj(bs00) * z01 + np.conj(bs10) * z11
        na1 = np.conj(gs1) * z21 + np.conj(bs01) * z01 + np.conj(bs11) * z11
        za0 = na0
        za1 = na1
        hs0 = 0.0 + 0.0j
        hs1 = 0.0 + 0.0j
        for c in range(pv):
            hs0 += y0[c] * hv[k - 1, c]
            hs1 += y1[c] * hv[k - 1, c]

        gv[k - 1, 0] = gs0
        gv[k - 1, 1] = gs1
        for c in range(2, pv):
            gv[k - 1, c] = 0.0
        hv[k - 1, 0] = hs0
        hv[k - 1, 1] = hs1
        for c in range(2, pv):
            hv[k - 1, c] = 0.0
        for i in range(pv):
            for j in range(pv):
                bv[k - 2, i, j] = 0.0
        bv[k - 2, 0, 0] = bs00
        bv[k - 2, 0, 1] = bs01
        bv[k - 2, 1, 0] = bs10
        bv[k - 2, 1, 1] = bs11
        rv[k - 1] = 2
    return 0
