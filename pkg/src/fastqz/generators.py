"""Generator representation of companion-like pencils.

A pencil (A, B) is stored through the unitary parts V = A + z w* and
U = B + p q*:

* A is upper Hessenberg.  Its subdiagonal entries are kept explicitly in
  ``sigma``; everything on and above the diagonal is recovered from the
  upper triangular generators of V together with the rank-one correction.
* B is upper triangular.  Its diagonal is kept in ``d_b``; the strictly
  upper part comes from the quasiseparable generators of U and the
  rank-one correction.

Vectors q and w are stored un-conjugated; every formula that needs q* or
w* conjugates at the point of use.
"""

from dataclasses import dataclass

import numpy as np


def _empty(rows, cols):
    return np.zeros((rows, cols), dtype=np.complex128)


class NumericalError(ArithmeticError):
    """A numerical consistency guarantee failed mid-computation.

    Raised when a value that must be finite is not, or when a quantity
    that the representation forces to be (ortho)normal in exact
    arithmetic drifts past its tolerance.  The message says where.
    """


# ---------------------------------------------------------------------------
# Givens rotations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GivensRotation:
    """Complex plane rotation [[c, -conj(s)], [s, conj(c)]]."""

    c: complex
    s: complex

    @property
    def mat(self):
        return np.array([[self.c, -np.conj(self.s)],
                         [self.s, np.conj(self.c)]], dtype=np.complex128)


def make_givens(v1, v2):
    """Build the rotation that maps (v1, v2) onto the first axis.

    Parameters
    ----------
    v1, v2 : complex
        Components of the vector to be rotated.

    Returns
    -------
    GivensRotation
        G such that G* @ (v1, v2) = (r, 0) with r = hypot(|v1|, |v2|)
        real and nonnegative.  Ties: (0, 0) gives the identity, and a
        zero second component keeps s = 0 with c the phase of v1.
    """
    v1 = complex(v1)
    v2 = complex(v2)
    if not (np.isfinite(v1.real) and np.isfinite(v1.imag)
            and np.isfinite(v2.real) and np.isfinite(v2.imag)):
        raise ValueError("make_givens requires finite inputs")
    a1 = abs(v1)
    a2 = abs(v2)
    if a2 == 0.0:
        if a1 == 0.0:
            return GivensRotation(1.0 + 0.0j, 0.0j)
        return GivensRotation(v1 / a1, 0.0j)
    # scale by the larger modulus so r cannot overflow prematurely
    m = a1 if a1 > a2 else a2
    r = m * np.sqrt((a1 / m) ** 2 + (a2 / m) ** 2)
    return GivensRotation(v1 / r, v2 / r)


# ---------------------------------------------------------------------------
# Generator containers
# ---------------------------------------------------------------------------

@dataclass
class TriangularGenerators:
    """Upper triangular generators of a unitary Hessenberg matrix V.

    The representation includes the diagonal:

        V(i, j) = g[i] @ b[i] @ b[i+1] @ ... @ b[j-1] @ h[j]   for i <= j

    with g[i] of shape (1, r_i), h[j] of shape (r_j, 1) and b[k] of shape
    (r_k, r_{k+1}).  Lists are indexed by matrix position (0-based).
    """

    g: list
    h: list
    b: list

    @property
    def orders(self):
        return [gi.shape[1] for gi in self.g]

    def entry(self, i, j):
        """V(i, j) for i <= j by direct generator products."""
        acc = self.g[i]
        for k in range(i, j):
            acc = acc @ self.b[k]
        return (acc @ self.h[j])[0, 0]


@dataclass
class QuasiseparableGenerators:
    """Strictly upper quasiseparable generators of a unitary matrix U.

        U(i, j) = g[i] @ b[i+1] @ ... @ b[j-1] @ h[j]   for i < j

    g[i] exists for rows 0..N-2, h[j] for columns 1..N-1 and b[k] for
    k = 1..N-2.  The lists are full length with None in the slots that
    the representation never uses (h[0], b[0]), keeping indices aligned
    with matrix positions.
    """

    g: list
    h: list
    b: list

    @property
    def orders(self):
        return [gi.shape[1] for gi in self.g]

    def entry(self, i, j):
        """U(i, j) for i < j by direct generator products."""
        acc = self.g[i]
        for k in range(i + 1, j):
            acc = acc @ self.b[k]
        return (acc @ self.h[j])[0, 0]


@dataclass
class PencilGenerators:
    """Complete generator set for a companion-like pencil (A, B)."""

    n: int
    sigma: np.ndarray          # subdiagonal of A, length N-1
    v: TriangularGenerators    # unitary part of A
    d_b: np.ndarray            # diagonal of B, length N
    u: QuasiseparableGenerators  # unitary part of B
    z: np.ndarray
    w: np.ndarray
    p: np.ndarray
    q: np.ndarray


# ---------------------------------------------------------------------------
# Polynomials and companion construction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Polynomial:
    """Coefficients a_0..a_n in ascending degree plus the scaling applied."""

    coeffs: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "coeffs",
                           np.asarray(self.coeffs, dtype=np.complex128))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def normalized(self):
        """Divide by the 2-norm of the coefficient vector, recording it."""
        nrm = float(np.linalg.norm(self.coeffs))
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero polynomial")
        return Polynomial(self.coeffs / nrm, self.scale * nrm)


def build_companion_pencil(poly, normalize=False):
    """Generator form of the companion pencil of a polynomial.

    The pencil is

        A = [e_2 | e_3 | ... | e_n | -a_{0:n-1}],   B = diag(1, ..., 1, a_n),

    realized as A = V - z w* with V the cyclic down-shift and
    B = U - p q* with U = I.

    Parameters
    ----------
    poly : Polynomial or array_like
        Coefficients a_0..a_n, ascending degree, n >= 1, a_n != 0.
    normalize : bool
        Divide the coefficients by their 2-norm first.

    Returns
    -------
    PencilGenerators
    """
    if not isinstance(poly, Polynomial):
        poly = Polynomial(np.asarray(poly, dtype=np.complex128))
    if normalize:
        poly = poly.normalized()
    a = poly.coeffs
    n = poly.degree
    if n < 1:
        raise ValueError("need a polynomial of degree >= 1")
    if not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise ValueError("polynomial coefficients must be finite")
    if a[n] == 0:
        raise ValueError("leading coefficient must be nonzero")

    one = np.ones((1, 1), dtype=np.complex128)
    zero = np.zeros((1, 1), dtype=np.complex128)

    # V = cyclic down-shift: V(i+1, i) = 1 and V(0, n-1) = 1.  Its upper
    # triangular generators have order one: only the (0, n-1) entry is
    # nonzero above the diagonal.
    g = [one.copy() if i == 0 else zero.copy() for i in range(n)]
    h = [one.copy() if j == n - 1 else zero.copy() for j in range(n)]
    b = [one.copy() for _ in range(n - 1)]
    v = TriangularGenerators(g, h, b)

    # U = I: all strictly-upper generators vanish.
    gu = [zero.copy() for _ in range(n - 1)]
    hu = [None] + [zero.copy() for _ in range(n - 1)]
    bu = [None] + [one.copy() for _ in range(max(n - 2, 0))]
    u = QuasiseparableGenerators(gu, hu, bu)

    z = np.zeros(n, dtype=np.complex128)
    z[0] = a[0] + 1.0
    z[1:] = a[1:n]
    w = np.zeros(n, dtype=np.complex128)
    w[n - 1] = 1.0
    p = np.zeros(n, dtype=np.complex128)
    p[n - 1] = 1.0
    q = np.zeros(n, dtype=np.complex128)
    q[n - 1] = np.conj(1.0 - a[n])

    sigma = np.ones(n - 1, dtype=np.complex128)
    d_b = np.ones(n, dtype=np.complex128)
    d_b[n - 1] = a[n]
    return PencilGenerators(n, sigma, v, d_b, u, z, w, p, q)


# ---------------------------------------------------------------------------
# Dense reconstruction and probes
# ---------------------------------------------------------------------------

def reconstruct_dense(gen):
    """Assemble (A, B, V, U) as dense arrays from a generator set.

    Intended for testing and for small reference computations; cost is
    O(N^2) entries with O(1) work each.
    """
    n = gen.n
    V = np.zeros((n, n), dtype=np.complex128)
    U = np.zeros((n, n), dtype=np.complex128)
    for i in range(n):
        acc = gen.v.g[i]
        V[i, i] = (acc @ gen.v.h[i])[0, 0]
        for j in range(i + 1, n):
            acc = acc @ gen.v.b[j - 1]
            V[i, j] = (acc @ gen.v.h[j])[0, 0]
    for k in range(n - 1):
        V[k + 1, k] = gen.sigma[k] + gen.z[k + 1] * np.conj(gen.w[k])
    for i in range(n):
        for j in range(i - 1):
            V[i, j] = gen.z[i] * np.conj(gen.w[j])

    for i in range(n - 1):
        acc = gen.u.g[i]
        U[i, i + 1] = (acc @ gen.u.h[i + 1])[0, 0]
        for j in range(i + 2, n):
            acc = acc @ gen.u.b[j - 1]
            U[i, j] = (acc @ gen.u.h[j])[0, 0]
    for i in range(n):
        U[i, i] = gen.d_b[i] + gen.p[i] * np.conj(gen.q[i])
        for j in range(i):
            U[i, j] = gen.p[i] * np.conj(gen.q[j])

    A = V - np.outer(gen.z, np.conj(gen.w))
    B = U - np.outer(gen.p, np.conj(gen.q))
    return A, B, V, U


def diag_entries_A(gen):
    """Diagonal of A in O(N): A(k,k) = g_V(k) h_V(k) - z(k) conj(w(k))."""
    n = gen.n
    out = np.empty(n, dtype=np.complex128)
    for k in range(n):
        out[k] = (gen.v.g[k] @ gen.v.h[k])[0, 0] - gen.z[k] * np.conj(gen.w[k])
    return out


def trailing_block(gen):
    """Trailing 2x2 blocks of A and B, computed from generators only."""
    n = gen.n
    if n < 2:
        raise ValueError("trailing_block needs N >= 2")
    i, j = n - 2, n - 1
    A2 = np.zeros((2, 2), dtype=np.complex128)
    B2 = np.zeros((2, 2), dtype=np.complex128)
    A2[0, 0] = (gen.v.g[i] @ gen.v.h[i])[0, 0] - gen.z[i] * np.conj(gen.w[i])
    A2[0, 1] = (gen.v.g[i] @ gen.v.b[i] @ gen.v.h[j])[0, 0] \
        - gen.z[i] * np.conj(gen.w[j])
    A2[1, 0] = gen.sigma[i]
    A2[1, 1] = (gen.v.g[j] @ gen.v.h[j])[0, 0] - gen.z[j] * np.conj(gen.w[j])
    B2[0, 0] = gen.d_b[i]
    B2[0, 1] = (gen.u.g[i] @ gen.u.h[j])[0, 0] - gen.p[i] * np.conj(gen.q[j])
    B2[1, 1] = gen.d_b[j]
    return A2, B2
