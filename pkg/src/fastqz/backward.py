"""Backward error of the companion-pencil rootfinder: predicted and measured.

Treating the computed roots as the exact roots of a nearby polynomial,
the backward error is a perturbation of the coefficients.  Two
independent tools live here.

Prediction.  If the solver behaves like an exact QZ run on a perturbed
pencil (A + E, B + G), the induced coefficient change of det(sB - A)
has an explicit first-order expression.  The monic case is the
classical double-sum formula over the diagonals of E; the general case
follows from it because B differs from the identity by the rank-one
piece (a_n - 1) e_n e_n^T, whose determinant contribution splits off
through the Sherman-Morrison identity and leaves behind the same monic
formula applied twice (full size and the leading principal submatrix)
plus two trace terms.

Measurement.  The polynomial is re-expanded from the computed roots in
double-double arithmetic, both coefficient vectors are brought to unit
2-norm, and the largest coefficient deviation is reported.  Double
precision would be useless here: the deviations of interest sit at or
below one ulp of the coefficients.  A double-double value is an
unevaluated sum hi + lo of two floats carrying ~32 significant digits,
and sums/products of such pairs can be formed without information loss
through the standard error-free transforms.
"""

import math

import numpy as np

from .generators import Polynomial

# Veltkamp splitting constant, 2**27 + 1: splits a 53-bit significand
# into two 26-bit halves so that products of halves are exact.
_SPLITTER = 134217729.0


def _two_sum(x, y):
    """s, e with s = fl(x + y) and x + y = s + e exactly."""
    s = x + y
    t = s - x
    return s, (x - (s - t)) + (y - t)


def _fast_two_sum(x, y):
    # Valid only when |x| >= |y| or x == 0.
    s = x + y
    return s, y - (s - x)


def _two_prod(x, y):
    """p, e with p = fl(x * y) and x * y = p + e exactly."""
    p = x * y
    t = _SPLITTER * x
    xh = t - (t - x)
    xl = x - xh
    t = _SPLITTER * y
    yh = t - (t - y)
    yl = y - yh
    return p, ((xh * yh - p) + xh * yl + xl * yh) + xl * yl


class ExtendedReal:
    """Unevaluated sum hi + lo of two floats with |lo| <= ulp(hi)/2."""

    __slots__ = ("hi", "lo")

    def __init__(self, hi=0.0, lo=0.0):
        self.hi = float(hi)
        self.lo = float(lo)

    def __repr__(self):
        return "ExtendedReal(%r, %r)" % (self.hi, self.lo)

    def __float__(self):
        return self.hi + self.lo

    def __neg__(self):
        return ExtendedReal(-self.hi, -self.lo)

    def __add__(self, other):
        if not isinstance(other, ExtendedReal):
            other = ExtendedReal(other)
        s, e = _two_sum(self.hi, other.hi)
        t, f = _two_sum(self.lo, other.lo)
        e += t
        s, e = _fast_two_sum(s, e)
        e += f
        s, e = _fast_two_sum(s, e)
        return ExtendedReal(s, e)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, ExtendedReal):
            other = ExtendedReal(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, ExtendedReal):
            other = ExtendedReal(other)
        p, e = _two_prod(self.hi, other.hi)
        e += self.hi * other.lo + self.lo * other.hi
        p, e = _fast_two_sum(p, e)
        return ExtendedReal(p, e)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, ExtendedReal):
            other = ExtendedReal(other)
        # Long division: three float quotients capture the full
        # double-double precision of the result.
        q1 = self.hi / other.hi
        r = self - other * q1
        q2 = r.hi / other.hi
        r = r - other * q2
        q3 = r.hi / other.hi
        s, e = _fast_two_sum(q1, q2)
        return ExtendedReal(s, e) + q3

    def sqrt(self):
        """Square root, accurate to the full double-double precision."""
        if self.hi == 0.0 and self.lo == 0.0:
            return ExtendedReal()
        if self.hi < 0.0:
            raise ValueError("square root of a negative number")
        y = math.sqrt(self.hi)
        # One Newton correction.  y*y is within a few ulps of hi, so
        # hi - p is exact by Sterbenz's lemma and d carries the true
        # residual self - y**2 to double precision, which is enough.
        p, e = _two_prod(y, y)
        d = ((self.hi - p) - e) + self.lo
        return ExtendedReal(*_fast_two_sum(y, d / (2.0 * y)))


class ExtendedComplex:
    """Complex number whose real and imaginary parts are ExtendedReal."""

    __slots__ = ("re", "im")

    def __init__(self, re=0.0, im=0.0):
        self.re = re if isinstance(re, ExtendedReal) else ExtendedReal(re)
        self.im = im if isinstance(im, ExtendedReal) else ExtendedReal(im)

    @classmethod
    def from_complex(cls, value):
        value = complex(value)
        return cls(value.real, value.imag)

    def to_complex(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return "ExtendedComplex(%r, %r)" % (self.re, self.im)

    def __neg__(self):
        return ExtendedComplex(-self.re, -self.im)

    def __add__(self, other):
        return ExtendedComplex(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        return ExtendedComplex(self.re - other.re, self.im - other.im)

    def __mul__(self, other):
        return ExtendedComplex(self.re * other.re - self.im * other.im,
                               self.re * other.im + self.im * other.re)

    def __truediv__(self, other):
        # Division by a real scale is all the normalization code needs.
        if isinstance(other, ExtendedComplex):
            raise TypeError("complex/complex division is not provided")
        return ExtendedComplex(self.re / other, self.im / other)

    def conjugate(self):
        return ExtendedComplex(self.re, -self.im)

    def abs_squared(self):
        return self.re * self.re + self.im * self.im


def _phase_balanced_order(roots):
    """Permutation interleaving the roots by argument.

    Roots of a polynomial with moderate coefficients equidistribute in
    angle, and only the *complete* product has small coefficients: the
    product over an arc of the circle grows exponentially in the arc
    length.  Eigensolvers tend to deflate roots in sweeps around the
    circle, so combining factors in the caller's order would build
    exactly those arc products and their cancellation would eat most of
    the double-double headroom.  Visiting the angle-sorted positions in
    bit-reversed order keeps every block of the product tree spread
    evenly around the circle.
    """
    by_angle = np.argsort(np.angle(roots), kind="stable")
    n = len(by_angle)
    bits = max(1, (n - 1).bit_length())
    keys = [int(format(j, "0%db" % bits)[::-1], 2) for j in range(n)]
    return by_angle[np.argsort(keys, kind="stable")]


def expand_from_roots(roots, leading=1.0):
    """Coefficients of leading * prod_j (x - roots[j]) in double-double.

    The linear factors are combined along a pairwise product tree (in
    phase-balanced order, see :func:`_phase_balanced_order`) and every
    convolution is carried out in ExtendedComplex arithmetic, so the
    returned coefficients (ascending degree, as a list of
    ExtendedComplex) hold ~32 correct digits as long as they fit the
    double exponent range.
    """
    roots = np.asarray(roots, dtype=np.complex128)
    if roots.size:
        roots = roots[_phase_balanced_order(roots)]
    polys = [[ExtendedComplex.from_complex(-complex(r)), ExtendedComplex(1.0)]
             for r in roots]
    if not polys:
        polys = [[ExtendedComplex(1.0)]]
    while len(polys) > 1:
        merged = [_convolve(polys[i], polys[i + 1])
                  for i in range(0, len(polys) - 1, 2)]
        if len(polys) % 2:
            merged.append(polys[-1])
        polys = merged
    lead = ExtendedComplex.from_complex(leading)
    return [c * lead for c in polys[0]]


def _convolve(u, v):
    out = [ExtendedComplex() for _ in range(len(u) + len(v) - 1)]
    for i, ui in enumerate(u):
        for j, vj in enumerate(v):
            out[i + j] = out[i + j] + ui * vj
    return out


def _unit_2norm(coeffs):
    """Scale a list of ExtendedComplex to unit 2-norm, in double-double."""
    s = ExtendedReal()
    for c in coeffs:
        s = s + c.abs_squared()
    nrm = s.sqrt()
    if nrm.hi == 0.0:
        raise ValueError("cannot normalize the zero polynomial")
    return [c / nrm for c in coeffs]


def _ascending_coeffs(a):
    if isinstance(a, Polynomial):
        return a.coeffs
    return np.asarray(a, dtype=np.complex128)


# ---------------------------------------------------------------------------
# First-order coefficient perturbations
# ---------------------------------------------------------------------------

def em_coefficient_perturbation(a, E):
    """First-order coefficient change of det(sI - A) under A -> A + E.

    Here A is the monic companion matrix of ``a`` (ones on the
    subdiagonal, last column -a_0..-a_{n-1}).  For k = 1..n the
    coefficient of s^{k-1} changes, to first order in E, by

        sum_{m=0}^{k-1} a_m sum_{i=k+1}^{n} E_{i,i+m-k}
      - sum_{m=k}^{n}   a_m sum_{i=1}^{k}   E_{i,i+m-k}

    (indices 1-based, entries of E outside the matrix count as zero).
    The inner sums run along diagonals of E, so everything is assembled
    from per-diagonal prefix sums in O(n^2).

    Parameters
    ----------
    a : Polynomial or array_like
        Coefficients a_0..a_n ascending, monic (a_n = 1).
    E : (n, n) array_like
        Perturbation of the companion matrix.

    Returns
    -------
    numpy.ndarray
        The changes of coefficients s^0..s^{n-1}.
    """
    a = _ascending_coeffs(a)
    n = len(a) - 1
    if n < 1:
        raise ValueError("need a polynomial of degree >= 1")
    if a[n] != 1.0:
        raise ValueError("the perturbation formula assumes a monic "
                         "polynomial (a_n = 1)")
    E = np.asarray(E, dtype=np.complex128)
    if E.shape != (n, n):
        raise ValueError("perturbation matrix must be %d x %d, got %s"
                         % (n, n, E.shape))

    # pref[d + n - 1, r] = sum of E_{i,i+d} over 1-based rows i <= r.
    pref = np.zeros((2 * n - 1, n + 1), dtype=np.complex128)
    for d in range(-(n - 1), n):
        diag = np.diagonal(E, offset=d)
        row0 = max(0, -d)
        acc = np.cumsum(diag)
        pref[d + n - 1, row0 + 1:row0 + 1 + len(diag)] = acc
        pref[d + n - 1, row0 + 1 + len(diag):] = acc[-1]

    delta = np.zeros(n, dtype=np.complex128)
    for k in range(1, n + 1):
        tot = 0.0 + 0.0j
        for m in range(0, k):
            d = m - k
            if d >= -(n - 1):
                tot += a[m] * (pref[d + n - 1, n] - pref[d + n - 1, k])
        for m in range(k, n + 1):
            d = m - k
            if d <= n - 1:
                tot -= a[m] * pref[d + n - 1, k]
        delta[k - 1] = tot
    return delta


def _companion_matrix(tail):
    """Ones on the subdiagonal, last column -tail (= -a_0..-a_{n-1})."""
    n = len(tail)
    A = np.zeros((n, n), dtype=np.complex128)
    A[np.arange(1, n), np.arange(n - 1)] = 1.0
    A[:, -1] -= tail
    return A


def pencil_perturbation_poly(a, E, G):
    """First-order coefficient change of det(sB - A) under (E, G).

    (A, B) is the companion pencil of ``a``: A monic-companion shaped
    with last column -a_0..-a_{n-1}, B = diag(1, ..., 1, a_n).  Writing
    q(s) = s^n + sum a_j s^j for the monic polynomial sharing the low
    coefficients, the change of det(s(B+G) - (A+E)) is, to first order,

        tr(G) q(s) + sum_j (da)_j s^j
        + s (a_n - 1) [ sum_j (da~)_j s^j + tr(G~) s^{n-1} ]

    where (da) is the monic formula applied with perturbation E - G A,
    and (da~), G~ come from the leading principal (n-1) x (n-1)
    subproblem (whose companion matrix belongs to s^{n-1}) with
    perturbation E~ - G~ A~.

    Parameters
    ----------
    a : Polynomial or array_like
        Coefficients a_0..a_n ascending with a_n != 0 (B must be
        nonsingular for the derivation to hold; a_n = 1 is allowed and
        reduces the result to the monic formula).
    E, G : (n, n) array_like
        Perturbations of A and B.

    Returns
    -------
    numpy.ndarray
        The changes of coefficients s^0..s^n.
    """
    a = _ascending_coeffs(a)
    n = len(a) - 1
    if n < 1:
        raise ValueError("need a polynomial of degree >= 1")
    if a[n] == 0:
        raise ValueError("the pencil formula needs a nonzero leading "
                         "coefficient (nonsingular B)")
    E = np.asarray(E, dtype=np.complex128)
    G = np.asarray(G, dtype=np.complex128)
    if E.shape != (n, n) or G.shape != (n, n):
        raise ValueError("perturbation matrices must both be %d x %d" % (n, n))

    q = np.concatenate([a[:n], [1.0]])
    A = _companion_matrix(a[:n])
    da = em_coefficient_perturbation(q, E - G @ A)

    dp = np.trace(G) * q
    dp[:n] += da

    if a[n] != 1.0 and n >= 2:
        # Leading principal submatrix: the pure down-shift, i.e. the
        # companion matrix of s^{n-1}.
        At = A[:n - 1, :n - 1]
        qt = np.zeros(n, dtype=np.complex128)
        qt[n - 1] = 1.0
        dat = em_coefficient_perturbation(
            qt, E[:n - 1, :n - 1] - G[:n - 1, :n - 1] @ At)
        inner = np.zeros(n + 1, dtype=np.complex128)
        inner[1:n] = dat
        inner[n] = np.trace(G[:n - 1, :n - 1])
        dp += (a[n] - 1.0) * inner
    elif a[n] != 1.0:
        # n == 1: the submatrix is empty and only s * (a_1 - 1) * tr(G~)
        # would remain, with tr of a 0x0 matrix being zero.
        pass
    return dp


# ---------------------------------------------------------------------------
# Measured and tabulated backward errors
# ---------------------------------------------------------------------------

def coefficient_deviations(a_exact, roots, leading):
    """Per-coefficient deviation of the polynomial rebuilt from roots.

    ``leading * prod(x - roots[j])`` is expanded in double-double
    arithmetic, both it and ``a_exact`` are scaled to unit 2-norm (still
    in double-double), and the absolute coefficient differences are
    returned as a float vector, constant term first.

    Parameters
    ----------
    a_exact : Polynomial or array_like
        Reference coefficients a_0..a_n ascending.
    roots : array_like
        Computed roots; exactly degree-many finite values.
    leading : complex
        Leading coefficient to attach to the monic product.
    """
    a = _ascending_coeffs(a_exact)
    roots = np.asarray(roots, dtype=np.complex128)
    if roots.shape != (len(a) - 1,):
        raise ValueError("need exactly one root per polynomial degree")
    if not np.all(np.isfinite(roots)):
        raise ValueError("roots must be finite")

    rebuilt = _unit_2norm(expand_from_roots(roots, leading))
    reference = _unit_2norm([ExtendedComplex.from_complex(c) for c in a])
    return np.array([abs((ct - ce).to_complex())
                     for ct, ce in zip(rebuilt, reference)])


def measured_backward_error(a_exact, roots, leading):
    """Largest coefficient deviation of the polynomial rebuilt from roots.

    Maximum of :func:`coefficient_deviations` over all coefficients.
    """
    return float(coefficient_deviations(a_exact, roots, leading).max())


def predicted_backward_error_table(a, scale_factor=10.0):
    """Per-coefficient predicted backward error, as rounded exponents.

    Models one QZ run as an exact run on (A + E, B + G) where every
    entry of E on and above the second subdiagonal, and of G on and
    above the first, equals scale_factor * n * eps; feeds that through
    :func:`pencil_perturbation_poly`; and returns log10 of the
    coefficient magnitudes rounded to whole numbers (-inf for exact
    zeros, e.g. when scale_factor is 0).
    """
    a = _ascending_coeffs(a)
    n = len(a) - 1
    if n < 1:
        raise ValueError("need a polynomial of degree >= 1")
    level = scale_factor * n * float(np.finfo(np.float64).eps)
    E = level * np.triu(np.ones((n, n)), -2)
    G = level * np.triu(np.ones((n, n)), -1)
    dp = pencil_perturbation_poly(a, E, G)
    with np.errstate(divide="ignore"):
        return np.round(np.log10(np.abs(dp)))
