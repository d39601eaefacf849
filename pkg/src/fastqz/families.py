"""Polynomial families for experiments and the command-line tools.

Each builder returns ``(polynomial, reference_roots)`` where the roots
are a closed form when one exists and ``None`` otherwise.  Polynomials
come out in their natural scaling; callers decide about normalization.
"""

import math
from fractions import Fraction

import numpy as np

from .generators import Polynomial

__all__ = [
    "FAMILIES",
    "bernoulli",
    "chebyshev",
    "cyclotomic",
    "equispaced",
    "power_sum",
    "random_coefficients",
    "unbalanced",
]


def random_coefficients(degree, rng):
    """Coefficients with real and imaginary parts uniform in [-1, 1]."""
    c = rng.uniform(-1, 1, degree + 1) + 1j * rng.uniform(-1, 1, degree + 1)
    return Polynomial(c), None


def cyclotomic(degree, rng=None):
    """z^N - i, whose roots exp(i pi (4k+1) / (2N)) sit on the unit circle.

    The offset -i keeps all coefficients complex so nothing accidentally
    collapses to a real special case.
    """
    c = np.zeros(degree + 1, dtype=np.complex128)
    c[0] = -1j
    c[degree] = 1.0
    k = np.arange(degree)
    roots = np.exp(1j * np.pi * (4 * k + 1) / (2 * degree))
    return Polynomial(c), roots


def power_sum(degree, rng=None):
    """1 + x + ... + x^N; roots are the (N+1)-st roots of unity except 1."""
    c = np.ones(degree + 1, dtype=np.complex128)
    k = np.arange(1, degree + 1)
    roots = np.exp(2j * np.pi * k / (degree + 1))
    return Polynomial(c), roots


def equispaced(degree, rng=None):
    """Monic polynomial with roots equally spaced in [-2.1, 1.9].

    Coefficients are expanded from the root grid in double-double
    arithmetic, so the file a generator writes is faithful to the grid
    well below working precision.
    """
    from .backward import expand_from_roots

    roots = np.linspace(-2.1, 1.9, degree).astype(np.complex128)
    coeffs = np.array([t.to_complex() for t in expand_from_roots(roots, 1.0)])
    return Polynomial(coeffs), roots


def chebyshev(degree, rng=None):
    """Chebyshev polynomial of the first kind, exact integer coefficients.

    The three-term recurrence is run in Python integers and converted at
    the end; roots are cos(pi (2k+1) / (2N)).
    """
    prev = [1]
    cur = [0, 1]
    if degree == 0:
        cur = prev
    for _ in range(degree - 1):
        nxt = [0] + [2 * c for c in cur]
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    c = np.array(cur, dtype=np.complex128)
    k = np.arange(degree)
    roots = np.cos(np.pi * (2 * k + 1) / (2 * degree)).astype(np.complex128)
    return Polynomial(c), roots


def bernoulli(degree, rng=None):
    """Bernoulli polynomial, built from exact rational coefficients.

    B_n(x) = sum_k C(n,k) B_{n-k} x^k with the B_1 = -1/2 convention;
    the rationals are exact and only the final conversion to doubles
    rounds.  No closed-form roots.
    """
    from mpmath import bernfrac

    n = degree
    c = np.zeros(n + 1, dtype=np.complex128)
    for k in range(n + 1):
        p, q = bernfrac(n - k)
        c[k] = float(Fraction(math.comb(n, k)) * Fraction(p, q))
    return Polynomial(c), None


def unbalanced(degree, rng=None):
    """Real coefficients alternating between 1e+3 and 1e-9.

    p_k = 10^(6*(-1)^(k+1) - 3): odd-index coefficients are twelve orders
    of magnitude above the even ones, which breaks solvers that work on
    the companion matrix of the monic rescaling.
    """
    k = np.arange(degree + 1)
    c = (10.0 ** (6.0 * (-1.0) ** (k + 1) - 3)).astype(np.complex128)
    return Polynomial(c), None


FAMILIES = {
    "random": random_coefficients,
    "cyclotomic": cyclotomic,
    "chebyshev": chebyshev,
    "equispaced": equispaced,
    "bernoulli": bernoulli,
    "unbalanced": unbalanced,
}
