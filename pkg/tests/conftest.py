import numpy as np
import pytest

from fastqz.generators import (
    PencilGenerators,
    QuasiseparableGenerators,
    TriangularGenerators,
)


def crandn(rng, *shape):
    """Complex standard-normal samples."""
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_pencil(rng, n, max_order_v=2, max_order_u=1):
    """Random generator data with consistent dimension chains.

    The result is a structurally valid PencilGenerators instance; V and U
    are generally *not* unitary.  Useful as input for bookkeeping oracles
    (dense reconstruction, entry formulas) that only require consistent
    shapes.
    """
    rv = [int(rng.integers(1, max_order_v + 1)) for _ in range(n)]
    g = [crandn(rng, 1, rv[i]) for i in range(n)]
    h = [crandn(rng, rv[j], 1) for j in range(n)]
    b = [crandn(rng, rv[k], rv[k + 1]) for k in range(n - 1)]
    v = TriangularGenerators(g, h, b)

    ru = [int(rng.integers(1, max_order_u + 1)) for _ in range(n - 1)]
    gu = [crandn(rng, 1, ru[i]) for i in range(n - 1)]
    hu = [None] + [crandn(rng, ru[j - 1], 1) for j in range(1, n)]
    bu = [None] + [crandn(rng, ru[k - 1], ru[k]) for k in range(1, n - 1)]
    u = QuasiseparableGenerators(gu, hu, bu)

    return PencilGenerators(
        n=n,
        sigma=crandn(rng, n - 1),
        v=v,
        d_b=crandn(rng, n),
        u=u,
        z=crandn(rng, n),
        w=crandn(rng, n),
        p=crandn(rng, n),
        q=crandn(rng, n),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
