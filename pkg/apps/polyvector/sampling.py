"""
Seeded random polyvectors for property checks.
"""
import itertools
from fractions import Fraction

import numpy as np

from .algebra import PolyVector


def monomial_keys(space, psi_degree, max_polynomial_degree):
    """All monomial keys with the given psi-degree and bounded x-degree."""
    n = space.dimension
    bound = min(max_polynomial_degree, space.truncation)
    keys = []
    for odd in itertools.combinations(range(n), psi_degree):
        psi_part = tuple(1 if a in odd else 0 for a in range(n))
        for x_part in itertools.product(range(bound + 1), repeat=n):
            if sum(x_part) <= bound:
                keys.append(tuple(x_part) + psi_part)
    return sorted(keys)


def random_polyvector(space, rng, psi_degree, max_polynomial_degree=2, terms=3, denominator=2):
    """
    Homogeneous polyvector with ``terms`` distinct random monomials of the
    given psi-degree and small rational coefficients.
    """
    if isinstance(rng, int):
        rng = np.random.default_rng(rng)
    keys = monomial_keys(space, psi_degree, max_polynomial_degree)
    if not keys:
        return space.zero()
    chosen = rng.choice(len(keys), size=min(terms, len(keys)), replace=False)
    numerators = rng.integers(1, 4, size=len(chosen)) * rng.choice([-1, 1], size=len(chosen))
    denominators = rng.integers(1, denominator + 1, size=len(chosen))
    return PolyVector(
        space,
        {
            keys[int(i)]: Fraction(int(p), int(q))
            for i, p, q in zip(chosen, numerators, denominators, strict=True)
        },
    )
