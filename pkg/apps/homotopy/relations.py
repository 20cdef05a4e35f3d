"""
Relations among the structure components, checked on seeded random inputs.

Every relation is multilinear and polynomial in the inputs, so a vanishing
residual on a handful of random rational inputs at fixed truncation is strong
evidence that it holds identically. Residual norms are the largest absolute
coefficient of the residual polyvectors.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from apps.core.exceptions import AlgebraError, WorkbenchError
from apps.polyvector.sampling import random_polyvector

from .twisting import arity_bound, twist

logger = logging.getLogger(__name__)

DEFAULT_SEEDS = (0, 1, 2, 3, 4)


@dataclass
class RelationReport:
    relation: str
    arity: int
    residual_norm: float
    tolerance: float
    seeds: tuple
    details: list = field(default_factory=list)

    @property
    def passed(self):
        return self.residual_norm <= self.tolerance

    @property
    def status(self):
        return "PASS" if self.passed else "FAIL"

    def describe(self):
        return {
            "relation": self.relation,
            "arity": self.arity,
            "status": self.status,
            "residual_norm": self.residual_norm,
            "tolerance": self.tolerance,
            "seeds": list(self.seeds),
            "details": self.details,
        }


def norm(value):
    return max((abs(float(c)) for c in value.terms.values()), default=0.0)


def degree_of(value):
    return value.degree if value else 0


def draw(space, rng, psi_degree=None, terms=2):
    """A random homogeneous polyvector; a random psi-degree unless given."""
    if psi_degree is None:
        psi_degree = int(rng.integers(0, space.dimension + 1))
    return random_polyvector(space, rng, psi_degree, max_polynomial_degree=2, terms=terms)


def draw_function(space, rng):
    return draw(space, rng, psi_degree=0)


def coboundary(cochain, inputs):
    """Hochschild coboundary of a cochain on function inputs."""
    n = len(inputs) - 1
    total = inputs[0] * cochain(*inputs[1:])
    for i in range(1, n + 1):
        merged = inputs[:i - 1] + [inputs[i - 1] * inputs[i]] + inputs[i + 1:]
        total = total + cochain(*merged).scale((-1) ** i)
    return total + (cochain(*inputs[:-1]) * inputs[-1]).scale((-1) ** (n + 1))


def lambda_jacobi(structure, arity, rng):
    bracket = structure.lam(2)
    a, b, c = (draw(structure.space, rng) for _ in range(3))
    da, db, dc = map(degree_of, (a, b, c))
    return (
        bracket(bracket(a, b), c)
        + bracket(bracket(a, c), b).scale((-1) ** (db * dc))
        + bracket(bracket(b, c), a).scale((-1) ** (da * (db + dc)))
    )


def lambda_higher(structure, arity, rng):
    operator = structure.lam(arity)
    return operator(*(draw(structure.space, rng) for _ in range(arity)))


def nu_associativity(structure, arity, rng):
    product = structure.nu(2)
    a, b, c = (draw(structure.space, rng) for _ in range(3))
    residual = product(product(a, b), c) - product(a, product(b, c))
    if arity >= 3:
        residual = residual + structure.nu(3)(a, b, c)
    return residual


def mu_associativity(structure, arity, rng):
    product = structure.mu(2)
    f, g, h = (draw_function(structure.space, rng) for _ in range(3))
    return product(product(f, g), h) - product(f, product(g, h))


def v11_derivation(structure, arity, rng):
    action = structure.V(1, 1)
    product = structure.nu(2)
    x, a, b = (draw(structure.space, rng) for _ in range(3))
    sign = (-1) ** ((degree_of(x) - 1) * degree_of(a))
    return (
        action(x, product(a, b))
        - product(action(x, a), b)
        - product(a, action(x, b)).scale(sign)
    )


def v13_closed(structure, arity, rng):
    space = structure.space
    x = draw(space, rng)
    cochain = structure.V(1, 3).bind(x)
    return coboundary(cochain, [draw_function(space, rng) for _ in range(4)])


def hkr_cocycle(structure, arity, rng):
    space = structure.space
    gamma = draw(space, rng, psi_degree=min(arity, space.dimension))
    cochain = structure.U(1, arity).bind(gamma)
    return coboundary(cochain, [draw_function(space, rng) for _ in range(arity + 1)])


def z_hkr(structure, arity, rng):
    space = structure.space
    gamma = draw(space, rng)
    functions = [draw_function(space, rng) for _ in range(arity)]
    return structure.Z(0, 1, arity)(gamma, *functions) - structure.U(1, arity)(gamma, *functions)


RELATIONS = {
    "lambda-jacobi": (lambda_jacobi, 3),
    "lambda-higher": (lambda_higher, 3),
    "nu-associativity": (nu_associativity, 3),
    "mu-associativity": (mu_associativity, 3),
    "v11-derivation": (v11_derivation, 3),
    "v13-closed": (v13_closed, 5),
    "hkr-cocycle": (hkr_cocycle, 2),
    "z-hkr": (z_hkr, 2),
    "twisted-mc": (None, 4),
}

ARITY_LIMITS = {
    "lambda-higher": (3, 4),
    "hkr-cocycle": (1, 3),
    "z-hkr": (1, 3),
    "twisted-mc": (1, 4),
}


def check_arity(relation_id, arity):
    if relation_id not in RELATIONS:
        raise WorkbenchError(f"unknown relation {relation_id!r}; expected one of {', '.join(RELATIONS)}")
    default = RELATIONS[relation_id][1]
    if arity is None:
        return default
    low, high = ARITY_LIMITS.get(relation_id, (default, default))
    if not low <= arity <= high:
        raise AlgebraError(f"{relation_id} is checked at arity {low}..{high}, not {arity}")
    return arity


def hkr_commutation_details(twisted, max_arity, seeds, order=0):
    """
    Residual norms of Z^pi(nu^pi_1(gamma)) = [mu^pi, Z^pi(gamma)] per power and
    number of function inputs, with gamma of every psi-degree that fits.
    """
    space = twisted.pi.space
    details = []
    for power in range(min(order, twisted.order) + 1):
        for psi_degree in range(space.dimension + 1):
            arity = twisted.hkr_arity(psi_degree, power) + 1
            if not 1 <= arity <= max_arity:
                continue
            worst = 0.0
            for seed in seeds:
                rng = np.random.default_rng(seed)
                gamma = draw(space, rng, psi_degree=psi_degree)
                functions = [draw_function(space, rng) for _ in range(arity)]
                worst = max(worst, norm(twisted.hkr_defect(gamma, power, functions)))
            details.append({"family": "hkr", "power": power, "arity": arity, "residual_norm": worst})
    return details


def twisted_mc_details(structure, pi, order, max_arity, seeds, sample_inputs=None, commutation_order=0):
    """
    Residual norms of the twisted Maurer-Cartan equations per power, family
    and arity, followed by the Z^pi commutation rows up to ``commutation_order``.
    """
    twisted = twist(structure, pi, order, max_arity)
    space = structure.space
    details = []
    families = (
        ("nu", twisted.nu_structure(), lambda rng: draw(space, rng)),
        ("mu", twisted.mu_structure(), lambda rng: draw_function(space, rng)),
    )
    for name, structure_map, sampler in families:
        for power in range(order + 1):
            defect = structure_map.maurer_cartan_defect(power)
            for arity in range(1, arity_bound(max_arity, power) + 1):
                worst = 0.0
                for seed in seeds:
                    rng = np.random.default_rng(seed)
                    inputs = sample_inputs(name, arity, rng) if sample_inputs else [sampler(rng) for _ in range(arity)]
                    worst = max(worst, norm(defect(*inputs)))
                details.append({"family": name, "power": power, "arity": arity, "residual_norm": worst})
    return details + hkr_commutation_details(twisted, max_arity, seeds, commutation_order)


def verify_relation(structure, relation_id, arity=None, seeds=DEFAULT_SEEDS, tolerance=0.0, pi=None, order=1):
    """Check one relation on every seed; ``pi`` and ``order`` apply to twisted-mc."""
    arity = check_arity(relation_id, arity)
    seeds = tuple(seeds)
    if len(seeds) < 1:
        raise WorkbenchError("at least one seed is required")
    logger.info("Checking %s at arity %d on %d seeds", relation_id, arity, len(seeds))
    if relation_id == "twisted-mc":
        if pi is None:
            raise WorkbenchError("twisted-mc needs a Maurer-Cartan element")
        details = twisted_mc_details(structure, pi, order, arity, seeds)
        residual = max((row["residual_norm"] for row in details), default=0.0)
        return RelationReport(relation_id, arity, residual, tolerance, seeds, details)

    check = RELATIONS[relation_id][0]
    details = []
    for seed in seeds:
        rng = np.random.default_rng(seed)
        details.append({"seed": seed, "residual_norm": norm(check(structure, arity, rng))})
    residual = max(row["residual_norm"] for row in details)
    report = RelationReport(relation_id, arity, residual, tolerance, seeds, details)
    logger.info("%s: %s (residual %.3g)", relation_id, report.status, residual)
    return report
