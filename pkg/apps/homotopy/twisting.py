"""
Twisting the structure maps by a Maurer-Cartan element.

With h the formal parameter, the twisted components are

    nu^pi_q = nu_q + sum_{p >= 1} h^p / p! V_{p,q}(pi, .., pi, -)
    mu^pi_n = mu_n + sum_{p >= 1} h^p / p! U_{p,n}(pi, .., pi, -)
    Z^pi_n  = Z_{0,1,n} + sum_{p >= 1} h^p / p! Z_{p,1,n}(pi, .., pi, -)

Z^pi sends a polyvector to a cochain on functions; at order zero it is the
Hochschild-Kostant-Rosenberg map. The nu and mu families are packaged as
formal A-infinity structures so their Maurer-Cartan equations can be checked
order by order. The Z^pi components are computed on first use, since their
higher orders need weights outside the closed-form table.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

from apps.core.exceptions import AlgebraError, NotMaurerCartanError
from apps.graphs.structures import Flavor, VertexSet, all_of, out_degree
from apps.hochschild.cochains import AInfinity, Cochain, evaluate_graded, from_multilinear
from apps.polyvector.algebra import schouten

from .components import StructureComponents, bounded_out_degree

logger = logging.getLogger(__name__)

DEFAULT_ARITY = 4


def check_maurer_cartan(pi):
    """Raise NotMaurerCartanError unless pi is even and [pi, pi] vanishes."""
    if not pi:
        return 0
    parts = pi.psi_degree_parts()
    if len(parts) != 1:
        raise NotMaurerCartanError("pi must have a single psi-degree")
    if any(degree % 2 for degree in pi.degrees()):
        raise NotMaurerCartanError(f"pi has odd degree: {pi}")
    if schouten(pi, pi):
        raise NotMaurerCartanError(f"[pi, pi] does not vanish for {pi}")
    (psi_degree,) = parts
    return psi_degree


@dataclass
class TwistedStructure:
    """Components per power of h and arity; missing entries vanish."""

    pi: object
    order: int
    pi_degree: int = 0
    nu: dict = field(default_factory=dict)
    mu: dict = field(default_factory=dict)
    hkr_source: object = field(default=None, repr=False)
    _hkr: dict = field(default_factory=dict, repr=False)

    def nu_component(self, power, arity):
        return self.nu.get(power, {}).get(arity)

    def mu_component(self, power, arity):
        return self.mu.get(power, {}).get(arity)

    def hkr_component(self, power, arity):
        """Z^pi at h^power: one polyvector slot followed by ``arity`` function slots."""
        if power > self.order or self.hkr_source is None:
            return None
        key = (power, arity)
        if key not in self._hkr:
            self._hkr[key] = _with_pi(self.hkr_source(power, arity), self.pi, power)
        return self._hkr[key]

    def hkr_arity(self, psi_degree, power):
        """Number of functions Z^pi at h^power takes next to a polyvector of ``psi_degree``."""
        return power * (self.pi_degree - 2) + psi_degree

    def hkr_cochain(self, gamma, power):
        """Z^pi at h^power applied to gamma, as a cochain on functions."""
        space = self.pi.space
        parts = gamma.psi_degree_parts()
        if len(parts) > 1:
            raise AlgebraError("Z^pi takes a polyvector of a single psi-degree")
        arity = self.hkr_arity(next(iter(parts), 0), power)
        if arity < 0:
            return Cochain(space, 0)
        component = self.hkr_component(power, arity)
        if component is None or not gamma:
            return Cochain(space, arity - 1)
        return from_multilinear(component.bind(gamma), arity, 0, space, name=f"Z^pi_{power}")

    def hkr_series(self, gamma, order=None):
        """The formal cochain Z^pi(gamma) as a mapping from powers of h to cochains."""
        order = self.order if order is None else order
        return {power: self.hkr_cochain(gamma, power) for power in range(order + 1)}

    def hkr_defect(self, gamma, power, functions):
        """
        Value on ``functions`` of the h^power coefficient of
        Z^pi(nu^pi_1(gamma)) - [mu^pi, Z^pi(gamma)].
        """
        space = self.pi.space
        total = space.zero()
        for j in range(power + 1):
            bracket = self.nu_component(j, 1)
            if bracket is None:
                continue
            for part in bracket(gamma).psi_degree_parts().values():
                total = total + self.hkr_cochain(part, power - j)(*functions)
        graded = self.mu_structure().differential(self.hkr_series(gamma, power), power)
        found = evaluate_graded(graded, functions)
        return total if found is None else total - found

    def _a_infinity(self, components, target):
        pieces = {}
        for power in range(self.order + 1):
            piece = Cochain(target, 1)
            for arity, operator in sorted(components.get(power, {}).items()):
                piece = piece + from_multilinear(operator, arity, 2 - arity, target, name=operator.name)
            pieces[power] = piece
        return AInfinity(pieces, order=self.order)

    def nu_structure(self):
        return self._a_infinity(self.nu, self.pi.space)

    def mu_structure(self):
        return self._a_infinity(self.mu, self.pi.space)


def _restricted(structure, bound):
    """Components on graphs whose free vertices satisfy ``bound``."""
    predicate = bound if structure.predicate is None else all_of(structure.predicate, bound)
    return StructureComponents(structure.space, structure.weight_source, predicate)


def arity_bound(max_arity, power):
    """Highest arity kept at a power of h: one less for every power above the first."""
    return max_arity - max(0, power - 1)


def _with_pi(found, pi, power):
    """Bind pi into the first ``power`` slots and divide by power!."""
    if found is None or not power:
        return found
    return found.bind(*([pi] * power)).scale(Fraction(1, math.factorial(power)))


def _twisted_family(component, pi, order, lowest, max_arity):
    family = {}
    for power in range(order + 1):
        for arity in range(lowest, arity_bound(max_arity, power) + 1):
            operator = _with_pi(component(power, arity), pi, power)
            if operator is not None:
                family.setdefault(power, {})[arity] = operator
    return family


def twist(structure, pi, hbar_order, max_arity=DEFAULT_ARITY):
    """Twisted nu, mu and Z^pi up to h^hbar_order."""
    if hbar_order < 0:
        raise AlgebraError("the order of the formal parameter must be non-negative")
    if pi.space != structure.space:
        raise AlgebraError("pi lives on another space")
    psi_degree = check_maurer_cartan(pi)
    # psi-free values need every psi of pi consumed; polyvector values need no more than that
    polyvector_graphs = _restricted(structure, bounded_out_degree("free", psi_degree)) if pi else structure
    function_graphs = _restricted(structure, out_degree("free", psi_degree)) if pi else structure
    logger.info("Twisting by %s to order %d", pi, hbar_order)

    def nu_component(power, arity):
        if power and not pi:
            return None
        vertices = VertexSet.standard(Flavor.CF_C, power, arity)
        if not vertices.is_defined():
            return None
        return polyvector_graphs.find(vertices, f"V_{power},{arity}" if power else f"nu_{arity}")

    def mu_component(power, arity):
        if power and not pi:
            return None
        vertices = VertexSet.standard(Flavor.CF_H, power, 0, arity)
        if not vertices.is_defined():
            return None
        return function_graphs.find(vertices, f"U_{power},{arity}" if power else f"mu_{arity}")

    def hkr_component(power, arity):
        if power and not pi:
            return None
        vertices = VertexSet.standard(Flavor.CF_H, power, 1, arity)
        if not vertices.is_defined():
            return None
        return function_graphs.find(vertices, f"Z_{power},1,{arity}")

    twisted = TwistedStructure(pi, hbar_order, psi_degree, hkr_source=hkr_component)
    twisted.nu = _twisted_family(nu_component, pi, hbar_order, 1, max_arity)
    twisted.mu = _twisted_family(mu_component, pi, hbar_order, 0, max_arity)
    return twisted
