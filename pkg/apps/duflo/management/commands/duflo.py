import logging

import numpy as np
from django.conf import settings

from apps.core.commands import WorkbenchCommand
from apps.core.exceptions import WorkbenchError
from apps.polyvector.sampling import random_polyvector
from apps.weights.sources import KnownWeights, MonteCarloWeights

from ...lie import SHIPPED, lie_to_mc, shipped
from ...serializers import StarRequestSerializer, load_lie_algebra_json
from ...star import exotic_correction, exotic_display, monomial_basis, star_product

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ['left', 'right', 'power', 'value']


class Command(WorkbenchCommand):
    help = 'Star products and the exotic correction for small Lie algebras'

    def add_subcommands(self, subparsers):
        star = subparsers.add_parser('star', help='Star product coefficients and associativity')
        self.add_algebra_arguments(star)
        star.add_argument('--order', type=int, default=2)
        star.add_argument('--max-degree', type=int, default=3, help='Largest degree of the basis monomials')
        star.add_argument('--samples', type=int, default=100000)
        star.add_argument('--seed', type=int, default=None)
        star.add_argument('--known', choices=['all', 'zeros', 'none'], default='all')
        star.add_argument('--format', choices=['json', 'csv'], default='json')
        self.add_common_arguments(star)

        exotic = subparsers.add_parser('exotic', help='Compare V_{1,3}(pi) with the eight-term formula')
        self.add_algebra_arguments(exotic)
        exotic.add_argument('--seeds', type=int, nargs='+', default=[0, 1, 2, 3, 4])
        self.add_common_arguments(exotic, workers=False)

    def add_algebra_arguments(self, parser):
        group = parser.add_mutually_exclusive_group(required=True)
        group.add_argument('--lie', help=f"Shipped Lie algebra: {', '.join(SHIPPED)}")
        group.add_argument('--lie-file', help='Lie algebra JSON file')

    def algebra(self, options):
        if options.get('lie_file'):
            return load_lie_algebra_json(self.load_json(options['lie_file']))
        return shipped(options['lie'])

    def handle_star(self, order, max_degree, samples, seed, known, **options):
        algebra = self.algebra(options)
        request = StarRequestSerializer(data={
            'order': order,
            'max_degree': max_degree,
            'samples': samples,
            'seed': settings.WORKBENCH_DEFAULT_SEED if seed is None else seed,
            'workers': self.workers(options),
            'known': known,
        })
        request.is_valid(raise_exception=True)
        params = request.validated_data
        source = KnownWeights() if params['order'] < 2 else MonteCarloWeights(
            params['samples'], seed=params['seed'], workers=params['workers'], known=params['known'],
        )
        star = star_product(algebra, params['order'], source, params['max_degree'])

        space = star.space
        brackets = []
        if params['order'] >= 1:
            for i in range(1, algebra.dimension + 1):
                for j in range(i + 1, algebra.dimension + 1):
                    found = star.poisson_bracket(space.x(i), space.x(j))
                    expected = space.zero()
                    for k, value in enumerate(algebra.bracket(_unit(algebra, i), _unit(algebra, j)), start=1):
                        expected = expected + space.x(k).scale(value)
                    brackets.append({'i': i, 'j': j, 'bracket': str(found), 'ok': found == expected})
        associativity = star.associativity()
        basis = monomial_basis(space, star.max_degree)
        filtration = all(star.lowers_degree(f, g) for f in basis for g in basis)
        passed = associativity.passed and filtration and all(row['ok'] for row in brackets)
        rows = star.table()
        payload = {
            'algebra': algebra.describe(),
            'pi': str(star.pi),
            'order': params['order'],
            'max_degree': params['max_degree'],
            'samples': params['samples'] if params['order'] >= 2 else 0,
            'seed': params['seed'],
            'weights': star.weights(),
            'brackets': brackets,
            'filtration': filtration,
            'associativity': associativity.describe(),
            'status': 'PASS' if passed else 'FAIL',
            'columns': TABLE_COLUMNS,
            'rows': rows,
        }
        return 'duflo-star', payload, passed

    def handle_exotic(self, seeds, **options):
        algebra = self.algebra(options)
        if not seeds:
            raise WorkbenchError('at least one seed is required')
        operator = exotic_correction(algebra)
        space = operator.space
        pi = lie_to_mc(algebra, space)
        residual = 0.0
        samples = []
        for seed in seeds:
            rng = np.random.default_rng(seed)
            inputs = [
                random_polyvector(space, rng, int(rng.integers(0, space.dimension + 1)), max_polynomial_degree=2, terms=2)
                for _ in range(3)
            ]
            value = operator(*inputs)
            difference = value - exotic_display(pi, *inputs)
            residual = max([residual] + [abs(float(c)) for c in difference.terms.values()])
            samples.append({'seed': seed, 'inputs': [str(a) for a in inputs], 'value': str(value)})
        passed = residual == 0.0
        payload = {
            'algebra': algebra.describe(),
            'pi': str(pi),
            'degree': operator.degree,
            'arity': operator.arity,
            'residual_norm': residual,
            'status': 'PASS' if passed else 'FAIL',
            'seeds': list(seeds),
            'samples': samples,
        }
        return 'duflo-exotic', payload, passed


def _unit(algebra, i):
    return [1 if a == i - 1 else 0 for a in range(algebra.dimension)]

