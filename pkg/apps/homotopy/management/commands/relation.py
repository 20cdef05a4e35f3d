import logging

from django.conf import settings

from apps.core.commands import WorkbenchCommand
from apps.core.exceptions import GraphValidationError
from apps.graphs.structures import FILTERS, Flavor, VertexSet, all_of
from apps.polyvector.algebra import Space, parse_polyvector

from ...components import StructureComponents
from ...relations import DEFAULT_SEEDS, RELATIONS, verify_relation
from ...serializers import WEIGHT_MODES, RelationRequestSerializer, WeightSourceSerializer
from ...stokes import stokes_check
from ...strata import boundary_strata

logger = logging.getLogger(__name__)


class Command(WorkbenchCommand):
    help = 'Check homotopy-algebra relations and Stokes identities among the structure components'

    def add_subcommands(self, subparsers):
        check = subparsers.add_parser('check', help='Verify one relation on seeded random inputs')
        check.add_argument('--relation', choices=sorted(RELATIONS), required=True)
        check.add_argument('--arity', type=int, default=None)
        check.add_argument('--dimension', type=int, default=2, help='Dimension of the polyvector space')
        check.add_argument('--seeds', type=int, nargs='+', default=list(DEFAULT_SEEDS))
        check.add_argument('--pi', default=None, help='Maurer-Cartan element for twisted-mc, e.g. "x2*psi1*psi2"')
        check.add_argument('--order', type=int, default=1, help='Order of the formal parameter for twisted-mc')
        self.add_weight_arguments(check)
        self.add_common_arguments(check)

        stokes = subparsers.add_parser('stokes', help='Boundary identities of one family of graphs')
        stokes.add_argument('--flavor', choices=[f.value for f in Flavor], required=True)
        stokes.add_argument('--vertices', type=int, default=0, help='Number of free vertices')
        stokes.add_argument('--collinear', type=int, default=0)
        stokes.add_argument('--boundary', type=int, default=0)
        stokes.add_argument('--filter', action='append', choices=sorted(FILTERS), default=[])
        stokes.add_argument('--strata', action='store_true', help='Also list the boundary strata')
        self.add_weight_arguments(stokes)
        self.add_common_arguments(stokes)

    def add_weight_arguments(self, parser):
        parser.add_argument('--weights', choices=WEIGHT_MODES, default='known')
        parser.add_argument('--known', choices=['all', 'zeros', 'none'], default='all',
                            help='Closed-form weights used next to Monte Carlo ones')
        parser.add_argument('--samples', type=int, default=100000)
        parser.add_argument('--seed', type=int, default=None)
        parser.add_argument('--tolerance', type=float, default=None)

    def weight_data(self, options):
        return {
            'weights': options['weights'],
            'known': options['known'],
            'samples': options['samples'],
            'seed': settings.WORKBENCH_DEFAULT_SEED if options['seed'] is None else options['seed'],
            'workers': self.workers(options),
            'tolerance': options['tolerance'],
        }

    def handle_check(self, relation, arity, dimension, seeds, pi, order, **options):
        request = RelationRequestSerializer(data={
            **self.weight_data(options),
            'relation': relation,
            'arity': arity,
            'dimension': dimension,
            'seeds': seeds,
            'order': order,
            'pi': pi,
        })
        request.is_valid(raise_exception=True)
        params = request.validated_data
        source = request.save()
        space = Space(dimension)
        tolerance = params.get('tolerance')
        if tolerance is None:
            tolerance = 0.0 if params['weights'] == 'known' else settings.WORKBENCH_TOLERANCE
        element = parse_polyvector(params['pi'], space) if params.get('pi') else None

        structure = StructureComponents(space, source)
        report = verify_relation(
            structure, relation, params.get('arity'), params['seeds'], tolerance, pi=element, order=params['order'],
        )
        payload = report.describe()
        payload['dimension'] = dimension
        payload['weights'] = params['weights']
        if element is not None:
            payload['pi'] = str(element)
            payload['order'] = params['order']
        return 'relation', payload, report.passed

    def handle_stokes(self, flavor, vertices, collinear, boundary, strata, **options):
        if min(vertices, collinear, boundary) < 0:
            raise GraphValidationError('vertex counts must be non-negative')
        vertex_set = VertexSet.standard(flavor, vertices, collinear, boundary)
        request = WeightSourceSerializer(data=self.weight_data(options))
        request.is_valid(raise_exception=True)
        source = request.save()
        names = options['filter']
        predicate = all_of(*(FILTERS[name] for name in names)) if names else None
        report = stokes_check(vertex_set, source, request.validated_data.get('tolerance'), filter=predicate)
        payload = report.describe()
        payload['weights'] = request.validated_data['weights']
        payload['filters'] = names
        if strata:
            payload['strata'] = [term.describe() for term in boundary_strata(vertex_set)]
        return 'stokes', payload, report.passed
