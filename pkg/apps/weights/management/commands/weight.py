import logging
from fractions import Fraction

from django.conf import settings

from apps.core.commands import WorkbenchCommand
from apps.core.exceptions import GraphValidationError, WorkbenchError
from apps.graphs.serializers import load_graph
from apps.graphs.structures import FILTERS, Flavor, VertexSet, all_of, enumerate_graphs

from ... import cache
from ...integration import METHODS, integrate_weight
from ...known import known_weight
from ...serializers import WeightEstimateSerializer, WeightRequestSerializer
from ...slices import SLICE_NAMES

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ['index', 'graph', 'known', 'value', 'stderr', 'status']


def parse_fraction(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise WorkbenchError(f"invalid expected value {text!r}") from exc


class Command(WorkbenchCommand):
    help = 'Integrate graph weights over configuration spaces'

    def add_subcommands(self, subparsers):
        compute = subparsers.add_parser('compute', help='Weight of one graph')
        compute.add_argument('--graph', required=True, help='Graph JSON file')
        self.add_integration_arguments(compute)
        compute.add_argument('--method', choices=METHODS, default='auto')
        compute.add_argument('--no-cache', action='store_true', help='Neither read nor write the weight cache')
        compute.add_argument('--expect', default=None, help='Expected value, e.g. 1/24')
        self.add_common_arguments(compute)

        table = subparsers.add_parser('table', help='Weights of all top graphs on a stratum')
        table.add_argument('--flavor', choices=[f.value for f in Flavor], required=True)
        table.add_argument('--vertices', type=int, default=0, help='Number of free vertices')
        table.add_argument('--collinear', type=int, default=0)
        table.add_argument('--boundary', type=int, default=0)
        table.add_argument('--filter', action='append', choices=sorted(FILTERS), default=[])
        table.add_argument('--integrate', action='store_true', help='Also integrate numerically')
        self.add_integration_arguments(table)
        table.add_argument('--format', choices=['json', 'csv'], default='json')
        self.add_common_arguments(table)

    def add_integration_arguments(self, parser):
        parser.add_argument('--samples', type=int, default=100000)
        parser.add_argument('--seed', type=int, default=None)
        parser.add_argument('--slice', choices=SLICE_NAMES, default='default')
        parser.add_argument('--tolerance', type=float, default=None)

    def request(self, options):
        request = WeightRequestSerializer(data={
            'samples': options['samples'],
            'seed': settings.WORKBENCH_DEFAULT_SEED if options['seed'] is None else options['seed'],
            'slice': options['slice'],
            'workers': self.workers(options),
            'method': options.get('method', 'auto'),
            'tolerance': settings.WORKBENCH_TOLERANCE if options['tolerance'] is None else options['tolerance'],
        })
        request.is_valid(raise_exception=True)
        return request.validated_data

    def integrate(self, g, params, use_cache=True):
        use_cache = use_cache and params['method'] != 'quadrature'
        if use_cache:
            cached = cache.lookup(g, params['slice'], params['samples'], params['seed'], params['workers'])
            if cached is not None:
                return cached
        estimate = integrate_weight(
            g, params['slice'], params['samples'], params['seed'], params['workers'], params['method']
        )
        if use_cache and estimate.method == 'monte-carlo':
            cache.store(estimate)
        return estimate

    def handle_compute(self, graph, no_cache, expect, **options):
        params = self.request(options)
        g = load_graph(self.load_json(graph))
        estimate = self.integrate(g, params, use_cache=not no_cache)
        expected = parse_fraction(expect) if expect is not None else known_weight(g)
        payload = dict(WeightEstimateSerializer(estimate).data)
        passed = True
        if expected is not None:
            passed = estimate.agrees_with(expected, params['tolerance'])
            payload['expected'] = expected
            payload['tolerance'] = params['tolerance']
            payload['status'] = 'PASS' if passed else 'FAIL'
        return 'weight', payload, passed

    def handle_table(self, flavor, vertices, collinear, boundary, integrate, **options):
        if min(vertices, collinear, boundary) < 0:
            raise GraphValidationError('vertex counts must be non-negative')
        vertex_set = VertexSet.standard(flavor, vertices, collinear, boundary)
        if not vertex_set.is_defined():
            raise GraphValidationError(f"no configuration space for {vertex_set}")
        params = self.request(options)
        names = options['filter']
        predicate = all_of(*(FILTERS[name] for name in names)) if names else None
        graphs = enumerate_graphs(vertex_set, vertex_set.dimension, predicate)

        rows = []
        passed = True
        for index, g in enumerate(graphs):
            row = {'index': index, 'graph': str(g), 'edges': g.describe()['edges'], 'known': known_weight(g)}
            if integrate:
                estimate = self.integrate(g, params)
                row['value'] = estimate.value
                row['stderr'] = estimate.stderr
                if row['known'] is not None:
                    ok = estimate.agrees_with(row['known'], params['tolerance'])
                    row['status'] = 'PASS' if ok else 'FAIL'
                    passed = passed and ok
            rows.append(row)
        payload = {
            'vertices': vertex_set.describe(),
            'dimension': vertex_set.dimension,
            'filters': names,
            'integrated': integrate,
            'samples': params['samples'] if integrate else 0,
            'seed': params['seed'],
            'slice': params['slice'],
            'count': len(rows),
            'columns': TABLE_COLUMNS,
            'rows': rows,
        }
        return 'weight-table', payload, passed
