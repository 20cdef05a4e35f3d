from apps.core.commands import WorkbenchCommand
from apps.core.exceptions import GraphValidationError

from ...structures import FILTERS, Flavor, VertexSet, all_of, enumerate_graphs


class Command(WorkbenchCommand):
    help = 'Enumerate admissible graphs of a given flavor'

    def add_subcommands(self, subparsers):
        parser = subparsers.add_parser('enumerate', help='List canonical graphs')
        parser.add_argument('--flavor', choices=[f.value for f in Flavor], required=True)
        parser.add_argument('--vertices', type=int, default=0, help='Number of free vertices')
        parser.add_argument('--collinear', type=int, default=0)
        parser.add_argument('--boundary', type=int, default=0)
        parser.add_argument('--edges', type=int, required=True)
        parser.add_argument(
            '--filter',
            action='append',
            choices=sorted(FILTERS),
            default=[],
            help='Named filter, may be repeated',
        )
        parser.add_argument('--limit', type=int, default=None, help='Candidate edge-set bound')
        self.add_common_arguments(parser, workers=False)

    def handle_enumerate(self, flavor, vertices, collinear, boundary, edges, limit, **options):
        if min(vertices, collinear, boundary) < 0:
            raise GraphValidationError('vertex counts must be non-negative')
        vertex_set = VertexSet.standard(flavor, vertices, collinear, boundary)
        names = options['filter']
        predicate = all_of(*(FILTERS[name] for name in names)) if names else None
        graphs = enumerate_graphs(vertex_set, edges, predicate, limit=limit)
        payload = {
            'vertices': vertex_set.describe(),
            'edges': edges,
            'filters': names,
            'count': len(graphs),
            'graphs': [graph.describe() for graph in graphs],
        }
        return 'graphs-enumerate', payload, True
