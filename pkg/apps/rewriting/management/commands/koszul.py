import logging

from django.conf import settings

from apps.core.commands import WorkbenchCommand
from apps.core.exceptions import RewriteBudgetExceeded

from ...confluence import check_confluence, redexes, rewrite_trace
from ...presentations import PRESETS, preset
from ...serializers import load_presentation
from ...trees import LEFTMOST_INNERMOST, STRATEGIES

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ['monomial', 'status', 'redexes', 'normal_form']


class Command(WorkbenchCommand):
    help = 'Confluence of operad presentations by rewriting critical monomials'

    def add_subcommands(self, subparsers):
        check = subparsers.add_parser('check', help='Rewrite every critical monomial of a presentation')
        self.add_presentation_arguments(check)
        check.add_argument(
            '--strategy', action='append', choices=STRATEGIES, default=None,
            help='Rewriting strategy after the first step; repeat for several (default: all)',
        )
        check.add_argument('--format', choices=['json', 'csv'], default='json')
        self.add_common_arguments(check)

        rewrite = subparsers.add_parser('rewrite', help='Trace one monomial to its normal form')
        self.add_presentation_arguments(rewrite)
        rewrite.add_argument('--monomial', required=True, help='Tree monomial, e.g. "x1•((a1a2)a3)"')
        rewrite.add_argument('--redex', type=int, default=None, help='Index of the first redex to rewrite')
        rewrite.add_argument('--strategy', choices=STRATEGIES, default=LEFTMOST_INNERMOST)
        self.add_common_arguments(rewrite, workers=False)

    def add_presentation_arguments(self, parser):
        group = parser.add_mutually_exclusive_group(required=True)
        group.add_argument('--preset', choices=PRESETS)
        group.add_argument('--presentation', help='Presentation JSON file')
        parser.add_argument('--budget', type=int, default=None, help='Rewrite step budget per path')

    def presentation(self, options):
        if options.get('presentation'):
            return load_presentation(self.load_json(options['presentation']))
        return preset(options['preset'])

    def budget(self, options):
        return settings.WORKBENCH_REWRITE_BUDGET if options['budget'] is None else options['budget']

    def handle_check(self, strategy, **options):
        presentation = self.presentation(options)
        report = check_confluence(
            presentation,
            budget=self.budget(options),
            strategies=tuple(strategy or STRATEGIES),
            workers=self.workers(options),
        )
        strategies = list(strategy or STRATEGIES)
        payload = report.describe()
        payload['strategies'] = strategies
        payload['columns'] = TABLE_COLUMNS
        payload['rows'] = [table_row(presentation, result, strategies[0]) for result in report.results]
        return 'koszul', payload, report.passed

    def handle_rewrite(self, monomial, redex, strategy, **options):
        presentation = self.presentation(options)
        tree = presentation.parse(monomial)
        budget = self.budget(options)
        normalized, _ = presentation.normalize(tree)
        payload = {
            'presentation': presentation.name,
            'monomial': presentation.format(tree),
            'redexes': [found.describe(presentation) for found in redexes(presentation, normalized)],
            'budget': budget,
        }
        try:
            trace = rewrite_trace(presentation, tree, redex, strategy, budget)
        except RewriteBudgetExceeded as exc:
            payload.update({'status': 'INDETERMINATE', 'reason': str(exc)})
            return 'koszul-rewrite', payload, False
        payload.update(trace.describe(presentation))
        payload['status'] = 'PASS'
        return 'koszul-rewrite', payload, True


def table_row(presentation, result, strategy):
    forms = result.normal_forms(strategy)
    return {
        'monomial': presentation.format(result.monomial.tree),
        'status': result.status,
        'redexes': len(result.monomial.redexes),
        'normal_form': presentation.format_terms(forms[0].items()) if forms else '',
    }
