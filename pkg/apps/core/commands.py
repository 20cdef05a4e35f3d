"""
Shared plumbing for the workbench management commands.

Every command echoes its report to stdout and optionally writes it to
``--output``. Failed checks exit with status 1, invalid inputs with 2.
"""
import json
import logging
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from .exceptions import WorkbenchError
from .reports import render_csv, render_report, write_report

logger = logging.getLogger(__name__)

CHECK_FAILED = 1
USAGE_ERROR = 2


class WorkbenchCommand(BaseCommand):
    """
    Base class for commands with subcommands.

    Subclasses register subparsers in ``add_subcommands`` and implement
    ``handle_<name>`` for each, returning ``(kind, payload, passed)``.
    """

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='action', required=True)
        self.add_subcommands(subparsers)

    def add_subcommands(self, subparsers):
        raise NotImplementedError

    def add_common_arguments(self, parser, workers=True):
        parser.add_argument('--output', help='Also write the report to this path')
        if workers:
            parser.add_argument(
                '--workers',
                type=int,
                default=None,
                help='Worker count recorded in the report',
            )

    def handle(self, *args, **options):
        action = options['action']
        handler = getattr(self, f"handle_{action.replace('-', '_')}")
        try:
            kind, payload, passed = handler(**options)
        except (WorkbenchError, ValidationError) as exc:
            logger.warning("%s %s rejected: %s", self.__module__.rsplit('.', 1)[-1], action, exc)
            raise CommandError(str(exc), returncode=USAGE_ERROR) from exc
        except OSError as exc:
            raise CommandError(f"cannot read or write a file: {exc}", returncode=USAGE_ERROR) from exc

        payload.setdefault('workers', self.workers(options))
        if options.get('format') == 'csv':
            data = render_csv(payload['rows'], payload['columns'])
        else:
            data = render_report(kind, payload)
        write_report(data, options.get('output'))
        self.stdout.write(data.decode('utf-8'), ending='')

        if not passed:
            raise CommandError(f"{kind} check failed", returncode=CHECK_FAILED)
        self.stderr.write(self.style.SUCCESS(f"{kind}: ok"))

    def workers(self, options):
        workers = options.get('workers')
        if workers is None:
            return settings.WORKBENCH_WORKERS
        if workers < 1:
            raise CommandError('--workers must be at least 1', returncode=USAGE_ERROR)
        return workers

    def load_json(self, path):
        try:
            return json.loads(Path(path).read_text(encoding='utf-8'))
        except (OSError, json.JSONDecodeError) as exc:
            raise CommandError(f"cannot read {path}: {exc}", returncode=USAGE_ERROR) from exc
