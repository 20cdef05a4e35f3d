from django.conf import settings
from django.core.management.base import BaseCommand
from django.db import connection
import os
import sys
import platform

import networkx
import numpy


class Command(BaseCommand):
    help = 'Display workbench configuration for troubleshooting'

    def add_arguments(self, parser):
        parser.add_argument(
            '--verbose',
            action='store_true',
            help='Show detailed information',
        )

    def handle(self, *args, **options):
        self.stdout.write(self.style.SUCCESS('Formality workbench information'))
        self.stdout.write('=' * 60)

        self._show_environment_info()
        self._show_workbench_settings()
        self._show_database_info()

        if options['verbose']:
            self._show_local_apps()

    def _show_environment_info(self):
        self.stdout.write(self.style.WARNING('\nEnvironment:'))
        self.stdout.write(f"Python Version: {sys.version.split()[0]}")
        self.stdout.write(f"Platform: {platform.platform()}")
        self.stdout.write(f"numpy: {numpy.__version__}")
        self.stdout.write(f"networkx: {networkx.__version__}")
        self.stdout.write(f"Settings Module: {settings.SETTINGS_MODULE}")

        for var in ('DJANGO_SETTINGS_MODULE', 'DATABASE_URL', 'WORKBENCH_CACHE_DIR'):
            value = os.environ.get(var, 'Not set')
            self.stdout.write(f"  {var}: {value}")

    def _show_workbench_settings(self):
        self.stdout.write(self.style.WARNING('\nWorkbench settings:'))
        for name in sorted(dir(settings)):
            if name.startswith('WORKBENCH_'):
                self.stdout.write(f"  {name}: {getattr(settings, name)}")

    def _show_database_info(self):
        self.stdout.write(self.style.WARNING('\nWeight cache database:'))
        db_config = settings.DATABASES['default']
        self.stdout.write(f"Engine: {db_config['ENGINE']}")
        self.stdout.write(f"Name: {db_config['NAME']}")

        try:
            with connection.cursor() as cursor:
                cursor.execute("SELECT 1")
            self.stdout.write(self.style.SUCCESS("Database Connection: OK"))
        except Exception as e:
            self.stdout.write(self.style.ERROR("Database Connection: FAILED"))
            self.stdout.write(f"  Error: {str(e)}")

    def _show_local_apps(self):
        self.stdout.write(self.style.WARNING('\nLocal apps:'))
        for app in settings.INSTALLED_APPS:
            if app.startswith('apps.'):
                self.stdout.write(f"  {app}")
