from django.apps import AppConfig


class DufloConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.duflo'
    verbose_name = 'Star products'
