from django.apps import AppConfig


class PolyvectorConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.polyvector'
    verbose_name = 'Polyvector fields'
