from django.apps import AppConfig


class HomotopyConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.homotopy'
    verbose_name = 'Homotopy relations'
