from django.apps import AppConfig


class HochschildConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.hochschild'
    verbose_name = 'Hochschild cochains'
