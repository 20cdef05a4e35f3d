from django.apps import AppConfig


class RewritingConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.rewriting'
    verbose_name = 'Rewriting'
