from django.apps import AppConfig


class MraConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'mra'
    verbose_name = 'Multireference alignment'
