from django.apps import AppConfig


class PolarbcConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'polarbc'
    verbose_name = 'Broadcast polar code simulator'
