import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "SandwichLab.settings")
django.setup()
