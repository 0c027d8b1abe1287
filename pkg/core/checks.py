# core/checks.py
from django.core.checks import Error, register

from .conf import sandwichlab_setting

_CAPS = ("EXHAUSTIVE_CAP", "SUBSET_CAP", "CHAR2_CAP", "SUBSPACE_CAP", "WITNESS_ATTEMPTS", "MAX_CLASS")


def _positive(name: str) -> bool:
    value = sandwichlab_setting(name)
    return isinstance(value, int) and not isinstance(value, bool) and value > 0


@register()
def sandwichlab_settings_check(app_configs, **kwargs):
    errors = []
    if not _positive("FUEL"):
        errors.append(Error(
            "SANDWICHLAB['FUEL'] must be a positive integer.",
            hint="Check SANDWICHLAB_FUEL in the environment or .env.",
            id="core.E001",
        ))
    if not (_positive("SAMPLES") and _positive("MAX_WORD_LENGTH")):
        errors.append(Error(
            "SANDWICHLAB['SAMPLES'] and SANDWICHLAB['MAX_WORD_LENGTH'] must be positive integers.",
            id="core.E002",
        ))
    for name in _CAPS:
        if not _positive(name):
            errors.append(Error(f"SANDWICHLAB['{name}'] must be a positive integer.", id="core.E003"))
    return errors
