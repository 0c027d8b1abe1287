# core/conf.py
from typing import Any

from django.conf import settings

# значения по умолчанию, если в settings.SANDWICHLAB чего-то нет
DEFAULTS: dict[str, Any] = {
    "TOOL_VERSION": "1.0.0",
    "FUEL": 10 ** 7,
    "SEED": 0xE9E1,
    "SAMPLES": 1000,
    "MAX_WORD_LENGTH": 12,
    "MAX_CLASS": 16,
    "EXHAUSTIVE_CAP": 2 ** 14,
    "SUBSET_CAP": 6,
    "CHAR2_CAP": 64,
    "SUBSPACE_CAP": 2 ** 12,
    "WITNESS_ATTEMPTS": 10 ** 5,
}


def sandwichlab_setting(name: str) -> Any:
    """Значение из settings.SANDWICHLAB с фолбэком на DEFAULTS."""
    if name not in DEFAULTS:
        raise KeyError(f"unknown SandwichLab setting: {name}")
    configured = getattr(settings, "SANDWICHLAB", None) or {}
    return configured.get(name, DEFAULTS[name])
