from __future__ import annotations

from django.conf import settings
from django.core.checks import Error, register

LIMITS = (
    ("CWSAT_ORACLE_LIMIT", "reduction.E001"),
    ("CWSAT_CONFLICT_BUDGET", "reduction.E002"),
    ("CWSAT_PROJECTION_LIMIT", "reduction.E003"),
    ("CWSAT_SEARCH_BUDGET", "reduction.E004"),
)


@register()
def check_limits(app_configs, **kwargs):
    errors = []
    for name, code in LIMITS:
        value = getattr(settings, name, None)
        if not isinstance(value, int) or value <= 0:
            errors.append(
                Error(f"{name} must be a positive integer, got {value!r}.", id=code)
            )
    return errors
