from __future__ import annotations

from django.apps import AppConfig


class ReductionConfig(AppConfig):
    name = "reduction"
    verbose_name = "Clique-width guided reductions"

    def ready(self) -> None:  # type: ignore[override]
        from reduction import checks  # noqa: F401  registers the settings check
