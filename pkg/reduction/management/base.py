from __future__ import annotations

from pathlib import Path

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError, SystemCheckError

from reduction.af import AF, Semantics, read_af
from reduction.exceptions import ExternalSolverError, ResourceLimitExceeded, WitnessDriftError
from reduction.kexpr import KExpr, parse_kexpr, trivial_expression

INPUT_ERROR = 3
RESOURCE_ERROR = 4
DRIFT_ERROR = 5


def _messages(exc: ValidationError) -> str:
    return "; ".join(exc.messages)


class ReductionCommand(BaseCommand):
    """Reads the shared inputs and maps pipeline errors to exit codes."""

    def add_semantics_argument(self, parser) -> None:
        parser.add_argument("--sem", required=True, choices=Semantics.values, help="Semantics to encode.")

    def add_expression_argument(self, parser) -> None:
        parser.add_argument(
            "expression",
            nargs="?",
            help="k-expression file; the trivial expression of the framework when omitted.",
        )

    def check(self, *args, **kwargs) -> None:
        try:
            super().check(*args, **kwargs)
        except SystemCheckError as exc:
            raise CommandError(str(exc), returncode=INPUT_ERROR) from exc

    def handle(self, *args, **options):  # type: ignore[override]
        try:
            self.run(**options)
        except ValidationError as exc:
            raise CommandError(_messages(exc), returncode=INPUT_ERROR) from exc
        except ExternalSolverError as exc:
            raise CommandError(str(exc), returncode=INPUT_ERROR) from exc
        except ResourceLimitExceeded as exc:
            raise CommandError(str(exc), returncode=RESOURCE_ERROR) from exc
        except WitnessDriftError as exc:
            raise CommandError(f"witness drift: {exc}", returncode=DRIFT_ERROR) from exc

    def run(self, **options) -> None:
        raise NotImplementedError

    def read(self, path: str) -> bytes:
        try:
            return Path(path).read_bytes()
        except OSError as exc:
            raise ValidationError(f"Cannot read {path}: {exc.strerror}.") from exc

    def load_af(self, path: str) -> AF:
        return read_af(path, self.read(path))

    def load_expression(self, path: str) -> KExpr:
        return parse_kexpr(self.read(path))

    def load_expression_or_trivial(self, af: AF, path: str | None) -> KExpr:
        if path:
            return self.load_expression(path)
        expression = trivial_expression(af)
        self.stderr.write(f"No expression given; using the trivial expression of width {expression.width}.")
        return expression

    def emit(self, text: str, output: str | None) -> None:
        if output is None:
            self.stdout.write(text, ending="")
            return
        try:
            Path(output).write_text(text)
        except OSError as exc:
            raise ValidationError(f"Cannot write {output}: {exc.strerror}.") from exc
