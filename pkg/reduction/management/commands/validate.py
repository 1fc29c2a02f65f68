from __future__ import annotations

from django.core.exceptions import ValidationError

from reduction.kexpr import diagnose
from reduction.management.base import ReductionCommand


class Command(ReductionCommand):
    help = "Check that a k-expression builds exactly the attack graph of a framework"

    def add_arguments(self, parser):
        parser.add_argument("af")
        self.add_expression_argument(parser)

    def run(self, **options) -> None:
        af = self.load_af(options["af"])
        expression = self.load_expression_or_trivial(af, options["expression"])
        diagnostics = diagnose(expression, af)
        if diagnostics:
            for line in diagnostics:
                self.stderr.write(line)
            raise ValidationError(f"Expression does not match the framework ({len(diagnostics)} problems).")
        self.stdout.write(self.style.SUCCESS(f"ok width={expression.width} nodes={len(expression)}"))
