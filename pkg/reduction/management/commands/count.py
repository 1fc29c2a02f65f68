from __future__ import annotations

from reduction.management.base import ReductionCommand
from reduction.solver import count


class Command(ReductionCommand):
    help = "Count extensions through the encoding"

    def add_arguments(self, parser):
        self.add_semantics_argument(parser)
        parser.add_argument("af")
        self.add_expression_argument(parser)

    def run(self, **options) -> None:
        af = self.load_af(options["af"])
        expression = self.load_expression_or_trivial(af, options["expression"])
        self.stdout.write(str(count(af, expression, options["sem"])))
