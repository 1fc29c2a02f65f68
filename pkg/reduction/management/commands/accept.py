from __future__ import annotations

from django.core.management.base import CommandError

from reduction.af import AcceptanceMode
from reduction.management.base import ReductionCommand
from reduction.solver import decide


class Command(ReductionCommand):
    help = "Decide credulous or skeptical acceptance through the encoding"

    def add_arguments(self, parser):
        self.add_semantics_argument(parser)
        parser.add_argument("--arg", required=True, dest="argument")
        parser.add_argument("--mode", required=True, choices=AcceptanceMode.values)
        parser.add_argument("af")
        self.add_expression_argument(parser)

    def run(self, **options) -> None:
        af = self.load_af(options["af"])
        expression = self.load_expression_or_trivial(af, options["expression"])
        accepted = decide(af, expression, options["sem"], options["argument"], options["mode"])
        self.stdout.write("YES" if accepted else "NO")
        if not accepted:
            raise CommandError(f"{options['argument']} is not accepted.", returncode=1)
