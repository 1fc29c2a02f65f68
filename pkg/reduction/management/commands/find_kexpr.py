from __future__ import annotations

from django.core.management.base import CommandError

from reduction.kexpr import search_expression
from reduction.management.base import ReductionCommand


class Command(ReductionCommand):
    help = "Search a k-expression of bounded width for a framework"

    def add_arguments(self, parser):
        parser.add_argument("af")
        parser.add_argument("--kmax", type=int, required=True)
        parser.add_argument("--budget", type=int, help="Search step limit; CWSAT_SEARCH_BUDGET by default.")
        parser.add_argument("-o", "--output", help="Expression file; stdout when omitted.")

    def run(self, **options) -> None:
        af = self.load_af(options["af"])
        expression = search_expression(af, options["kmax"], options["budget"])
        if expression is None:
            raise CommandError(f"No expression of width at most {options['kmax']}.", returncode=1)
        self.emit(f"{expression}\n", options["output"])
        if options["output"]:
            self.stdout.write(f"width={expression.width}")
