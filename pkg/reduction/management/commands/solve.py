from __future__ import annotations

from django.conf import settings

from reduction.formula import parse_dimacs
from reduction.management.base import ReductionCommand
from reduction.solver import external_solve, solve


class Command(ReductionCommand):
    help = "Decide a DIMACS CNF with the built-in DPLL or an external solver"

    def add_arguments(self, parser):
        parser.add_argument("cnf")
        parser.add_argument("--external", metavar="CMD", help="Solver command taking the file as last argument.")
        parser.add_argument("--model", action="store_true", help="Print the model as a v line.")

    def run(self, **options) -> None:
        cnf = parse_dimacs(self.read(options["cnf"]))
        command = options["external"] or settings.CWSAT_EXTERNAL_SOLVER
        if command:
            result = external_solve(options["cnf"], command, cnf.table)
        else:
            result = solve(cnf)
        self.stdout.write("SAT" if result.sat else "UNSAT")
        if result.sat and options["model"]:
            literals = [var if value else -var for var, value in sorted(result.model.items())]
            self.stdout.write(" ".join(["v", *map(str, literals), "0"]))
