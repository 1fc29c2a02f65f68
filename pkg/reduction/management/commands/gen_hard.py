from __future__ import annotations

from reduction.af import to_apx
from reduction.hardness import parse_threecnf, threesat_to_af
from reduction.management.base import ReductionCommand


class Command(ReductionCommand):
    help = "Reduce a 3-CNF to a framework whose argument sat is credulously admissible iff it is satisfiable"

    def add_arguments(self, parser):
        parser.add_argument("cnf")
        parser.add_argument("-o", "--output", help="APX file; stdout when omitted.")

    def run(self, **options) -> None:
        af, _ = threesat_to_af(parse_threecnf(self.read(options["cnf"])))
        self.emit(to_apx(af), options["output"])
        if options["output"]:
            self.stdout.write(f"{af.n} arguments, {len(af.attacks)} attacks")
