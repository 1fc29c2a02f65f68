from __future__ import annotations

from reduction.encoders import encode
from reduction.exceptions import WitnessDriftError
from reduction.management.base import ReductionCommand
from reduction.witness import build_witness, verify_witness, write_witness


class Command(ReductionCommand):
    help = "Build and verify a witness expression for an encoding's incidence graph"

    def add_arguments(self, parser):
        self.add_semantics_argument(parser)
        parser.add_argument("af")
        self.add_expression_argument(parser)
        parser.add_argument("-o", "--output", help="Write the witness expression here.")

    def run(self, **options) -> None:
        af = self.load_af(options["af"])
        expression = self.load_expression_or_trivial(af, options["expression"])
        enc = encode(af, expression, options["sem"])
        witness = build_witness(enc)
        report = verify_witness(witness, enc)
        if not report.ok:
            for line in report.summary()[:20]:
                self.stderr.write(line)
            raise WitnessDriftError("verification failed")
        if options["output"]:
            self.emit(write_witness(witness), options["output"])
        else:
            self.stdout.write(write_witness(witness), ending="")
        self.stdout.write(f"colors_used={witness.colors_used} budget={witness.budget} ok")
