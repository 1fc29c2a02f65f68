from __future__ import annotations

from django.core.exceptions import ValidationError

from reduction.encoders import encode, to_dnf_matrix
from reduction.formula import DNF, Qbf2, write_dimacs, write_provenance, write_qbf
from reduction.kexpr import search_expression
from reduction.management.base import ReductionCommand
from reduction.witness import build_witness


class Command(ReductionCommand):
    help = "Encode the extensions of a framework as CNF or 2QBF"

    def add_arguments(self, parser):
        self.add_semantics_argument(parser)
        parser.add_argument("af")
        self.add_expression_argument(parser)
        parser.add_argument("-o", "--output", help="Formula file; stdout when omitted.")
        parser.add_argument("--provenance", help="Write clause index, node and equation tag here.")
        parser.add_argument(
            "--dnf-matrix",
            action="store_true",
            help="Fold the CNF part into the universal DNF part.",
        )
        parser.add_argument(
            "--expr-search",
            type=int,
            metavar="K",
            help="Search an expression of width at most K instead of reading one.",
        )

    def run(self, **options) -> None:
        af = self.load_af(options["af"])
        if options["expr_search"] is not None:
            expression = search_expression(af, options["expr_search"])
            if expression is None:
                raise ValidationError(f"No expression of width at most {options['expr_search']} found.")
        else:
            expression = self.load_expression_or_trivial(af, options["expression"])
        enc = encode(af, expression, options["sem"])
        if options["dnf_matrix"]:
            outer = build_witness(enc, outer_only=True)
            if enc.second_level:
                q = enc.qbf()
            else:
                free = tuple(var for var, _ in enc.table)
                q = Qbf2(enc.table, free, (), enc.cnf, DNF(enc.table, [()]))
            text = write_qbf(to_dnf_matrix(q, outer.expression))
        elif enc.second_level:
            text = write_qbf(enc.qbf())
        else:
            text = write_dimacs(enc.cnf)
        self.emit(text, options["output"])
        if options["provenance"]:
            self.emit(write_provenance(enc.provenance), options["provenance"])
        if options["output"]:
            self.stdout.write(
                f"{enc.semantics.label}: {len(enc.table)} variables, {len(enc.cnf.clauses)} clauses"
                + (f", {len(enc.inner.clauses)} universal" if enc.second_level else "")
            )
