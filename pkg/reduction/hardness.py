"""Instance generators: the 3-CNF to AF reduction and random families.

Randomness goes through Faker's seeded instance so generated instances are
byte-stable across runs.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

from django.core.exceptions import ValidationError
from faker import Faker

from reduction.af import AF
from reduction.formula import parse_dimacs
from reduction.kexpr import EdgeIntro, Initial, KExpr, Relabel, Term, Union

logger = logging.getLogger(__name__)

SAT_ARGUMENT = "sat"


@dataclass(frozen=True)
class ThreeCnf:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        for index, clause in enumerate(self.clauses):
            if not clause:
                raise ValidationError(f"Clause {index + 1} is empty.")
            if len(set(clause)) > 3:
                raise ValidationError(f"Clause {index + 1} has more than three literals.")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValidationError(f"Literal {lit} in clause {index + 1} is undeclared.")

    def satisfiable(self) -> bool:
        """Truth-table check; meant for the small instances generated here."""
        for bits in itertools.product((False, True), repeat=self.num_vars):
            if all(any(bits[abs(lit) - 1] == (lit > 0) for lit in clause) for clause in self.clauses):
                return True
        return False


def parse_threecnf(text: bytes | str) -> ThreeCnf:
    cnf = parse_dimacs(text)
    return ThreeCnf(cnf.num_vars, tuple(tuple(clause) for clause in cnf.clauses))


def _literal_argument(lit: int) -> str:
    return f"x{lit}" if lit > 0 else f"nx{-lit}"


def threesat_to_af(phi: ThreeCnf) -> tuple[AF, str]:
    """Credulous admissible acceptance of ``sat`` iff phi is satisfiable."""
    arguments: list[str] = []
    attacks: list[tuple[str, str]] = []
    for var in range(1, phi.num_vars + 1):
        arguments += [f"x{var}", f"nx{var}"]
        attacks += [(f"x{var}", f"nx{var}"), (f"nx{var}", f"x{var}")]
    for index, clause in enumerate(phi.clauses, start=1):
        arguments.append(f"c{index}")
        attacks.append((f"c{index}", SAT_ARGUMENT))
        for lit in sorted(set(clause), key=lambda l: (abs(l), l)):
            attacks.append((_literal_argument(lit), f"c{index}"))
    arguments.append(SAT_ARGUMENT)
    af = AF.from_names(arguments, attacks)
    logger.info("Reduced a 3-CNF with %d clauses to %d arguments", len(phi.clauses), af.n)
    return af, SAT_ARGUMENT


def random_threecnf(num_vars: int, num_clauses: int, seed: int) -> ThreeCnf:
    if num_vars < 1:
        raise ValidationError("A 3-CNF needs at least one variable.")
    fake = Faker()
    fake.seed_instance(seed)
    width = min(3, num_vars)
    clauses = []
    for _ in range(num_clauses):
        chosen = fake.random_sample(elements=tuple(range(1, num_vars + 1)), length=width)
        clauses.append(tuple(var if fake.pybool() else -var for var in sorted(chosen)))
    return ThreeCnf(num_vars, tuple(clauses))


def random_af(n: int, density: float, seed: int) -> AF:
    """Random framework without self-attacks; each ordered pair is an attack
    with probability ``density``."""
    fake = Faker()
    fake.seed_instance(seed)
    arguments = [f"a{i}" for i in range(n)]
    attacks = [
        (arguments[s], arguments[t])
        for s in range(n)
        for t in range(n)
        if s != t and fake.random.random() < density
    ]
    return AF.from_names(arguments, attacks)


def tournament_family(n: int) -> tuple[AF, KExpr]:
    """Tournament on n arguments with a width-2 expression.

    Each new argument is created with color 2, attacks (or is attacked by)
    every earlier one depending on parity, then joins color 1.
    """
    if n < 1:
        raise ValidationError("A tournament needs at least one argument.")
    arguments = [f"a{i}" for i in range(n)]
    attacks = []
    term: Term = Initial(1, arguments[0])
    for i in range(1, n):
        joined: Term = Union((term, Initial(2, arguments[i])))
        if i % 2:
            joined = EdgeIntro(1, 2, joined)
            attacks += [(arguments[j], arguments[i]) for j in range(i)]
        else:
            joined = EdgeIntro(2, 1, joined)
            attacks += [(arguments[i], arguments[j]) for j in range(i)]
        term = Relabel(2, 1, joined)
    return AF.from_names(arguments, attacks), KExpr.from_term(term)
