"""Desk-scale decision procedures over the emitted formulas.

``solve`` is a plain DPLL with two watched literals and chronological
backtracking. Branching takes the lowest unassigned variable and tries true
first; the encoders number the extension variables first, so unit
propagation settles every auxiliary once those are decided.
"""
from __future__ import annotations

import logging
import shlex
import subprocess
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from django.conf import settings
from django.db import models

from reduction.af import AF, AcceptanceMode, Semantics
from reduction.encoders import Encoding, assert_acceptance, encode
from reduction.exceptions import ExternalSolverError, ResourceLimitExceeded
from reduction.formula import CNF, Qbf2, Quantifier, VarTable, complement, normalize
from reduction.kexpr import KExpr

logger = logging.getLogger(__name__)

Model = dict[int, bool]


class SolveStatus(models.TextChoices):
    SAT = "sat", "satisfiable"
    UNSAT = "unsat", "unsatisfiable"


@dataclass
class SolveStats:
    decisions: int = 0
    propagations: int = 0
    conflicts: int = 0


@dataclass
class SolveResult:
    status: SolveStatus
    model: Model | None = None
    stats: SolveStats = field(default_factory=SolveStats)

    @property
    def sat(self) -> bool:
        return self.status == SolveStatus.SAT


class _Dpll:
    def __init__(self, num_vars: int, clauses: Sequence[tuple[int, ...]], budget: int) -> None:
        self.num_vars = num_vars
        self.budget = budget
        self.value = [0] * (num_vars + 1)
        self.trail: list[int] = []
        self.head = 0
        self.decisions: list[tuple[int, int, bool]] = []
        self.watches: dict[int, list[int]] = defaultdict(list)
        self.clauses: list[list[int]] = []
        self.units: list[int] = []
        self.empty = False
        self.stats = SolveStats()
        for raw in clauses:
            clause = normalize(raw)
            if clause is None:
                continue
            if not clause:
                self.empty = True
            elif len(clause) == 1:
                self.units.append(clause[0])
            else:
                index = len(self.clauses)
                self.clauses.append(list(clause))
                self.watches[clause[0]].append(index)
                self.watches[clause[1]].append(index)

    def _lit_value(self, lit: int) -> int:
        value = self.value[abs(lit)]
        return value if lit > 0 else -value

    def _assign(self, lit: int) -> None:
        self.value[abs(lit)] = 1 if lit > 0 else -1
        self.trail.append(lit)

    def _propagate(self) -> bool:
        while self.head < len(self.trail):
            false_lit = -self.trail[self.head]
            self.head += 1
            watching = self.watches[false_lit]
            kept: list[int] = []
            for position, index in enumerate(watching):
                clause = self.clauses[index]
                if clause[0] == false_lit:
                    clause[0], clause[1] = clause[1], clause[0]
                if self._lit_value(clause[0]) == 1:
                    kept.append(index)
                    continue
                for k in range(2, len(clause)):
                    if self._lit_value(clause[k]) != -1:
                        clause[1], clause[k] = clause[k], clause[1]
                        self.watches[clause[1]].append(index)
                        break
                else:
                    kept.append(index)
                    if self._lit_value(clause[0]) == -1:
                        kept.extend(watching[position + 1:])
                        self.watches[false_lit] = kept
                        return False
                    self.stats.propagations += 1
                    self._assign(clause[0])
            self.watches[false_lit] = kept
        return True

    def _backtrack(self) -> bool:
        """Undo to the latest unflipped decision and flip it."""
        while self.decisions:
            start, lit, flipped = self.decisions.pop()
            for undone in self.trail[start:]:
                self.value[abs(undone)] = 0
            del self.trail[start:]
            self.head = start
            if not flipped:
                self.decisions.append((start, -lit, True))
                self._assign(-lit)
                return True
        return False

    def run(self) -> SolveResult:
        if self.empty:
            return SolveResult(SolveStatus.UNSAT, stats=self.stats)
        for lit in self.units:
            current = self._lit_value(lit)
            if current == -1:
                return SolveResult(SolveStatus.UNSAT, stats=self.stats)
            if current == 0:
                self._assign(lit)
        cursor = 1
        while True:
            if not self._propagate():
                self.stats.conflicts += 1
                if self.stats.conflicts > self.budget:
                    raise ResourceLimitExceeded("conflicts", self.budget)
                if not self._backtrack():
                    return SolveResult(SolveStatus.UNSAT, stats=self.stats)
                cursor = 1
                continue
            while cursor <= self.num_vars and self.value[cursor]:
                cursor += 1
            if cursor > self.num_vars:
                model = {var: self.value[var] == 1 for var in range(1, self.num_vars + 1)}
                return SolveResult(SolveStatus.SAT, model, self.stats)
            self.stats.decisions += 1
            self.decisions.append((len(self.trail), cursor, False))
            self._assign(cursor)


def solve(cnf: CNF, assumptions: Sequence[int] = (), budget: int | None = None) -> SolveResult:
    budget = budget if budget is not None else settings.CWSAT_CONFLICT_BUDGET
    clauses = [*cnf.clauses, *((lit,) for lit in assumptions)]
    result = _Dpll(cnf.num_vars, clauses, budget).run()
    logger.debug(
        "Solved %d clauses: %s after %d decisions, %d conflicts",
        len(clauses),
        result.status,
        result.stats.decisions,
        result.stats.conflicts,
    )
    return result


sat = solve


def iter_models(cnf: CNF, project: Sequence[int]) -> Iterator[tuple[Model, Model]]:
    """Distinct projections of the model set, each with one full model.

    Blocking clauses only mention ``project``, so every projection is
    reported once however many models extend it.
    """
    project = sorted(set(project))
    limit = settings.CWSAT_PROJECTION_LIMIT
    if len(project) > limit:
        raise ResourceLimitExceeded("projection", limit)
    blocking: list[tuple[int, ...]] = []
    while True:
        result = solve(CNF(cnf.table, [*cnf.clauses, *blocking]))
        if not result.sat:
            return
        projection = {var: result.model[var] for var in project}
        yield projection, result.model
        if not project:
            return
        blocking.append(tuple(-var if value else var for var, value in projection.items()))


def enumerate_models(cnf: CNF, project: Sequence[int]) -> list[Model]:
    """Projections sorted by their bits over ``project`` in ascending order."""
    project = sorted(set(project))
    models_found = [projection for projection, _ in iter_models(cnf, project)]
    return sorted(models_found, key=lambda m: sum(1 << i for i, var in enumerate(project) if m[var]))


def check_2qbf(q: Qbf2, candidate: Model) -> bool:
    """Whether the universal block holds once the free block is fixed."""
    if Quantifier(q.quantifier) != Quantifier.FORALL:
        raise ValueError("Only universal inner blocks are checked.")
    for clause in q.cnf.clauses:
        # A universally quantified literal can always be falsified.
        if not any(abs(lit) in candidate and candidate[abs(lit)] == (lit > 0) for lit in clause):
            return False
    if not q.dnf.cubes:
        return False
    units = [var if candidate[var] else -var for var in q.free if var in candidate]
    result = solve(CNF(q.table, complement(q.dnf.cubes)), assumptions=units)
    return not result.sat


def _extension_candidates(enc: Encoding) -> Iterator[Model]:
    project = sorted(enc.extension_vars.values())
    if not enc.second_level:
        for projection, _ in iter_models(enc.cnf, project):
            yield projection
        return
    q = enc.qbf()
    for projection, model in iter_models(enc.cnf, project):
        if check_2qbf(q, {var: model[var] for var in q.free}):
            yield projection
        else:
            logger.debug("Candidate %s is not maximal", sorted(v for v, on in projection.items() if on))


def count_extensions(enc: Encoding) -> int:
    total = sum(1 for _ in _extension_candidates(enc))
    logger.info("Counted %d %s extensions", total, enc.semantics.label)
    return total


def extensions_of(enc: Encoding) -> list[frozenset[str]]:
    names = {var: argument for argument, var in enc.extension_vars.items()}
    return [
        frozenset(names[var] for var, on in projection.items() if on)
        for projection in _extension_candidates(enc)
    ]


def decide(af: AF, x: KExpr, sigma: Semantics, argument: str, mode: AcceptanceMode) -> bool:
    sigma, mode = Semantics(sigma), AcceptanceMode(mode)
    if sigma == Semantics.PREFERRED and mode == AcceptanceMode.CREDULOUS:
        logger.debug("Credulous preferred acceptance is decided on the admissible encoding")
        sigma = Semantics.ADMISSIBLE
    enc = assert_acceptance(encode(af, x, sigma), argument, mode)
    found = next(_extension_candidates(enc), None) is not None
    return not found if enc.negate_answer else found


def count(af: AF, x: KExpr, sigma: Semantics) -> int:
    return count_extensions(encode(af, x, sigma))


def external_solve(cnf_path, solver_command: str, table: VarTable | None = None) -> SolveResult:
    """Run a DIMACS solver that exits 10/20 and prints ``v`` lines."""
    command = [*shlex.split(solver_command), str(cnf_path)]
    try:
        completed = subprocess.run(command, capture_output=True, text=True, check=False)
    except OSError as exc:
        raise ExternalSolverError(f"Could not start {command[0]!r}: {exc}") from exc
    if completed.returncode == 20:
        return SolveResult(SolveStatus.UNSAT)
    if completed.returncode != 10:
        raise ExternalSolverError(f"{command[0]!r} exited with {completed.returncode}.")
    model: Model = {}
    for line in completed.stdout.splitlines():
        tokens = line.split()
        if not tokens or tokens[0] != "v":
            continue
        for token in tokens[1:]:
            try:
                lit = int(token)
            except ValueError as exc:
                raise ExternalSolverError(f"Unparseable model literal {token!r}.") from exc
            if lit:
                model[abs(lit)] = lit > 0
    if table is not None:
        for var in range(1, len(table) + 1):
            model.setdefault(var, False)
    return SolveResult(SolveStatus.SAT, model)
