from __future__ import annotations

import logging
from dataclasses import dataclass, field

from django.core.exceptions import ValidationError

from reduction.af import AF, Semantics
from reduction.formula import (
    CNF,
    DNF,
    Body,
    Definition,
    Literal,
    Provenance,
    Qbf2,
    VarKey,
    VarKind,
    VarTable,
    clausify,
    complement,
)
from reduction.kexpr import ColorState, KExpr, annotate, validate

logger = logging.getLogger(__name__)


@dataclass
class Encoding:
    semantics: Semantics
    af: AF
    expression: KExpr
    state: ColorState
    table: VarTable
    cnf: CNF
    inner: CNF | None = None
    extension_vars: dict[str, int] = field(default_factory=dict)
    negate_answer: bool = False

    @property
    def second_level(self) -> bool:
        return self.inner is not None

    @property
    def provenance(self) -> list[Provenance]:
        result = list(self.cnf.provenance or [])
        if self.inner is not None:
            result += self.inner.provenance or []
        return result

    @property
    def formula(self) -> CNF | Qbf2:
        return self.qbf() if self.second_level else self.cnf

    def witness_cnf(self) -> CNF:
        """Outer clauses followed by the universal part's clauses."""
        clauses = list(self.cnf.clauses)
        if self.inner is not None:
            clauses += self.inner.clauses
        return CNF(self.table, clauses, self.provenance)

    def free_vars(self) -> tuple[int, ...]:
        used = set(self.extension_vars.values())
        for clause in self.cnf.clauses:
            used.update(abs(lit) for lit in clause)
        return tuple(sorted(used))

    def qbf(self) -> Qbf2:
        if self.inner is None:
            raise ValueError(f"{self.semantics} is encoded as a plain CNF.")
        free = self.free_vars()
        taken = set(free)
        inner_vars = tuple(var for var, _ in self.table if var not in taken)
        dnf = DNF(self.table, complement(self.inner.clauses), self.inner.provenance)
        return Qbf2(self.table, free, inner_vars, self.cnf, dnf)


class EncodingBuilder:
    """Collects definitions per expression node; ``finish`` clausifies them.

    Definitions go to the outer (existential) part until ``begin_inner`` is
    called; everything after that forms the universally checked part.
    """

    def __init__(self, af: AF, expression: KExpr, starred_arguments: bool = False) -> None:
        if af.self_attacking:
            raise ValidationError(
                f"Self-attacking arguments cannot be encoded: {', '.join(af.self_attacking)}."
            )
        validate(expression, af)
        self.af = af
        self.expression = expression
        self.state = annotate(expression)
        self.table = VarTable()
        self.outer: list[Definition] = []
        self.inner: list[Definition] | None = None
        self._target = self.outer
        for argument in af.arguments:
            self.table.id_of(VarKey(VarKind.EXT_ARG, label=argument))
        if starred_arguments:
            for argument in af.arguments:
                self.table.id_of(VarKey(VarKind.EXT_ARG, label=argument, starred=True))

    @property
    def cols(self) -> tuple[frozenset[int], ...]:
        return self.state.cols

    def lit(self, kind: VarKind, color: int, node: int, starred: bool = False) -> Literal:
        return Literal(VarKey(kind, color, node, starred=starred))

    def arg(self, argument: str, starred: bool = False) -> Literal:
        return Literal(VarKey(VarKind.EXT_ARG, label=argument, starred=starred))

    def define(self, node: int, tag: str, color: int | None, head: Literal, body: Body) -> None:
        self._target.append(Definition(head, body, node, tag, color))

    def require(self, node: int, tag: str, color: int | None, body: Body) -> None:
        self._target.append(Definition(None, body, node, tag, color))

    def begin_inner(self) -> None:
        self.inner = []
        self._target = self.inner

    def finish(self, semantics: Semantics) -> Encoding:
        cnf = clausify(self.outer, self.table)
        inner = clausify(self.inner, self.table) if self.inner is not None else None
        extension_vars = {
            a: self.table.get(VarKey(VarKind.EXT_ARG, label=a)) for a in self.af.arguments
        }
        encoding = Encoding(
            semantics=Semantics(semantics),
            af=self.af,
            expression=self.expression,
            state=self.state,
            table=self.table,
            cnf=cnf,
            inner=inner,
            extension_vars=extension_vars,
        )
        logger.info(
            "Encoded %s: %d variables, %d clauses%s",
            encoding.semantics.label,
            len(self.table),
            len(cnf.clauses),
            f" + {len(inner.clauses)} universal" if inner is not None else "",
        )
        return encoding
