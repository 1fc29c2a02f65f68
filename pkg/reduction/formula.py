"""Propositional intermediate representation.

Encoders describe their output as definitions ``head <-> body`` whose bodies
are conjunctions or disjunctions of literals, at most two levels deep.
``clausify`` expands them into clauses without introducing variables, which
keeps the clause shape the witness construction relies on.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Union as TypingUnion

import networkx as nx
from django.core.exceptions import ValidationError
from django.db import models

logger = logging.getLogger(__name__)


class VarKind(models.TextChoices):
    EXT_ARG = "ext", "argument in extension"
    EXT = "e", "color in extension"
    DEFEAT = "d", "color defeated"
    ATTACK = "a", "color attacks extension"
    OUT = "o", "color left out"
    DEFEAT_GE = "dge", "color defeated from above"
    SUBSET = "s", "strictly larger candidate"
    RANGE_LOSS = "l", "range lost"
    SAT = "sat", "clauses satisfied"
    TRUE = "t", "some variable true"
    FALSE = "f", "some variable false"
    INPUT = "v", "input variable"


class Quantifier(models.TextChoices):
    FORALL = "forall", "universal"
    EXISTS = "exists", "existential"


@dataclass(frozen=True)
class VarKey:
    kind: VarKind
    color: int | None = None
    node: int | None = None
    label: str | None = None
    starred: bool = False

    def __str__(self) -> str:
        star = "*" if self.starred else ""
        if self.kind == VarKind.EXT_ARG:
            return f"e{star}_{self.label}"
        if self.kind == VarKind.INPUT:
            return str(self.label)
        return f"{VarKind(self.kind).value}{star}_{self.color}^{self.node}"


@dataclass(frozen=True)
class Literal:
    key: VarKey
    positive: bool = True

    def __invert__(self) -> Literal:
        return Literal(self.key, not self.positive)


@dataclass(frozen=True)
class Or:
    items: tuple = ()

    @classmethod
    def of(cls, *items) -> Or:
        return cls(tuple(items))


@dataclass(frozen=True)
class And:
    items: tuple = ()

    @classmethod
    def of(cls, *items) -> And:
        return cls(tuple(items))


Body = TypingUnion[Literal, Or, And]


@dataclass(frozen=True)
class Provenance:
    node: int
    tag: str


@dataclass(frozen=True)
class Definition:
    """``head <-> body``, or the assertion ``body`` when head is None."""

    head: Literal | None
    body: Body
    node: int
    tag: str
    color: int | None = None


TAG_ORDER = (
    [str(number) for number in range(1, 38)]
    + ["dnf-leaf", "dnf-union", "dnf-relabel", "dnf-edge", "dnf-root", "acc"]
)


def tag_rank(tag: str) -> tuple[int, int]:
    """Position of a tag, then 0 plain / 1 starred copy / 2 range-loss variant."""
    variant = 0
    base = tag
    if base.endswith("*"):
        base, variant = base[:-1], 1
    elif base.endswith("l") and base[:-1].isdigit():
        base, variant = base[:-1], 2
    return TAG_ORDER.index(base), variant


class VarTable:
    """Dense DIMACS ids, assigned on first use."""

    def __init__(self) -> None:
        self._ids: dict[VarKey, int] = {}
        self._keys: list[VarKey] = []

    def id_of(self, key: VarKey) -> int:
        var = self._ids.get(key)
        if var is None:
            self._keys.append(key)
            var = self._ids[key] = len(self._keys)
        return var

    def get(self, key: VarKey) -> int | None:
        return self._ids.get(key)

    def key_of(self, var: int) -> VarKey:
        return self._keys[var - 1]

    def name(self, var: int) -> str:
        return str(self._keys[var - 1])

    def copy(self) -> VarTable:
        clone = VarTable()
        clone._ids = dict(self._ids)
        clone._keys = list(self._keys)
        return clone

    def __len__(self) -> int:
        return len(self._keys)

    def __contains__(self, key: VarKey) -> bool:
        return key in self._ids

    def __iter__(self):
        return iter(enumerate(self._keys, start=1))


@dataclass
class CNF:
    table: VarTable
    clauses: list[tuple[int, ...]] = field(default_factory=list)
    provenance: list[Provenance] | None = None

    @property
    def num_vars(self) -> int:
        return len(self.table)


@dataclass
class DNF:
    table: VarTable
    cubes: list[tuple[int, ...]] = field(default_factory=list)
    provenance: list[Provenance] | None = None

    @property
    def num_vars(self) -> int:
        return len(self.table)


@dataclass
class Qbf2:
    """free block, then one quantified block over ``cnf AND dnf``."""

    table: VarTable
    free: tuple[int, ...]
    inner: tuple[int, ...]
    cnf: CNF
    dnf: DNF
    quantifier: Quantifier = Quantifier.FORALL

    def __post_init__(self) -> None:
        if set(self.free) & set(self.inner):
            raise ValueError("Quantifier blocks overlap.")


def _depth(body: Body) -> int:
    if isinstance(body, Literal):
        return 0
    return 1 + max((_depth(item) for item in body.items), default=0)


def _negate(body: Body) -> Body:
    if isinstance(body, Literal):
        return ~body
    if isinstance(body, Or):
        return And(tuple(_negate(item) for item in body.items))
    return Or(tuple(_negate(item) for item in body.items))


def _cnf(body: Body) -> list[list[Literal]]:
    if isinstance(body, Literal):
        return [[body]]
    if isinstance(body, And):
        return [clause for item in body.items for clause in _cnf(item)]
    product: list[list[Literal]] = [[]]
    for item in body.items:
        product = [left + right for left in product for right in _cnf(item)]
    return product


def definition_clauses(definition: Definition) -> list[list[Literal]]:
    if _depth(definition.body) > 2:
        raise ValueError(f"Body of {definition.tag} at node {definition.node} nests too deeply.")
    if definition.head is None:
        return _cnf(definition.body)
    head = definition.head
    return _cnf(Or((~head, definition.body))) + _cnf(Or((head, _negate(definition.body))))


def normalize(literals: Iterable[int]) -> tuple[int, ...] | None:
    """Sorted, duplicate-free clause; None for a tautology."""
    unique = set(literals)
    if any(-lit in unique for lit in unique):
        return None
    return tuple(sorted(unique, key=lambda lit: (abs(lit), lit)))


def clausify(definitions: Iterable[Definition], table: VarTable | None = None) -> CNF:
    table = table if table is not None else VarTable()
    ordered = sorted(
        enumerate(definitions),
        key=lambda pair: (pair[1].node, tag_rank(pair[1].tag), pair[1].color or 0, pair[0]),
    )
    clauses: list[tuple[int, ...]] = []
    provenance: list[Provenance] = []
    for _, definition in ordered:
        seen: set[tuple[int, ...]] = set()
        for raw in definition_clauses(definition):
            ints = []
            for literal in raw:
                var = table.id_of(literal.key)
                ints.append(var if literal.positive else -var)
            clause = normalize(ints)
            if clause is None or clause in seen:
                continue
            seen.add(clause)
            clauses.append(clause)
            provenance.append(Provenance(definition.node, definition.tag))
    return CNF(table, clauses, provenance)


def complement(items: Iterable[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Negate every literal: cubes of a DNF become the clauses of its negation."""
    return [tuple(-lit for lit in item) for item in items]


def literal_names(table: VarTable, item: tuple[int, ...]) -> frozenset[str]:
    return frozenset(("-" if lit < 0 else "") + table.name(abs(lit)) for lit in item)


def _comment_lines(table: VarTable) -> list[str]:
    return [f"c {var} {key}" for var, key in table]


def _item_line(item: tuple[int, ...]) -> str:
    return " ".join([*map(str, item), "0"])


def write_dimacs(cnf: CNF) -> str:
    lines = _comment_lines(cnf.table)
    lines.append(f"p cnf {cnf.num_vars} {len(cnf.clauses)}")
    lines.extend(_item_line(clause) for clause in cnf.clauses)
    return "\n".join(lines) + "\n"


def parse_dimacs(text: bytes | str) -> CNF:
    if isinstance(text, bytes):
        text = text.decode("utf-8", errors="replace")
    names: dict[int, str] = {}
    header: tuple[int, int] | None = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens or tokens[0] == "%":
            continue
        if tokens[0] == "c":
            if len(tokens) == 3 and tokens[1].isdigit():
                names[int(tokens[1])] = tokens[2]
            continue
        if tokens[0] == "p":
            if len(tokens) != 4 or tokens[1] != "cnf" or header is not None:
                raise ValidationError(f"Malformed DIMACS header on line {lineno}.")
            try:
                header = (int(tokens[2]), int(tokens[3]))
            except ValueError as exc:
                raise ValidationError(f"Malformed DIMACS header on line {lineno}.") from exc
            continue
        if header is None:
            raise ValidationError("Clause before the DIMACS header.")
        for token in tokens:
            try:
                lit = int(token)
            except ValueError as exc:
                raise ValidationError(f"Bad literal {token!r} on line {lineno}.") from exc
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            elif abs(lit) > header[0]:
                raise ValidationError(f"Literal {lit} exceeds the declared {header[0]} variables.")
            else:
                current.append(lit)
    if header is None:
        raise ValidationError("Missing DIMACS header.")
    if current:
        clauses.append(tuple(current))
    if len(clauses) != header[1]:
        raise ValidationError(f"Header declares {header[1]} clauses, found {len(clauses)}.")
    table = VarTable()
    used: set[str] = set()
    for var in range(1, header[0] + 1):
        label = names.get(var, f"x{var}")
        if label in used:
            label = f"x{var}"
        used.add(label)
        table.id_of(VarKey(VarKind.INPUT, label=label))
    canonical = []
    for clause in clauses:
        normalized = normalize(clause)
        canonical.append(normalized if normalized is not None else tuple(clause))
    return CNF(table, canonical)


def write_qbf(q: Qbf2) -> str:
    lines = _comment_lines(q.table)
    if q.quantifier == Quantifier.FORALL and not q.cnf.clauses:
        negated = complement(q.dnf.cubes)
        lines.append("c complement of the universal DNF matrix, read the answer flipped")
        lines.append(f"p cnf {len(q.table)} {len(negated)}")
        if q.free:
            lines.append(_item_line(("a", *q.free)))
        if q.inner:
            lines.append(_item_line(("e", *q.inner)))
        lines.extend(_item_line(clause) for clause in negated)
        return "\n".join(lines) + "\n"
    lines.append(f"p qbf2 {len(q.table)} {len(q.cnf.clauses)} {len(q.dnf.cubes)}")
    lines.append(_item_line(("free", *q.free)))
    lines.append(_item_line((Quantifier(q.quantifier).value, *q.inner)))
    lines.append("cnf")
    lines.extend(_item_line(clause) for clause in q.cnf.clauses)
    lines.append("dnf")
    lines.extend(_item_line(cube) for cube in q.dnf.cubes)
    return "\n".join(lines) + "\n"


def write_provenance(provenance: Iterable[Provenance]) -> str:
    return "".join(f"{index} {p.node} eq{p.tag}\n" for index, p in enumerate(provenance))


def var_vertex(var: int) -> str:
    return f"x{var}"


def item_vertex(index: int) -> str:
    return f"k{index}"


def incidence_digraph(f: CNF | DNF) -> nx.DiGraph:
    """Clause (or cube) to variable for positive, variable to clause for
    negative occurrences."""
    items = f.clauses if isinstance(f, CNF) else f.cubes
    graph = nx.DiGraph()
    graph.add_nodes_from((var_vertex(var) for var in range(1, f.num_vars + 1)), kind="variable")
    for index, item in enumerate(items):
        vertex = item_vertex(index)
        graph.add_node(vertex, kind="clause")
        for lit in item:
            if lit > 0:
                graph.add_edge(vertex, var_vertex(lit))
            else:
                graph.add_edge(var_vertex(-lit), vertex)
    return graph


def evaluate_items(items: Iterable[tuple[int, ...]], assignment: dict[int, bool], conjunctive: bool) -> bool:
    """Truth value of a CNF (``conjunctive``) or DNF under a total assignment."""
    def holds(lit: int) -> bool:
        return assignment[abs(lit)] == (lit > 0)

    if conjunctive:
        return all(any(holds(lit) for lit in item) for item in items)
    return any(all(holds(lit) for lit in item) for item in items)


def product_cubes(left: list[tuple[int, ...]], right: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Cubes of the conjunction of two DNFs, contradictory cubes dropped."""
    result = []
    seen = set()
    for a, b in itertools.product(left, right):
        cube = normalize(a + b)
        if cube is not None and cube not in seen:
            seen.add(cube)
            result.append(cube)
    return result
