"""Witness expressions for the incidence graphs of emitted formulas.

The builder follows the AF expression node by node, bottom-up. Every
variable has a home node; when its home is processed the variable vertex is
created with a "current" color. While a parent is processed, each child's
current colors are moved to "child" colors, the clauses defined at the
parent are drawn against them, and everything finished goes to "done".
Clauses that touch several children wait on a "pending" color of their own.
"""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable

import networkx as nx

from reduction.af import Semantics
from reduction.encoders.base import Encoding
from reduction.exceptions import WitnessDriftError
from reduction.formula import CNF, DNF, VarKind, incidence_digraph, item_vertex, var_vertex
from reduction.kexpr import EdgeIntro, Initial, KExpr, Relabel, Term, Union, evaluate, serialize

logger = logging.getLogger(__name__)

DONE = ("done",)
CLAUSE_MAKER = ("cm",)
DNF_SEMANTICS = "dnf"

_FIRST_LEVEL = 11


def witness_budget(semantics: Semantics | str, k: int) -> int:
    if semantics == DNF_SEMANTICS:
        return 6 * k + 4
    semantics = Semantics(semantics)
    if semantics == Semantics.COMPLETE:
        return 2 * (_FIRST_LEVEL * k + 2)
    if semantics == Semantics.PREFERRED:
        return 27 * k + 4
    if semantics in (Semantics.SEMI_STABLE, Semantics.STAGE):
        return 32 * k + 4
    return _FIRST_LEVEL * k + 2


@dataclass(frozen=True)
class Home:
    node: int
    family: tuple[str, bool]
    color: int | None
    slot: str = "cur"

    @property
    def label(self) -> tuple:
        return (self.slot, self.family, self.color)


@dataclass
class Witness:
    expression: KExpr
    colors_used: int
    budget: int
    semantics: str
    outer_only: bool = False


@dataclass
class WitnessReport:
    problems: dict[str, list[str]] = field(
        default_factory=lambda: {"clauses": [], "edges": [], "orientation": [], "colors": []}
    )

    def passed(self, check: str) -> bool:
        return not self.problems[check]

    @property
    def ok(self) -> bool:
        return all(not found for found in self.problems.values())

    def summary(self) -> list[str]:
        return [f"{check}: {problem}" for check, found in self.problems.items() for problem in found]


class _Palette:
    """Labels to colors, numbered by first use."""

    def __init__(self) -> None:
        self._colors: dict[Hashable, int] = {}

    def __call__(self, label: Hashable) -> int:
        return self._colors.setdefault(label, len(self._colors) + 1)

    def __len__(self) -> int:
        return len(self._colors)


def _union(left: Term | None, right: Term) -> Term:
    return right if left is None else Union((left, right))


class _Assembler:
    def __init__(self, expr: KExpr, items, item_nodes, homes: dict[int, Home]) -> None:
        self.expr = expr
        self.items = items
        self.homes = homes
        self.palette = _Palette()
        self.palette(DONE)
        self.palette(CLAUSE_MAKER)
        self.vars_at: dict[int, list[int]] = defaultdict(list)
        seen: set[tuple] = set()
        for var, home in sorted(homes.items()):
            if (home.node, home.label) in seen:
                raise WitnessDriftError(f"Two variables share color {home.label} at node {home.node}.")
            seen.add((home.node, home.label))
            self.vars_at[home.node].append(var)
        self.items_at: dict[int, list[int]] = defaultdict(list)
        for index, node in enumerate(item_nodes):
            if not 0 <= node < len(expr.nodes):
                raise WitnessDriftError(f"Clause {index} has no node {node}.")
            self.items_at[node].append(index)

    def _item(self, term: Term | None, index: int, labels: dict[int, tuple]) -> Term:
        cm = self.palette(CLAUSE_MAKER)
        term = _union(term, Initial(cm, item_vertex(index)))
        for lit in self.items[index]:
            color = self.palette(labels[abs(lit)])
            term = EdgeIntro(cm, color, term) if lit > 0 else EdgeIntro(color, cm, term)
        return Relabel(cm, self.palette(DONE), term)

    def _relabel(self, term: Term, source: tuple, target: tuple) -> Term:
        return Relabel(self.palette(source), self.palette(target), term)

    def _sort_items(self, b: int, children: tuple[int, ...]):
        local, single, multi = [], defaultdict(list), []
        for index in self.items_at[b]:
            touched = set()
            for lit in self.items[index]:
                var = abs(lit)
                home = self.homes.get(var)
                if home is None:
                    raise WitnessDriftError(f"Variable {var} in clause {index} has no home.")
                if home.node == b:
                    continue
                if home.node not in children or home.slot != "cur":
                    raise WitnessDriftError(
                        f"Clause {index} at node {b} uses variable {var} from node {home.node}."
                    )
                touched.add(home.node)
            if not touched:
                local.append(index)
            elif len(touched) == 1:
                single[touched.pop()].append(index)
            else:
                multi.append(index)
        return local, single, multi

    def run(self) -> KExpr:
        terms: list[Term | None] = [None] * len(self.expr.nodes)
        for node in reversed(self.expr.nodes):
            b = node.id
            labels: dict[int, tuple] = {}
            term: Term | None = None
            for var in self.vars_at[b]:
                labels[var] = self.homes[var].label
                term = _union(term, Initial(self.palette(labels[var]), var_vertex(var)))
            local, single, multi = self._sort_items(b, node.children)
            for index in local:
                term = self._item(term, index, labels)
            pending = {index: ("pending", position) for position, index in enumerate(multi)}
            for index in multi:
                mark = self.palette(pending[index])
                term = _union(term, Initial(mark, item_vertex(index)))
                for lit in self.items[index]:
                    if self.homes[abs(lit)].node == b:
                        color = self.palette(labels[abs(lit)])
                        term = EdgeIntro(mark, color, term) if lit > 0 else EdgeIntro(color, mark, term)
            for child in node.children:
                child_term = terms[child]
                terms[child] = None
                moved = []
                for var in self.vars_at[child]:
                    home = self.homes[var]
                    if home.slot != "cur":
                        continue
                    target = ("child", home.family, home.color)
                    child_term = self._relabel(child_term, home.label, target)
                    labels[var] = target
                    moved.append(target)
                term = _union(term, child_term)
                for index in single[child]:
                    term = self._item(term, index, labels)
                for index in multi:
                    mark = self.palette(pending[index])
                    for lit in self.items[index]:
                        if self.homes[abs(lit)].node == child:
                            color = self.palette(labels[abs(lit)])
                            term = EdgeIntro(mark, color, term) if lit > 0 else EdgeIntro(color, mark, term)
                for target in moved:
                    term = self._relabel(term, target, DONE)
            for index in multi:
                term = self._relabel(term, pending[index], DONE)
            for var in self.vars_at[b]:
                if self.homes[var].slot != "cur":
                    term = self._relabel(term, self.homes[var].label, DONE)
            if term is None:
                raise WitnessDriftError(f"Node {b} introduces no vertices.")
            terms[b] = term
        return KExpr.from_term(terms[0])


def encoding_homes(enc: Encoding) -> dict[int, Home]:
    homes = {}
    leaves = enc.expression.leaves
    for var, key in enc.table:
        if key.kind == VarKind.EXT_ARG:
            homes[var] = Home(leaves[key.label], (VarKind.EXT_ARG.value, key.starred), None, "child")
        else:
            homes[var] = Home(key.node, (VarKind(key.kind).value, key.starred), key.color)
    return homes


def build_witness(enc: Encoding, x: KExpr | None = None, outer_only: bool = False) -> Witness:
    """Witness for the encoding's clauses; universal parts are included
    unless ``outer_only`` is set."""
    if x is not None and serialize(x) != serialize(enc.expression):
        raise WitnessDriftError("The encoding was built from a different expression.")
    cnf = enc.cnf if outer_only else enc.witness_cnf()
    if cnf.provenance is None or len(cnf.provenance) != len(cnf.clauses):
        raise WitnessDriftError("Clauses without provenance cannot be witnessed.")
    expression = _Assembler(
        enc.expression, cnf.clauses, [p.node for p in cnf.provenance], encoding_homes(enc)
    ).run()
    budget = witness_budget(enc.semantics, enc.expression.width)
    return _finish(expression, budget, enc.semantics.value, outer_only)


def build_dnf_witness(converted: DNF, x_cnf: KExpr, inputs: int) -> Witness:
    """Witness for a converted DNF; variables up to ``inputs`` are the
    original ones and live at their leaves in ``x_cnf``."""
    if converted.provenance is None or len(converted.provenance) != len(converted.cubes):
        raise WitnessDriftError("Cubes without provenance cannot be witnessed.")
    leaves = x_cnf.leaves
    homes = {}
    for var, key in converted.table:
        if var <= inputs:
            homes[var] = Home(leaves[var_vertex(var)], (VarKind.INPUT.value, False), None, "child")
        else:
            homes[var] = Home(key.node, (VarKind(key.kind).value, False), key.color)
    expression = _Assembler(x_cnf, converted.cubes, [p.node for p in converted.provenance], homes).run()
    return _finish(expression, witness_budget(DNF_SEMANTICS, x_cnf.width), DNF_SEMANTICS, False)


def _finish(expression: KExpr, budget: int, semantics: str, outer_only: bool) -> Witness:
    colors_used = expression.width
    logger.info("Witness for %s uses %d of %d colors", semantics, colors_used, budget)
    if colors_used > budget:
        raise WitnessDriftError(f"Witness needs {colors_used} colors, budget is {budget}.")
    return Witness(expression, colors_used, budget, semantics, outer_only)


def _expected_graph(w: Witness, formula: Encoding | CNF | DNF) -> nx.DiGraph:
    if isinstance(formula, Encoding):
        formula = formula.cnf if w.outer_only else formula.witness_cnf()
    return incidence_digraph(formula)


def verify_witness(w: Witness, formula: Encoding | CNF | DNF) -> WitnessReport:
    report = WitnessReport()
    actual = evaluate(w.expression)
    expected = _expected_graph(w, formula)
    for vertex in sorted(set(expected.nodes) - set(actual.nodes)):
        report.problems["clauses"].append(f"missing vertex {vertex}")
    for vertex in sorted(set(actual.nodes) - set(expected.nodes)):
        report.problems["clauses"].append(f"unexpected vertex {vertex}")
    for source, target in sorted(set(expected.edges) - set(actual.edges)):
        if actual.has_edge(target, source):
            report.problems["orientation"].append(f"edge {source}->{target} is reversed")
            continue
        item = source if source.startswith("k") else target
        report.problems["clauses"].append(f"clause {item} misses edge {source}->{target}")
    for source, target in sorted(set(actual.edges) - set(expected.edges)):
        report.problems["edges"].append(f"extra edge {source}->{target}")
    if w.expression.width > w.budget:
        report.problems["colors"].append(f"{w.expression.width} colors exceed the budget of {w.budget}")
    return report


def write_witness(w: Witness) -> str:
    return f"% k'={w.colors_used} budget={w.budget}\n{serialize(w.expression)}\n"
