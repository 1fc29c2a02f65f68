"""Turning the CNF part of a matrix into a DNF over extra universal variables.

Guided by an expression of the CNF's incidence graph: ``sat_c`` says every
clause vertex of color c is satisfied, ``t_c`` / ``f_c`` that some variable
vertex of color c is true / false. A family is only defined for classes that
hold the matching kind of vertex; the others are constants and drop out of
the gates. The resulting DNF reads "the definitions imply that every root
color is satisfied", so quantifying the auxiliaries universally leaves
exactly the CNF's models.
"""
from __future__ import annotations

import logging

from django.core.exceptions import ValidationError

from reduction.encoders.layers import relabel_sources
from reduction.formula import (
    CNF,
    DNF,
    And,
    Definition,
    Literal,
    Or,
    Provenance,
    Qbf2,
    VarKey,
    VarKind,
    clausify,
    complement,
    incidence_digraph,
    product_cubes,
)
from reduction.kexpr import KExpr, Op, annotate, compare_graphs, evaluate

logger = logging.getLogger(__name__)

CLAUSE, VARIABLE = "clause", "variable"


def _vertex_kind(name: str) -> str:
    return CLAUSE if name.startswith("k") else VARIABLE


def class_kinds(expr: KExpr) -> list[dict[int, frozenset[str]]]:
    """Per node, the vertex kinds present in each live color class."""
    kinds: list[dict[int, frozenset[str]]] = [{}] * len(expr.nodes)
    for node in reversed(expr.nodes):
        if node.op == Op.INITIAL:
            kinds[node.id] = {node.color: frozenset((_vertex_kind(node.argument),))}
        elif node.op == Op.UNION:
            merged: dict[int, frozenset[str]] = {}
            for child in node.children:
                for color, present in kinds[child].items():
                    merged[color] = merged.get(color, frozenset()) | present
            kinds[node.id] = merged
        elif node.op == Op.RELABEL:
            below = dict(kinds[node.child])
            if node.source in below and node.source != node.target:
                moved = below.pop(node.source)
                below[node.target] = below.get(node.target, frozenset()) | moved
            kinds[node.id] = below
        else:
            kinds[node.id] = kinds[node.child]
    return kinds


def dnf_convert(cnf_part: CNF, x_cnf: KExpr | None) -> DNF:
    table = cnf_part.table.copy()
    if not cnf_part.clauses:
        return DNF(table, [()], [Provenance(0, "dnf-root")])
    if x_cnf is None:
        raise ValidationError("An expression of the incidence graph is required.")
    diagnostics = compare_graphs(evaluate(x_cnf), incidence_digraph(cnf_part))
    if diagnostics:
        raise ValidationError(["Expression does not build the incidence graph.", *diagnostics[:20]])
    cols = annotate(x_cnf, with_members=False).cols
    kinds = class_kinds(x_cnf)
    families = {CLAUSE: (VarKind.SAT,), VARIABLE: (VarKind.TRUE, VarKind.FALSE)}
    gates = {VarKind.SAT: And, VarKind.TRUE: Or, VarKind.FALSE: Or}

    def V(kind: VarKind, color: int, node: int) -> Literal:
        return Literal(VarKey(kind, color, node))

    definitions: list[Definition] = []

    def define(node: int, tag: str, color: int, head: Literal, body) -> None:
        definitions.append(Definition(head, body, node, tag, color))

    for node in x_cnf.nodes:
        b = node.id
        if node.op == Op.INITIAL:
            c = node.color
            if _vertex_kind(node.argument) == VARIABLE:
                source = Literal(table.key_of(int(node.argument[1:])))
                define(b, "dnf-leaf", c, V(VarKind.TRUE, c, b), source)
                define(b, "dnf-leaf", c, V(VarKind.FALSE, c, b), ~source)
            else:
                define(b, "dnf-leaf", c, V(VarKind.SAT, c, b), Or())
            continue
        for c in sorted(cols[b]):
            if node.op == Op.UNION:
                feeding = [(child, c) for child in node.children if c in cols[child]]
                tag = "dnf-union"
            elif node.op == Op.RELABEL:
                feeding = [(node.child, s) for s in relabel_sources(node, c, cols[node.child])]
                tag = "dnf-relabel"
            else:
                feeding = [(node.child, c)]
                tag = "dnf-edge"
            for vertex_kind in sorted(kinds[b][c]):
                for kind in families[vertex_kind]:
                    inputs = tuple(
                        V(kind, color, child)
                        for child, color in feeding
                        if vertex_kind in kinds[child][color]
                    )
                    body = gates[kind](inputs)
                    if node.op == Op.EDGE and kind == VarKind.SAT:
                        body = _edge_sat(node, c, kinds[b], inputs[0], V)
                    define(b, tag, c, V(kind, c, b), body)
    converted = clausify(definitions, table)
    cubes = complement(converted.clauses)
    roots = [c for c in sorted(cols[0]) if CLAUSE in kinds[0][c]]
    cubes.append(tuple(table.id_of(VarKey(VarKind.SAT, c, 0)) for c in roots))
    provenance = [*converted.provenance, Provenance(0, "dnf-root")]
    logger.info("Converted %d clauses into %d cubes", len(cnf_part.clauses), len(cubes))
    return DNF(table, cubes, provenance)


def _edge_sat(node, c, kinds, inherited, V):
    """A positive edge lets class-p clauses be satisfied by a true class-q
    variable; a negative one lets class-q clauses be satisfied by a false
    class-p variable."""
    p, q = node.source, node.target
    if p not in kinds or q not in kinds:
        return inherited
    if c == p and kinds[p] == {CLAUSE} and kinds[q] == {VARIABLE}:
        return Or.of(inherited, V(VarKind.TRUE, q, node.id))
    if c == q and kinds[p] == {VARIABLE} and kinds[q] == {CLAUSE}:
        return Or.of(inherited, V(VarKind.FALSE, p, node.id))
    return inherited


def to_dnf_matrix(q: Qbf2, x_cnf: KExpr | None) -> Qbf2:
    """Fold the CNF part into the DNF part; the auxiliaries join the inner block.

    The cube count is the product of both parts, so this is only practical
    for small matrices.
    """
    converted = dnf_convert(q.cnf, x_cnf)
    table = converted.table
    aux = tuple(range(len(q.table) + 1, len(table) + 1))
    cubes = product_cubes(converted.cubes, q.dnf.cubes)
    return Qbf2(table, q.free, q.inner + aux, CNF(table, []), DNF(table, cubes), q.quantifier)
