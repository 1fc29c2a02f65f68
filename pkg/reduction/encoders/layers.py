"""Variable families shared by the encodings.

Each family defines one variable per (live color, expression node). Leaves
initialise it, unions and relabels combine the children with the family's
gate, and edge introductions apply the family's edge rule. Tags name the
defining equation; starred copies carry a trailing ``*``.
"""
from __future__ import annotations

from typing import Callable

from reduction.encoders.base import EncodingBuilder
from reduction.formula import And, Body, Literal, Or, VarKind
from reduction.kexpr import KNode, Op

EdgeRule = Callable[[KNode, int], tuple[str, Body]]


def relabel_sources(node: KNode, color: int, below: frozenset[int]) -> list[int]:
    """Child colors that end up as ``color`` after a relabel node."""
    sources = []
    if color == node.target and node.source in below:
        sources.append(node.source)
    if color in below and color != node.source:
        sources.append(color)
    return sources


def edge_live(bld: EncodingBuilder, node: KNode) -> bool:
    cols = bld.cols[node.id]
    return node.source in cols and node.target in cols


def _family(
    bld: EncodingBuilder,
    kind: VarKind,
    starred: bool,
    tags: tuple[str, str, str],
    gate: type[Or] | type[And],
    leaf_body: Callable[[KNode], Body],
    edge_rule: EdgeRule,
) -> None:
    star = "*" if starred else ""
    cols = bld.cols

    def var(color: int, node: int) -> Literal:
        return bld.lit(kind, color, node, starred)

    for node in bld.expression.nodes:
        b = node.id
        if node.op == Op.INITIAL:
            bld.define(b, tags[0] + star, node.color, var(node.color, b), leaf_body(node))
        elif node.op == Op.UNION:
            for c in sorted(cols[b]):
                body = gate(tuple(var(c, child) for child in node.children if c in cols[child]))
                bld.define(b, tags[1] + star, c, var(c, b), body)
        elif node.op == Op.RELABEL:
            below = cols[node.child]
            for c in sorted(cols[b]):
                body = gate(tuple(var(source, node.child) for source in relabel_sources(node, c, below)))
                bld.define(b, tags[2] + star, c, var(c, b), body)
        else:
            for c in sorted(cols[b]):
                tag, body = edge_rule(node, c)
                bld.define(b, tag + star, c, var(c, b), body)


def extension_layer(bld: EncodingBuilder, starred: bool = False) -> None:
    """Conflict-freeness."""
    star = "*" if starred else ""

    def E(color: int, node: int) -> Literal:
        return bld.lit(VarKind.EXT, color, node, starred)

    _family(
        bld,
        VarKind.EXT,
        starred,
        ("1", "2", "3"),
        Or,
        lambda node: bld.arg(node.argument, starred),
        lambda node, c: ("4", E(c, node.child)),
    )
    for node in bld.expression.nodes:
        if node.op == Op.EDGE and edge_live(bld, node):
            p, q = node.source, node.target
            bld.require(node.id, "4" + star, q, Or.of(~E(p, node.id), ~E(q, node.id)))


def defeat_layer(bld: EncodingBuilder, starred: bool = False, root_units: bool = False) -> None:
    """``d_c`` holds when every c-colored argument is in the extension or attacked by it."""
    star = "*" if starred else ""

    def E(color: int, node: int) -> Literal:
        return bld.lit(VarKind.EXT, color, node, starred)

    def D(color: int, node: int) -> Literal:
        return bld.lit(VarKind.DEFEAT, color, node, starred)

    def edge_rule(node: KNode, c: int) -> tuple[str, Body]:
        if c == node.target and edge_live(bld, node):
            return "8", Or.of(D(c, node.child), E(node.source, node.id))
        return "8", D(c, node.child)

    _family(
        bld,
        VarKind.DEFEAT,
        starred,
        ("5", "6", "7"),
        And,
        lambda node: E(node.color, node.id),
        edge_rule,
    )
    if root_units:
        for c in sorted(bld.cols[0]):
            bld.require(0, "9" + star, c, D(c, 0))


def attack_layer(bld: EncodingBuilder, starred: bool = False) -> None:
    """``a_c`` holds when some c-colored argument attacks the extension and is not defeated yet.

    Needs the defeat layer of the same copy.
    """
    star = "*" if starred else ""

    def E(color: int, node: int) -> Literal:
        return bld.lit(VarKind.EXT, color, node, starred)

    def D(color: int, node: int) -> Literal:
        return bld.lit(VarKind.DEFEAT, color, node, starred)

    def A(color: int, node: int) -> Literal:
        return bld.lit(VarKind.ATTACK, color, node, starred)

    def edge_rule(node: KNode, c: int) -> tuple[str, Body]:
        b, p, q = node.id, node.source, node.target
        if edge_live(bld, node):
            if c == p:
                return "13", Or.of(A(c, node.child), And.of(E(q, b), ~D(p, b)))
            if c == q:
                return "14", And.of(A(c, node.child), ~E(p, b))
        return "13", A(c, node.child)

    _family(
        bld,
        VarKind.ATTACK,
        starred,
        ("10", "11", "12"),
        Or,
        lambda node: Or(),
        edge_rule,
    )
    for c in sorted(bld.cols[0]):
        bld.require(0, "15" + star, c, ~A(c, 0))


def out_layer(bld: EncodingBuilder) -> None:
    """``o_c`` holds while some c-colored argument outside the extension may still be defended."""

    def E(color: int, node: int) -> Literal:
        return bld.lit(VarKind.EXT, color, node)

    def D(color: int, node: int) -> Literal:
        return bld.lit(VarKind.DEFEAT, color, node)

    def O(color: int, node: int) -> Literal:
        return bld.lit(VarKind.OUT, color, node)

    def G(color: int, node: int) -> Literal:
        return bld.lit(VarKind.DEFEAT_GE, color, node)

    def edge_rule(node: KNode, c: int) -> tuple[str, Body]:
        b, p, q = node.id, node.source, node.target
        if edge_live(bld, node):
            if c == p:
                return "19", And.of(O(c, node.child), ~E(q, b))
            if c == q:
                return "20", And.of(O(c, node.child), ~E(p, b), Or.of(D(p, b), G(p, b)))
        return "19", O(c, node.child)

    _family(
        bld,
        VarKind.OUT,
        False,
        ("16", "17", "18"),
        Or,
        lambda node: ~E(node.color, node.id),
        edge_rule,
    )
    for c in sorted(bld.cols[0]):
        bld.require(0, "24", c, ~O(c, 0))


def defeat_ge_layer(bld: EncodingBuilder) -> None:
    """``d>=_c`` holds when an edge at or above the node attacks all of color c from the extension.

    Defined root-down; each child's variable is attributed to its parent node.
    """
    nodes = bld.expression.nodes
    cols = bld.cols

    def E(color: int, node: int) -> Literal:
        return bld.lit(VarKind.EXT, color, node)

    def G(color: int, node: int) -> Literal:
        return bld.lit(VarKind.DEFEAT_GE, color, node)

    def own(node: KNode, c: int) -> list[Literal]:
        if node.op == Op.EDGE and node.target == c and edge_live(bld, node):
            return [E(node.source, node.id)]
        return []

    for c in sorted(cols[0]):
        bld.define(0, "21", c, G(c, 0), Or(tuple(own(nodes[0], c))))
    for node in nodes:
        for child in node.children:
            for c in sorted(cols[child]):
                if node.op == Op.RELABEL:
                    above, tag = (node.target if c == node.source else c), "23"
                else:
                    above, tag = c, "22"
                bld.define(node.id, tag, c, G(c, child), Or((G(above, node.id), *own(nodes[child], c))))


def subset_layer(bld: EncodingBuilder) -> None:
    """Preferred: ``s_c`` marks a starred argument missing from the candidate."""

    def E(color: int, node: int, starred: bool = False) -> Literal:
        return bld.lit(VarKind.EXT, color, node, starred)

    def S(color: int, node: int) -> Literal:
        return bld.lit(VarKind.SUBSET, color, node)

    _family(
        bld,
        VarKind.SUBSET,
        False,
        ("26", "27", "28"),
        Or,
        lambda node: And.of(E(node.color, node.id, True), ~E(node.color, node.id)),
        lambda node, c: ("29", S(c, node.child)),
    )
    for node in bld.expression.nodes:
        if node.op == Op.INITIAL:
            c = node.color
            bld.require(node.id, "30", c, Or.of(~E(c, node.id), E(c, node.id, True)))
    bld.require(0, "31", None, Or(tuple(S(c, 0) for c in sorted(bld.cols[0]))))


def range_layers(bld: EncodingBuilder) -> None:
    """Semi-stable and stage: the starred range strictly contains the plain one.

    ``s_c`` marks a c-colored argument in the starred range only, ``l_c`` one
    in the plain range only; the root forbids every ``l`` and asks for an ``s``.
    Needs both defeat layers.
    """

    def D(color: int, node: int, starred: bool = False) -> Literal:
        return bld.lit(VarKind.DEFEAT, color, node, starred)

    def S(color: int, node: int) -> Literal:
        return bld.lit(VarKind.SUBSET, color, node)

    def L(color: int, node: int) -> Literal:
        return bld.lit(VarKind.RANGE_LOSS, color, node)

    _family(
        bld,
        VarKind.SUBSET,
        False,
        ("33", "34", "35"),
        Or,
        lambda node: And.of(D(node.color, node.id, True), ~D(node.color, node.id)),
        lambda node, c: ("36", And.of(Or.of(S(c, node.child), D(c, node.id, True)), ~D(c, node.id))),
    )
    _family(
        bld,
        VarKind.RANGE_LOSS,
        False,
        ("33l", "34l", "35l"),
        Or,
        lambda node: And.of(D(node.color, node.id), ~D(node.color, node.id, True)),
        lambda node, c: ("36l", And.of(Or.of(L(c, node.child), D(c, node.id)), ~D(c, node.id, True))),
    )
    for c in sorted(bld.cols[0]):
        bld.require(0, "37l", c, ~L(c, 0))
    bld.require(0, "37", None, Or(tuple(S(c, 0) for c in sorted(bld.cols[0]))))
