"""Directed clique-width k-expressions.

A term is built from ``c(a)`` (create argument ``a`` with color ``c``),
``u(...)`` (disjoint union), ``r(c->d, t)`` (recolor ``c`` to ``d``) and
``e(c, d, t)`` (add every edge from a ``c``-colored to a ``d``-colored
vertex). Parsed terms are flattened into a node table numbered in level
order, so node 0 is the root and children always carry larger ids than their
parent. Witness expressions nest thousands of operations, so nothing here
recurses over the node table.
"""
from __future__ import annotations

import itertools
import logging
import re
from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property
from typing import Union as TypingUnion

import networkx as nx
from django.conf import settings
from django.core.exceptions import ValidationError
from django.db import models

from reduction.af import AF, bits
from reduction.exceptions import ResourceLimitExceeded

logger = logging.getLogger(__name__)

TOKEN_PATTERN = re.compile(r"(?P<word>[A-Za-z0-9_]+)|(?P<arrow>->)|(?P<punct>[(),])|(?P<space>\s+)|(?P<bad>.)")

# Above this many arguments the search falls back to the greedy linear builder.
EXHAUSTIVE_LIMIT = 10


@dataclass(frozen=True, eq=False)
class Initial:
    color: int
    argument: str


@dataclass(frozen=True, eq=False)
class Union:
    children: tuple


@dataclass(frozen=True, eq=False)
class Relabel:
    source: int
    target: int
    child: object


@dataclass(frozen=True, eq=False)
class EdgeIntro:
    source: int
    target: int
    child: object


Term = TypingUnion[Initial, Union, Relabel, EdgeIntro]


class Op(models.TextChoices):
    INITIAL = "initial", "create"
    UNION = "union", "disjoint union"
    RELABEL = "relabel", "relabel"
    EDGE = "edge", "edge introduction"


@dataclass(frozen=True)
class KNode:
    id: int
    op: Op
    children: tuple[int, ...] = ()
    color: int | None = None
    argument: str | None = None
    source: int | None = None
    target: int | None = None

    @property
    def child(self) -> int:
        return self.children[0]


def _term_children(term: Term) -> tuple:
    if isinstance(term, Union):
        return term.children
    if isinstance(term, (Relabel, EdgeIntro)):
        return (term.child,)
    return ()


@dataclass(frozen=True)
class KExpr:
    nodes: tuple[KNode, ...]

    @classmethod
    def from_term(cls, term: Term) -> KExpr:
        records: list[KNode] = []
        queue = deque([term])
        next_id = 1
        seen: set[str] = set()
        while queue:
            current = queue.popleft()
            node_id = len(records)
            children = _term_children(current)
            child_ids = tuple(range(next_id, next_id + len(children)))
            next_id += len(children)
            queue.extend(children)
            if isinstance(current, Initial):
                _check_color(current.color)
                if current.argument in seen:
                    raise ValidationError(f"Argument {current.argument!r} is created more than once.")
                seen.add(current.argument)
                records.append(KNode(node_id, Op.INITIAL, color=current.color, argument=current.argument))
            elif isinstance(current, Union):
                if len(children) < 2:
                    raise ValidationError("A union needs at least two operands.")
                records.append(KNode(node_id, Op.UNION, child_ids))
            elif isinstance(current, Relabel):
                _check_color(current.source)
                _check_color(current.target)
                records.append(
                    KNode(node_id, Op.RELABEL, child_ids, source=current.source, target=current.target)
                )
            elif isinstance(current, EdgeIntro):
                _check_color(current.source)
                _check_color(current.target)
                if current.source == current.target:
                    raise ValidationError(f"Edge introduction e({current.source},{current.target}) uses one color.")
                records.append(KNode(node_id, Op.EDGE, child_ids, source=current.source, target=current.target))
            else:
                raise TypeError(f"Not a k-expression term: {current!r}")
        return cls(tuple(records))

    def to_term(self) -> Term:
        terms: list = [None] * len(self.nodes)
        for node in reversed(self.nodes):
            if node.op == Op.INITIAL:
                terms[node.id] = Initial(node.color, node.argument)
            elif node.op == Op.UNION:
                terms[node.id] = Union(tuple(terms[c] for c in node.children))
            elif node.op == Op.RELABEL:
                terms[node.id] = Relabel(node.source, node.target, terms[node.child])
            else:
                terms[node.id] = EdgeIntro(node.source, node.target, terms[node.child])
        return terms[0]

    @property
    def root(self) -> KNode:
        return self.nodes[0]

    @cached_property
    def width(self) -> int:
        colors = [0]
        for node in self.nodes:
            colors.extend(c for c in (node.color, node.source, node.target) if c is not None)
        return max(colors)

    @cached_property
    def arity(self) -> int:
        return max((len(node.children) for node in self.nodes), default=0)

    @cached_property
    def leaves(self) -> dict[str, int]:
        return {node.argument: node.id for node in self.nodes if node.op == Op.INITIAL}

    @cached_property
    def parents(self) -> tuple[int | None, ...]:
        table: list[int | None] = [None] * len(self.nodes)
        for node in self.nodes:
            for child in node.children:
                table[child] = node.id
        return tuple(table)

    def __len__(self) -> int:
        return len(self.nodes)

    def __str__(self) -> str:
        return serialize(self)


def _check_color(color: int) -> None:
    if color < 1:
        raise ValidationError(f"Color {color} is not positive.")


def _decode(text: bytes | str) -> str:
    if isinstance(text, bytes):
        try:
            return text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ValidationError("Expression is not valid UTF-8.") from exc
    return text


class _Reader:
    def __init__(self, text: str) -> None:
        self.tokens: list[tuple[str, int]] = []
        for match in TOKEN_PATTERN.finditer(text):
            if match.lastgroup == "space":
                continue
            if match.lastgroup == "bad":
                raise ValidationError(f"Unexpected character {match.group()!r} at offset {match.start()}.")
            self.tokens.append((match.group(), match.start()))
        self.pos = 0

    def fail(self, message: str) -> None:
        offset = self.tokens[self.pos][1] if self.pos < len(self.tokens) else "end"
        raise ValidationError(f"Syntax error at offset {offset}: {message}.")

    def peek(self) -> str | None:
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def next(self) -> str:
        token = self.peek()
        if token is None:
            self.fail("unexpected end of input")
        self.pos += 1
        return token

    def expect(self, token: str) -> None:
        if self.peek() != token:
            self.fail(f"expected {token!r}")
        self.pos += 1

    def word(self) -> str:
        token = self.next()
        if not re.fullmatch(r"[A-Za-z0-9_]+", token):
            self.pos -= 1
            self.fail(f"expected a name, got {token!r}")
        return token

    def color(self) -> int:
        token = self.word()
        if not token.isdigit():
            self.pos -= 1
            self.fail(f"expected a color, got {token!r}")
        value = int(token)
        _check_color(value)
        return value


def parse_kexpr(text: bytes | str) -> KExpr:
    source = "\n".join(
        line for line in _decode(text).splitlines() if not line.lstrip().startswith("%")
    )
    reader = _Reader(source)
    stack: list[list] = []
    while True:
        head = reader.word()
        if head.isdigit() and reader.peek() == "(":
            reader.pos -= 1
            color = reader.color()
            reader.expect("(")
            name = reader.word()
            reader.expect(")")
            term: Term = Initial(color, name)
        elif head == "u":
            reader.expect("(")
            stack.append(["u", None, None, []])
            continue
        elif head in ("r", "e"):
            reader.expect("(")
            source_color = reader.color()
            reader.expect("->" if head == "r" else ",")
            target_color = reader.color()
            reader.expect(",")
            stack.append([head, source_color, target_color, []])
            continue
        else:
            reader.pos -= 1
            reader.fail(f"unknown operation {head!r}")
        while stack:
            frame = stack[-1]
            frame[3].append(term)
            if frame[0] == "u" and reader.peek() == ",":
                reader.next()
                break
            reader.expect(")")
            stack.pop()
            if frame[0] == "u":
                term = Union(tuple(frame[3]))
            elif frame[0] == "r":
                term = Relabel(frame[1], frame[2], frame[3][0])
            else:
                term = EdgeIntro(frame[1], frame[2], frame[3][0])
        else:
            break
    if reader.peek() is not None:
        reader.fail("trailing input")
    return KExpr.from_term(term)


def serialize(expr: KExpr) -> str:
    out: list[str] = []
    work: list = [expr.root.id]
    while work:
        item = work.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        node = expr.nodes[item]
        if node.op == Op.INITIAL:
            out.append(f"{node.color}({node.argument})")
        elif node.op == Op.UNION:
            work.append(")")
            for position, child in enumerate(reversed(node.children)):
                if position:
                    work.append(",")
                work.append(child)
            out.append("u(")
        elif node.op == Op.RELABEL:
            work.extend([")", node.child])
            out.append(f"r({node.source}->{node.target},")
        else:
            work.extend([")", node.child])
            out.append(f"e({node.source},{node.target},")
    return "".join(out)


@dataclass(frozen=True)
class ColorState:
    """Live colors per node and, optionally, every argument's color per node."""

    cols: tuple[frozenset[int], ...]
    colors: tuple[dict[str, int], ...] | None
    edge_pairs: dict[int, tuple[int, int]]

    def col(self, argument: str, node: int) -> int:
        if self.colors is None:
            raise ValueError("Annotation was built without per-argument colors.")
        return self.colors[node][argument]


def annotate(expr: KExpr, with_members: bool = True) -> ColorState:
    cols: list[frozenset[int]] = [frozenset()] * len(expr.nodes)
    colors: list[dict[str, int]] = [{}] * len(expr.nodes)
    edge_pairs: dict[int, tuple[int, int]] = {}
    for node in reversed(expr.nodes):
        b = node.id
        if node.op == Op.INITIAL:
            cols[b] = frozenset((node.color,))
            if with_members:
                colors[b] = {node.argument: node.color}
        elif node.op == Op.UNION:
            cols[b] = frozenset().union(*(cols[c] for c in node.children))
            if with_members:
                merged: dict[str, int] = {}
                for c in node.children:
                    merged.update(colors[c])
                colors[b] = merged
        elif node.op == Op.RELABEL:
            below = cols[node.child]
            cols[b] = (below - {node.source}) | {node.target} if node.source in below else below
            if with_members:
                colors[b] = {
                    a: node.target if c == node.source else c for a, c in colors[node.child].items()
                }
        else:
            cols[b] = cols[node.child]
            edge_pairs[b] = (node.source, node.target)
            if with_members:
                colors[b] = colors[node.child]
    return ColorState(tuple(cols), tuple(colors) if with_members else None, edge_pairs)


def evaluate(expr: KExpr) -> nx.DiGraph:
    """Build the digraph bottom-up; each vertex carries its final ``color``."""
    graph = nx.DiGraph()
    classes: list[dict[int, list[str]] | None] = [None] * len(expr.nodes)
    sizes = [0] * len(expr.nodes)
    for node in reversed(expr.nodes):
        b = node.id
        if node.op == Op.INITIAL:
            graph.add_node(node.argument)
            classes[b] = {node.color: [node.argument]}
            sizes[b] = 1
            continue
        if node.op == Op.UNION:
            order = sorted(node.children, key=lambda c: -sizes[c])
            merged = classes[order[0]]
            for c in order[1:]:
                for color, members in classes[c].items():
                    merged.setdefault(color, []).extend(members)
        else:
            merged = classes[node.child]
            if node.op == Op.RELABEL:
                if node.source in merged and node.source != node.target:
                    moved = merged.pop(node.source)
                    merged.setdefault(node.target, []).extend(moved)
            else:
                for u in merged.get(node.source, ()):
                    for v in merged.get(node.target, ()):
                        graph.add_edge(u, v)
        for c in node.children:
            classes[c] = None
        sizes[b] = sum(sizes[c] for c in node.children)
        classes[b] = merged
    for color, members in classes[0].items():
        for vertex in members:
            graph.nodes[vertex]["color"] = color
    return graph


def compare_graphs(actual: nx.DiGraph, expected: nx.DiGraph) -> list[str]:
    diagnostics = []
    for vertex in sorted(set(expected.nodes) - set(actual.nodes)):
        diagnostics.append(f"missing argument {vertex}")
    for vertex in sorted(set(actual.nodes) - set(expected.nodes)):
        diagnostics.append(f"extra argument {vertex}")
    for source, target in sorted(set(expected.edges) - set(actual.edges)):
        diagnostics.append(f"missing edge {source}->{target}")
    for source, target in sorted(set(actual.edges) - set(expected.edges)):
        diagnostics.append(f"extra edge {source}->{target}")
    return diagnostics


def diagnose(expr: KExpr, af: AF) -> list[str]:
    return compare_graphs(evaluate(expr), af.digraph())


def validate(expr: KExpr, af: AF) -> None:
    diagnostics = diagnose(expr, af)
    if diagnostics:
        raise ValidationError(diagnostics)


def trivial_expression(af: AF) -> KExpr:
    if af.n == 0:
        raise ValidationError("A framework without arguments has no k-expression.")
    if af.self_attacking:
        raise ValidationError(f"Self-attacking arguments cannot be expressed: {', '.join(af.self_attacking)}.")
    leaves = [Initial(i + 1, name) for i, name in enumerate(af.arguments)]
    term: Term = leaves[0] if len(leaves) == 1 else Union(tuple(leaves))
    for source, target in sorted(af.attacks):
        term = EdgeIntro(source + 1, target + 1, term)
    return KExpr.from_term(term)


def _canonical(coloring: tuple[int, ...]) -> tuple[tuple[int, ...], dict[int, int]]:
    mapping: dict[int, int] = {}
    for color in coloring:
        if color not in mapping:
            mapping[color] = len(mapping) + 1
    return tuple(mapping[c] for c in coloring), mapping


def _extend_permutation(partial: dict[int, int], k: int) -> dict[int, int]:
    full = dict(partial)
    free = iter(sorted(set(range(1, k + 1)) - set(partial.values())))
    for color in range(1, k + 1):
        if color not in full:
            full[color] = next(free)
    return full


def _recolor(term: Term, perm: dict[int, int]) -> Term:
    if isinstance(term, Initial):
        return Initial(perm[term.color], term.argument)
    if isinstance(term, Union):
        return Union(tuple(_recolor(child, perm) for child in term.children))
    if isinstance(term, Relabel):
        return Relabel(perm[term.source], perm[term.target], _recolor(term.child, perm))
    return EdgeIntro(perm[term.source], perm[term.target], _recolor(term.child, perm))


class _ExhaustiveSearch:
    """Dynamic programme over (vertex set, canonical coloring) states.

    Every state's graph is the induced subgraph on its vertex set, which is
    reachable because edges between two union operands can always be added
    directly above that union. States whose classes are not uniform towards
    the vertices still outside are dropped.
    """

    def __init__(self, af: AF, k: int, budget: int, spent: list[int]) -> None:
        self.af = af
        self.k = k
        self.budget = budget
        self.spent = spent
        self.states: dict[int, dict[tuple[int, ...], tuple]] = defaultdict(dict)

    def _charge(self) -> None:
        self.spent[0] += 1
        if self.spent[0] > self.budget:
            raise ResourceLimitExceeded("search", self.budget)

    def _classes(self, mask: int, coloring: tuple[int, ...]) -> dict[int, int]:
        classes: dict[int, int] = defaultdict(int)
        for vertex, color in zip(bits(mask), coloring):
            classes[color] |= 1 << vertex
        return classes

    def _viable(self, mask: int, coloring: tuple[int, ...]) -> bool:
        outside = self.af.full_mask & ~mask
        for cls in self._classes(mask, coloring).values():
            for table in (self.af.targets, self.af.attackers):
                some, every = 0, self.af.full_mask
                for vertex in bits(cls):
                    some |= table[vertex]
                    every &= table[vertex]
                if (some ^ every) & outside:
                    return False
        return True

    def _add(self, mask: int, coloring: tuple[int, ...], derivation: tuple) -> bool:
        self._charge()
        if coloring in self.states[mask] or not self._viable(mask, coloring):
            return False
        self.states[mask][coloring] = derivation
        return True

    def _close_under_merges(self, mask: int, fresh: list[tuple[int, ...]]) -> None:
        work = list(fresh)
        while work:
            coloring = work.pop()
            used = max(coloring)
            for keep, drop in itertools.combinations(range(1, used + 1), 2):
                merged, _ = _canonical(tuple(keep if c == drop else c for c in coloring))
                if self._add(mask, merged, ("merge", coloring, keep, drop)):
                    work.append(merged)

    def _join(self, left: int, lam1, right: int, lam2, image: tuple[int, ...]):
        mask = left | right
        color_of: dict[int, int] = dict(zip(bits(left), lam1))
        color_of.update(zip(bits(right), (image[c - 1] for c in lam2)))
        classes: dict[int, int] = defaultdict(int)
        for vertex, color in color_of.items():
            classes[color] |= 1 << vertex
        pairs: set[tuple[int, int]] = set()
        for side, other in ((left, right), (right, left)):
            for u in bits(side):
                for v in bits(self.af.targets[u] & other):
                    pairs.add((color_of[u], color_of[v]))
        for source, target in pairs:
            if source == target:
                return None
            for u in bits(classes[source]):
                if classes[target] & ~self.af.targets[u]:
                    return None
        mu = tuple(color_of[v] for v in bits(mask))
        return mu, tuple(sorted(pairs))

    def run(self) -> KExpr | None:
        af = self.af
        for vertex in range(af.n):
            self._add(1 << vertex, (1,), ("leaf", vertex))
        by_size: dict[int, list[int]] = defaultdict(list)
        for mask in range(1, af.full_mask + 1):
            by_size[bin(mask).count("1")].append(mask)
        for size in range(2, af.n + 1):
            for mask in by_size[size]:
                low = mask & -mask
                rest = mask ^ low
                fresh: list[tuple[int, ...]] = []
                sub = rest
                while True:
                    left = low | sub
                    right = mask ^ left
                    if right and self.states.get(left) and self.states.get(right):
                        fresh.extend(self._unions(left, right))
                    if sub == 0:
                        break
                    sub = (sub - 1) & rest
                self._close_under_merges(mask, fresh)
        goal = self.states.get(af.full_mask)
        if not goal:
            return None
        coloring = next(iter(goal))
        return KExpr.from_term(self._build(af.full_mask, coloring))

    def _unions(self, left: int, right: int) -> list[tuple[int, ...]]:
        mask = left | right
        created = []
        for lam1 in list(self.states[left]):
            for lam2 in list(self.states[right]):
                for image in itertools.permutations(range(1, self.k + 1), max(lam2)):
                    self._charge()
                    joined = self._join(left, lam1, right, lam2, image)
                    if joined is None:
                        continue
                    mu, pairs = joined
                    canon, _ = _canonical(mu)
                    if self._add(mask, canon, ("union", left, lam1, right, lam2, image, pairs, mu)):
                        created.append(canon)
        return created

    def _build(self, mask: int, coloring: tuple[int, ...]) -> Term:
        derivation = self.states[mask][coloring]
        if derivation[0] == "leaf":
            return Initial(1, self.af.arguments[derivation[1]])
        if derivation[0] == "merge":
            _, previous, keep, drop = derivation
            term: Term = Relabel(drop, keep, self._build(mask, previous))
            merged = tuple(keep if c == drop else c for c in previous)
        else:
            _, left, lam1, right, lam2, image, pairs, merged = derivation
            inner = _extend_permutation({c: image[c - 1] for c in range(1, max(lam2) + 1)}, self.k)
            term = Union((self._build(left, lam1), _recolor(self._build(right, lam2), inner)))
            for source, target in pairs:
                term = EdgeIntro(source, target, term)
        _, mapping = _canonical(merged)
        perm = _extend_permutation(mapping, self.k)
        if any(perm[c] != c for c in perm):
            term = _recolor(term, perm)
        return term


def _greedy_expression(af: AF) -> KExpr:
    """Linear construction: add arguments one at a time, merging classes
    that look alike to every argument still to come."""
    classes: list[tuple[int, int]] = []
    term: Term | None = None
    for vertex in range(af.n):
        used = {color for color, _ in classes}
        color = next(c for c in itertools.count(1) if c not in used)
        leaf = Initial(color, af.arguments[vertex])
        term = leaf if term is None else Union((term, leaf))
        for other, members in classes:
            sample = (members & -members).bit_length() - 1
            if af.targets[vertex] >> sample & 1:
                term = EdgeIntro(color, other, term)
            if af.targets[sample] >> vertex & 1:
                term = EdgeIntro(other, color, term)
        classes.append((color, 1 << vertex))
        later = af.full_mask & ~((1 << (vertex + 1)) - 1)
        merged = True
        while merged:
            merged = False
            signatures: dict[tuple[int, int], int] = {}
            for position, (other, members) in enumerate(classes):
                sample = (members & -members).bit_length() - 1
                signature = (af.targets[sample] & later, af.attackers[sample] & later)
                if signature in signatures:
                    keep_position = signatures[signature]
                    keep_color, keep_members = classes[keep_position]
                    term = Relabel(other, keep_color, term)
                    classes[keep_position] = (keep_color, keep_members | members)
                    del classes[position]
                    merged = True
                    break
                signatures[signature] = position
    return KExpr.from_term(term)


def search_expression(af: AF, k_max: int, budget: int | None = None) -> KExpr | None:
    """Find a validating expression of width at most ``k_max``.

    Exhaustive up to ``EXHAUSTIVE_LIMIT`` arguments, greedy beyond. Running
    out of ``budget`` raises ResourceLimitExceeded, which is not the same as
    returning None (no expression of that width exists).
    """
    if af.n == 0:
        raise ValidationError("A framework without arguments has no k-expression.")
    if af.self_attacking:
        logger.warning("Self-attacks cannot be expressed: %s", ", ".join(af.self_attacking))
        return None
    budget = budget if budget is not None else settings.CWSAT_SEARCH_BUDGET
    if af.n > EXHAUSTIVE_LIMIT:
        expr = _greedy_expression(af)
        logger.info("Greedy expression has width %d", expr.width)
        return expr if expr.width <= k_max else None
    spent = [0]
    for k in range(1, k_max + 1):
        expr = _ExhaustiveSearch(af, k, budget, spent).run()
        if expr is not None:
            logger.info("Found width-%d expression after %d steps", k, spent[0])
            return expr
    return None
