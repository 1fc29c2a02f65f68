"""Argumentation frameworks, their exchange formats and the brute-force oracle.

The oracle works on integer bitmasks over argument indices (bit ``i`` is the
``i``-th declared argument) and is the ground truth every encoding is tested
against. Public functions take and return extensions as frozensets of names.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

import networkx as nx
from django.conf import settings
from django.core.exceptions import ValidationError
from django.db import models

from reduction.exceptions import ResourceLimitExceeded

logger = logging.getLogger(__name__)

NAME_PATTERN = re.compile(r"^[A-Za-z0-9_]+$")
FACT_PATTERN = re.compile(r"\s*(?P<predicate>\w+)\s*\((?P<args>[^()]*)\)\s*\.")

Extension = frozenset


class Semantics(models.TextChoices):
    CONFLICT_FREE = "cf", "conflict-free"
    ADMISSIBLE = "adm", "admissible"
    COMPLETE = "com", "complete"
    STABLE = "stb", "stable"
    PREFERRED = "prf", "preferred"
    SEMI_STABLE = "sst", "semi-stable"
    STAGE = "stg", "stage"

    @property
    def second_level(self) -> bool:
        return self in (Semantics.PREFERRED, Semantics.SEMI_STABLE, Semantics.STAGE)


class AcceptanceMode(models.TextChoices):
    CREDULOUS = "cred", "credulous"
    SKEPTICAL = "skept", "skeptical"


@dataclass(frozen=True)
class AF:
    arguments: tuple[str, ...]
    attacks: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if len(set(self.arguments)) != len(self.arguments):
            raise ValidationError("Duplicate argument declaration.")
        for name in self.arguments:
            if not NAME_PATTERN.match(name):
                raise ValidationError(f"Invalid argument name {name!r}.")
        n = len(self.arguments)
        for source, target in self.attacks:
            if not (0 <= source < n and 0 <= target < n):
                raise ValidationError(f"Attack ({source}, {target}) references an unknown argument.")

    @classmethod
    def from_names(cls, arguments: Iterable[str], attacks: Iterable[tuple[str, str]]) -> AF:
        arguments = tuple(arguments)
        index = {name: i for i, name in enumerate(arguments)}
        pairs = set()
        for source, target in attacks:
            if source not in index or target not in index:
                missing = source if source not in index else target
                raise ValidationError(f"Attack ({source}, {target}) references undeclared argument {missing!r}.")
            pairs.add((index[source], index[target]))
        return cls(arguments, frozenset(pairs))

    @property
    def n(self) -> int:
        return len(self.arguments)

    @cached_property
    def index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.arguments)}

    @cached_property
    def targets(self) -> tuple[int, ...]:
        """Bitmask of the arguments each argument attacks."""
        masks = [0] * self.n
        for source, target in self.attacks:
            masks[source] |= 1 << target
        return tuple(masks)

    @cached_property
    def attackers(self) -> tuple[int, ...]:
        masks = [0] * self.n
        for source, target in self.attacks:
            masks[target] |= 1 << source
        return tuple(masks)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @property
    def self_attacking(self) -> list[str]:
        return [self.arguments[s] for s, t in sorted(self.attacks) if s == t]

    def attack_pairs(self) -> list[tuple[str, str]]:
        return [(self.arguments[s], self.arguments[t]) for s, t in sorted(self.attacks)]

    def digraph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.arguments)
        graph.add_edges_from(self.attack_pairs())
        return graph

    def mask(self, members: Iterable[str]) -> int:
        result = 0
        for name in members:
            try:
                result |= 1 << self.index[name]
            except KeyError as exc:
                raise ValidationError(f"Unknown argument {name!r}.") from exc
        return result

    def members(self, mask: int) -> Extension:
        return frozenset(self.arguments[i] for i in bits(mask))


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _decode(text: bytes | str) -> str:
    if isinstance(text, bytes):
        try:
            return text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ValidationError("Input is not valid UTF-8.") from exc
    return text


def parse_apx(text: bytes | str) -> AF:
    body = "\n".join(re.sub(r"%.*", "", line) for line in _decode(text).splitlines())
    arguments: list[str] = []
    declared: set[str] = set()
    attacks: list[tuple[str, str]] = []
    pos = 0
    while True:
        match = FACT_PATTERN.match(body, pos)
        if match is None:
            break
        pos = match.end()
        predicate = match.group("predicate")
        params = [p.strip() for p in match.group("args").split(",")]
        if any(not NAME_PATTERN.match(p) for p in params):
            raise ValidationError(f"Malformed fact {match.group(0).strip()!r}.")
        if predicate == "arg" and len(params) == 1:
            if params[0] in declared:
                raise ValidationError(f"Duplicate argument declaration {params[0]!r}.")
            declared.add(params[0])
            arguments.append(params[0])
        elif predicate == "att" and len(params) == 2:
            attacks.append((params[0], params[1]))
        else:
            raise ValidationError(f"Malformed fact {match.group(0).strip()!r}.")
    rest = body[pos:].strip()
    if rest:
        raise ValidationError(f"Malformed fact near {rest[:30]!r}.")
    af = AF.from_names(arguments, attacks)
    logger.debug("Parsed APX framework with %d arguments and %d attacks", af.n, len(af.attacks))
    return af


def parse_tgf(text: bytes | str) -> AF:
    arguments: list[str] = []
    attacks: list[tuple[str, str]] = []
    in_edges = False
    for lineno, line in enumerate(_decode(text).splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        if tokens[0] == "#":
            in_edges = True
            continue
        if not in_edges:
            if tokens[0] in arguments:
                raise ValidationError(f"Duplicate node {tokens[0]!r} on line {lineno}.")
            arguments.append(tokens[0])
        elif len(tokens) < 2:
            raise ValidationError(f"Malformed edge on line {lineno}.")
        else:
            attacks.append((tokens[0], tokens[1]))
    return AF.from_names(arguments, attacks)


def read_af(path, text: bytes | str) -> AF:
    """Parse by file extension; ``.tgf`` is TGF, everything else APX."""
    if str(path).lower().endswith(".tgf"):
        return parse_tgf(text)
    return parse_apx(text)


def to_apx(af: AF) -> str:
    lines = [f"arg({name})." for name in af.arguments]
    lines += [f"att({source},{target})." for source, target in af.attack_pairs()]
    return "\n".join(lines) + "\n"


def _attacked_by(af: AF, mask: int) -> int:
    result = 0
    for i in bits(mask):
        result |= af.targets[i]
    return result


def _conflict_free(af: AF, mask: int) -> bool:
    return all(not af.targets[i] & mask for i in bits(mask))


def _range(af: AF, mask: int) -> int:
    return mask | _attacked_by(af, mask)


def _defended(af: AF, mask: int) -> int:
    attacked = _attacked_by(af, mask)
    result = 0
    for a in range(af.n):
        if not af.attackers[a] & ~attacked:
            result |= 1 << a
    return result


def _admissible(af: AF, mask: int) -> bool:
    return _conflict_free(af, mask) and not mask & ~_defended(af, mask)


def _holds(af: AF, mask: int, sigma: Semantics) -> bool:
    """Membership for the semantics decidable from the set alone."""
    if sigma == Semantics.CONFLICT_FREE:
        return _conflict_free(af, mask)
    if sigma == Semantics.ADMISSIBLE:
        return _admissible(af, mask)
    if sigma == Semantics.COMPLETE:
        return _conflict_free(af, mask) and _defended(af, mask) == mask
    if sigma == Semantics.STABLE:
        return _conflict_free(af, mask) and _range(af, mask) == af.full_mask
    raise ValueError(sigma)


def _strict_supersets(af: AF, mask: int) -> Iterator[int]:
    rest = af.full_mask & ~mask
    sub = rest
    while sub:
        yield mask | sub
        sub = (sub - 1) & rest


def defended_set(af: AF, s: Iterable[str]) -> Extension:
    return af.members(_defended(af, af.mask(s)))


def range_of(af: AF, s: Iterable[str]) -> Extension:
    return af.members(_range(af, af.mask(s)))


def check(af: AF, s: Iterable[str], sigma: Semantics) -> bool:
    sigma = Semantics(sigma)
    mask = af.mask(s)
    if not sigma.second_level:
        return _holds(af, mask, sigma)
    if sigma == Semantics.PREFERRED:
        return _admissible(af, mask) and not any(
            _admissible(af, other) for other in _strict_supersets(af, mask)
        )
    base = Semantics.ADMISSIBLE if sigma == Semantics.SEMI_STABLE else Semantics.CONFLICT_FREE
    if not _holds(af, mask, base):
        return False
    reach = _range(af, mask)
    return not any(
        _holds(af, other, base) and _range(af, other) & reach == reach and _range(af, other) != reach
        for other in range(af.full_mask + 1)
    )


def _maximal(masks: list[int], key) -> list[int]:
    keys = [key(m) for m in masks]
    return [
        m
        for m, k in zip(masks, keys)
        if not any(other & k == k and other != k for other in keys)
    ]


def enumerate_masks(af: AF, sigma: Semantics, limit: int | None = None) -> list[int]:
    sigma = Semantics(sigma)
    limit = limit if limit is not None else settings.CWSAT_ORACLE_LIMIT
    if af.n > limit:
        raise ResourceLimitExceeded("oracle", limit)
    if not sigma.second_level:
        return [m for m in range(af.full_mask + 1) if _holds(af, m, sigma)]
    if sigma == Semantics.STAGE:
        candidates = [m for m in range(af.full_mask + 1) if _conflict_free(af, m)]
    else:
        candidates = [m for m in range(af.full_mask + 1) if _admissible(af, m)]
    if sigma == Semantics.PREFERRED:
        return _maximal(candidates, lambda m: m)
    return _maximal(candidates, lambda m: _range(af, m))


def enumerate_extensions(af: AF, sigma: Semantics, limit: int | None = None) -> list[Extension]:
    """All extensions, ascending by bitmask over declaration order."""
    return [af.members(m) for m in enumerate_masks(af, sigma, limit)]


def oracle_accept(af: AF, sigma: Semantics, argument: str, mode: AcceptanceMode) -> bool:
    if argument not in af.index:
        raise ValidationError(f"Unknown argument {argument!r}.")
    extensions = enumerate_extensions(af, sigma)
    if AcceptanceMode(mode) == AcceptanceMode.CREDULOUS:
        return any(argument in ext for ext in extensions)
    return all(argument in ext for ext in extensions)
