from __future__ import annotations

from pathlib import Path

import pytest

from reduction.af import AF, parse_apx
from reduction.formula import CNF, DNF, Qbf2, VarKey, VarKind, VarTable, incidence_digraph
from reduction.kexpr import KExpr, parse_kexpr, trivial_expression

FIXTURES = Path(__file__).resolve().parent.parent / "reduction" / "fixtures"


def fixture_path(name: str) -> str:
    return str(FIXTURES / name)


def load_pair(af_name: str, expr_name: str) -> tuple[AF, KExpr]:
    af = parse_apx((FIXTURES / af_name).read_bytes())
    return af, parse_kexpr((FIXTURES / expr_name).read_bytes())


def cnf_of(num_vars: int, clauses) -> CNF:
    table = VarTable()
    for var in range(1, num_vars + 1):
        table.id_of(VarKey(VarKind.INPUT, label=f"x{var}"))
    return CNF(table, [tuple(clause) for clause in clauses])


def incidence_expression(f) -> KExpr:
    graph = incidence_digraph(f)
    return trivial_expression(AF.from_names(list(graph.nodes), list(graph.edges)))


def inner_block(converted: DNF, inputs: int) -> Qbf2:
    """The converted DNF as the universal block over its auxiliary variables."""
    table = converted.table
    free = tuple(range(1, inputs + 1))
    aux = tuple(range(inputs + 1, len(table) + 1))
    return Qbf2(table, free, aux, CNF(table, []), converted)


@pytest.fixture
def running() -> AF:
    return load_pair("running.apx", "running.kx")[0]


@pytest.fixture
def running_x() -> KExpr:
    return load_pair("running.apx", "running.kx")[1]


@pytest.fixture
def triangle() -> tuple[AF, KExpr]:
    return load_pair("triangle.apx", "triangle.kx")


@pytest.fixture
def cycle() -> tuple[AF, KExpr]:
    return load_pair("cycle.apx", "cycle.kx")


WORKED_EXAMPLES = {
    "running": ("running.apx", "running.kx"),
    "triangle": ("triangle.apx", "triangle.kx"),
    "cycle": ("cycle.apx", "cycle.kx"),
}

# Extension counts per semantics, from the definitions.
EXPECTED_COUNTS = {
    "running": {"cf": 8, "adm": 6, "com": 3, "stb": 2, "prf": 2, "sst": 2, "stg": 2},
    "triangle": {"cf": 4, "adm": 4, "com": 4, "stb": 3, "prf": 3, "sst": 3, "stg": 3},
    "cycle": {"cf": 4, "adm": 1, "com": 1, "stb": 0, "prf": 1, "sst": 1, "stg": 3},
}
