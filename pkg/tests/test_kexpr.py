import pytest
from django.core.exceptions import ValidationError

from reduction.af import AF
from reduction.exceptions import ResourceLimitExceeded
from reduction.hardness import tournament_family
from reduction.kexpr import (
    KExpr,
    Op,
    annotate,
    diagnose,
    evaluate,
    parse_kexpr,
    search_expression,
    serialize,
    trivial_expression,
    validate,
)

RUNNING_TEXT = "e(1,2,u(e(2,1,u(1(u),2(r))),r(1->3,e(1,2,u(1(z),2(o))))))"


def test_nodes_are_numbered_in_level_order(running_x):
    assert len(running_x) == 11
    assert running_x.width == 3
    ops = [node.op for node in running_x.nodes]
    assert ops == [
        Op.EDGE,
        Op.UNION,
        Op.EDGE,
        Op.RELABEL,
        Op.UNION,
        Op.EDGE,
        Op.INITIAL,
        Op.INITIAL,
        Op.UNION,
        Op.INITIAL,
        Op.INITIAL,
    ]
    assert running_x.leaves == {"u": 6, "r": 7, "z": 9, "o": 10}
    assert (running_x.nodes[3].source, running_x.nodes[3].target) == (1, 3)
    assert running_x.parents[9] == 8
    assert running_x.root.children == (1,)


def test_serialize_round_trip(running_x):
    assert serialize(running_x) == RUNNING_TEXT
    assert str(parse_kexpr(RUNNING_TEXT)) == RUNNING_TEXT


def test_evaluate_builds_the_running_example(running, running_x):
    graph = evaluate(running_x)
    assert set(graph.edges) == set(running.attack_pairs())
    assert {v: graph.nodes[v]["color"] for v in graph.nodes} == {"u": 1, "r": 2, "z": 3, "o": 2}
    validate(running_x, running)
    assert diagnose(running_x, running) == []


def test_annotation(running_x):
    state = annotate(running_x)
    assert state.cols[0] == {1, 2, 3}
    assert state.cols[2] == {1, 2}
    assert state.cols[3] == {2, 3}
    assert state.cols[6] == {1}
    assert state.col("z", 5) == 1
    assert state.col("z", 3) == 3
    assert state.edge_pairs[0] == (1, 2)
    bare = annotate(running_x, with_members=False)
    assert bare.cols == state.cols
    with pytest.raises(ValueError):
        bare.col("z", 0)


def test_missing_edge_is_diagnosed(running):
    without_edge = parse_kexpr("e(1,2,u(e(2,1,u(1(u),2(r))),r(1->3,u(1(z),2(o)))))")
    assert diagnose(without_edge, running) == ["missing edge z->o"]
    with pytest.raises(ValidationError):
        validate(without_edge, running)


def test_extra_argument_is_diagnosed(running):
    expr = parse_kexpr("u(1(z),2(o),3(u),4(r),5(w))")
    problems = diagnose(expr, running)
    assert "extra argument w" in problems
    assert "missing edge u->r" in problems


@pytest.mark.parametrize(
    "text",
    [
        "e(1,2,1(a)",
        "0(a)",
        "u(1(a))",
        "u(1(a),2(a))",
        "e(1,1,1(a))",
        "r(1,2,1(a))",
        "x(1(a))",
        "1(a) 2(b)",
        "1(a$)",
    ],
)
def test_syntax_errors(text):
    with pytest.raises(ValidationError):
        parse_kexpr(text)


def test_comment_lines_are_skipped():
    expr = parse_kexpr("% generated\n% width 2\ne(1,2,u(1(a),2(b)))\n")
    assert expr.width == 2


def test_relabel_to_same_color_is_allowed():
    expr = parse_kexpr("r(1->1,1(a))")
    assert evaluate(expr).number_of_nodes() == 1


def test_trivial_expression(running):
    expr = trivial_expression(running)
    validate(expr, running)
    assert expr.width == running.n


def test_trivial_expression_rejects_self_attacks():
    with pytest.raises(ValidationError):
        trivial_expression(AF.from_names(["a"], [("a", "a")]))


def test_search_finds_width_two_for_symmetric_triangle(triangle):
    af, _ = triangle
    expr = search_expression(af, 2)
    assert expr is not None
    assert expr.width <= 2
    validate(expr, af)


def test_search_reports_none_below_the_width_of_a_directed_cycle(cycle):
    af, _ = cycle
    assert search_expression(af, 2) is None
    expr = search_expression(af, 3)
    assert expr is not None
    validate(expr, af)


def test_search_is_deterministic(running):
    first = search_expression(running, 3)
    second = search_expression(running, 3)
    assert first is not None
    assert serialize(first) == serialize(second)
    validate(first, running)


def test_search_budget(running):
    with pytest.raises(ResourceLimitExceeded):
        search_expression(running, 3, budget=1)


def test_search_budget_from_settings(settings, running):
    settings.CWSAT_SEARCH_BUDGET = 1
    with pytest.raises(ResourceLimitExceeded):
        search_expression(running, 3)


def test_greedy_search_on_larger_frameworks():
    af, _ = tournament_family(12)
    expr = search_expression(af, af.n)
    assert expr is not None
    validate(expr, af)


def test_self_attacks_cannot_be_searched():
    assert search_expression(AF.from_names(["a"], [("a", "a")]), 2) is None


def test_deep_expressions_do_not_recurse():
    af, expr = tournament_family(400)
    text = serialize(expr)
    again = parse_kexpr(text)
    graph = evaluate(again)
    assert graph.number_of_edges() == 400 * 399 // 2
    assert again.width == 2
    assert isinstance(KExpr.from_term(again.to_term()), KExpr)
    assert annotate(again).cols[0] == {1}
