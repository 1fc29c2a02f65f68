import itertools

import pytest
from django.core.exceptions import ValidationError

from reduction.af import AF, AcceptanceMode, Semantics, enumerate_extensions
from reduction.encoders import (
    ENCODERS,
    assert_acceptance,
    dnf_convert,
    encode,
    encode_admissible,
    encode_conflict_free,
    encode_stable,
    to_dnf_matrix,
)
from reduction.formula import (
    DNF,
    Provenance,
    Qbf2,
    VarKey,
    VarKind,
    evaluate_items,
    literal_names,
    tag_rank,
    write_dimacs,
    write_provenance,
)
from reduction.hardness import random_threecnf
from reduction.kexpr import parse_kexpr
from reduction.solver import check_2qbf, extensions_of
from reduction.witness import build_dnf_witness, verify_witness
from tests.conftest import WORKED_EXAMPLES, cnf_of, fixture_path, incidence_expression, inner_block, load_pair

ALL_SEMANTICS = list(Semantics)


def clauses_tagged(enc, node, tag):
    cnf = enc.witness_cnf()
    return [
        literal_names(enc.table, clause)
        for clause, p in zip(cnf.clauses, cnf.provenance)
        if p == Provenance(node, tag)
    ]


def test_every_semantics_has_an_encoder():
    assert set(ENCODERS) == set(Semantics)


def test_extension_variables_come_first(running, running_x):
    enc = encode_conflict_free(running, running_x)
    assert enc.extension_vars == {"z": 1, "o": 2, "u": 3, "r": 4}
    assert not enc.second_level
    assert enc.formula is enc.cnf


@pytest.mark.parametrize("sigma", ALL_SEMANTICS)
def test_every_clause_has_provenance(running, running_x, sigma):
    enc = encode(running, running_x, sigma)
    assert len(enc.provenance) == len(enc.witness_cnf().clauses)
    for p in enc.provenance:
        tag_rank(p.tag)
        assert 0 <= p.node < len(running_x)


def test_leaf_links_argument_to_its_color(running, running_x):
    enc = encode_conflict_free(running, running_x)
    assert clauses_tagged(enc, 6, "1") == [{"-e_1^6", "e_u"}, {"e_1^6", "-e_u"}]


def test_edge_forbids_both_colors(running, running_x):
    enc = encode_conflict_free(running, running_x)
    assert {"-e_1^0", "-e_2^0"} in clauses_tagged(enc, 0, "4")


def test_stable_asserts_every_root_color(running, running_x):
    enc = encode_stable(running, running_x)
    assert clauses_tagged(enc, 0, "9") == [{"d_1^0"}, {"d_2^0"}, {"d_3^0"}]


def test_admissible_forbids_undefeated_attackers(running, running_x):
    enc = encode_admissible(running, running_x)
    assert clauses_tagged(enc, 0, "15") == [{"-a_1^0"}, {"-a_2^0"}, {"-a_3^0"}]


def test_edge_copies_and_forbids(running, running_x):
    enc = encode_conflict_free(running, running_x)
    assert clauses_tagged(enc, 5, "4") == [
        {"-e_1^5", "e_1^8"},
        {"e_1^5", "-e_1^8"},
        {"-e_2^5", "e_2^8"},
        {"e_2^5", "-e_2^8"},
        {"-e_1^5", "-e_2^5"},
    ]
    assert clauses_tagged(enc, 9, "1") == [{"-e_1^9", "e_z"}, {"e_1^9", "-e_z"}]


def test_relabel_and_union_gates(running, running_x):
    enc = encode_stable(running, running_x)
    assert clauses_tagged(enc, 3, "3") == [
        {"-e_2^3", "e_2^5"},
        {"e_2^3", "-e_2^5"},
        {"-e_3^3", "e_1^5"},
        {"e_3^3", "-e_1^5"},
    ]
    assert clauses_tagged(enc, 3, "7") == [
        {"-d_2^3", "d_2^5"},
        {"d_2^3", "-d_2^5"},
        {"-d_3^3", "d_1^5"},
        {"d_3^3", "-d_1^5"},
    ]
    assert clauses_tagged(enc, 8, "2") == [
        {"-e_1^8", "e_1^9"},
        {"e_1^8", "-e_1^9"},
        {"-e_2^8", "e_2^10"},
        {"e_2^8", "-e_2^10"},
    ]
    assert clauses_tagged(enc, 8, "6") == [
        {"-d_1^8", "d_1^9"},
        {"d_1^8", "-d_1^9"},
        {"-d_2^8", "d_2^10"},
        {"d_2^8", "-d_2^10"},
    ]


def test_edge_defeats_the_target_color(running, running_x):
    enc = encode_stable(running, running_x)
    assert clauses_tagged(enc, 5, "8") == [
        {"-d_1^5", "d_1^8"},
        {"d_1^5", "-d_1^8"},
        {"-d_2^5", "d_2^8", "e_1^5"},
        {"d_2^5", "-d_2^8"},
        {"d_2^5", "-e_1^5"},
    ]


def test_edge_updates_attackers(running, running_x):
    enc = encode_admissible(running, running_x)
    assert clauses_tagged(enc, 5, "13") == [
        {"-a_1^5", "a_1^8", "e_2^5"},
        {"-a_1^5", "a_1^8", "-d_1^5"},
        {"a_1^5", "-a_1^8"},
        {"a_1^5", "-e_2^5", "d_1^5"},
    ]
    assert clauses_tagged(enc, 5, "14") == [
        {"-a_2^5", "a_2^8"},
        {"-a_2^5", "-e_1^5"},
        {"a_2^5", "-a_2^8", "e_1^5"},
    ]


def test_edge_updates_out_colors(running, running_x):
    enc = encode(running, running_x, Semantics.COMPLETE)
    assert clauses_tagged(enc, 5, "19") == [
        {"-o_1^5", "o_1^8"},
        {"-o_1^5", "-e_2^5"},
        {"o_1^5", "-o_1^8", "e_2^5"},
    ]
    assert clauses_tagged(enc, 5, "20") == [
        {"-o_2^5", "o_2^8"},
        {"-o_2^5", "-e_1^5"},
        {"-o_2^5", "d_1^5", "dge_1^5"},
        {"o_2^5", "-o_2^8", "e_1^5", "-d_1^5"},
        {"o_2^5", "-o_2^8", "e_1^5", "-dge_1^5"},
    ]


def test_preferred_leaf_compares_both_copies(running, running_x):
    enc = encode(running, running_x, Semantics.PREFERRED)
    assert clauses_tagged(enc, 9, "26") == [
        {"-s_1^9", "e*_1^9"},
        {"-s_1^9", "-e_1^9"},
        {"s_1^9", "-e*_1^9", "e_1^9"},
    ]
    assert clauses_tagged(enc, 9, "30") == [{"-e_1^9", "e*_1^9"}]


def test_stable_dimacs_and_provenance_are_stable():
    af, x = load_pair("edge.apx", "edge.kx")
    enc = encode_stable(af, x)
    with open(fixture_path("edge_stb.cnf")) as fh:
        assert write_dimacs(enc.cnf) == fh.read()
    with open(fixture_path("edge_stb.prov")) as fh:
        assert write_provenance(enc.provenance) == fh.read()
    assert extensions_of(enc) == [frozenset({"a"})]


def test_self_attacks_are_refused():
    af = AF.from_names(["a"], [("a", "a")])
    with pytest.raises(ValidationError):
        encode_conflict_free(af, parse_kexpr("1(a)"))


def test_expression_must_match(running):
    _, other = load_pair(*WORKED_EXAMPLES["triangle"])
    with pytest.raises(ValidationError):
        encode_admissible(running, other)


@pytest.mark.parametrize("example", WORKED_EXAMPLES)
@pytest.mark.parametrize("sigma", ALL_SEMANTICS)
def test_models_are_the_extensions(example, sigma):
    af, x = load_pair(*WORKED_EXAMPLES[example])
    found = extensions_of(encode(af, x, sigma))
    assert len(found) == len(set(found))
    assert set(found) == set(enumerate_extensions(af, sigma))


def test_semantics_inclusions(running, running_x):
    def extensions(sigma):
        return set(extensions_of(encode(running, running_x, sigma)))

    assert extensions(Semantics.STABLE) <= extensions(Semantics.COMPLETE)
    assert extensions(Semantics.COMPLETE) <= extensions(Semantics.ADMISSIBLE)
    assert extensions(Semantics.PREFERRED) <= extensions(Semantics.COMPLETE)
    assert extensions(Semantics.ADMISSIBLE) <= extensions(Semantics.CONFLICT_FREE)


@pytest.mark.parametrize("sigma", [Semantics.PREFERRED, Semantics.SEMI_STABLE, Semantics.STAGE])
def test_second_level_blocks(running, running_x, sigma):
    enc = encode(running, running_x, sigma)
    assert enc.second_level
    q = enc.qbf()
    assert set(enc.extension_vars.values()) <= set(q.free)
    starred = {enc.table.get(VarKey(VarKind.EXT_ARG, label=a, starred=True)) for a in running.arguments}
    assert starred <= set(q.inner)
    assert set(q.free) | set(q.inner) == set(range(1, len(enc.table) + 1))
    assert q.cnf is enc.cnf
    assert len(q.dnf.cubes) == len(enc.inner.clauses)


def test_first_level_has_no_quantified_form(running, running_x):
    with pytest.raises(ValueError):
        encode_stable(running, running_x).qbf()


def test_credulous_acceptance_adds_a_unit(running, running_x):
    enc = encode_admissible(running, running_x)
    accepted = assert_acceptance(enc, "z", AcceptanceMode.CREDULOUS)
    assert accepted.cnf.clauses[-1] == (1,)
    assert accepted.cnf.provenance[-1] == Provenance(running_x.leaves["z"], "acc")
    assert not accepted.negate_answer
    assert len(enc.cnf.clauses) + 1 == len(accepted.cnf.clauses)


def test_skeptical_acceptance_flips_the_answer(running, running_x):
    enc = encode_stable(running, running_x)
    asked = assert_acceptance(enc, "o", AcceptanceMode.SKEPTICAL)
    assert asked.cnf.clauses[-1] == (-2,)
    assert asked.negate_answer


def test_acceptance_of_unknown_argument(running, running_x):
    with pytest.raises(ValidationError):
        assert_acceptance(encode_stable(running, running_x), "w", AcceptanceMode.CREDULOUS)


def test_single_clause_conversion():
    f = cnf_of(1, [(1,)])
    converted = dnf_convert(f, parse_kexpr("e(2,1,u(1(x1),2(k0)))"))
    q = inner_block(converted, 1)
    assert check_2qbf(q, {1: True})
    assert not check_2qbf(q, {1: False})
    assert converted.provenance[-1] == Provenance(0, "dnf-root")


def test_empty_cnf_converts_to_true():
    converted = dnf_convert(cnf_of(2, []), None)
    assert converted.cubes == [()]


def test_conversion_needs_a_matching_expression():
    f = cnf_of(1, [(1,)])
    with pytest.raises(ValidationError):
        dnf_convert(f, parse_kexpr("e(1,2,u(1(x1),2(k0)))"))
    with pytest.raises(ValidationError):
        dnf_convert(f, None)


@pytest.mark.parametrize("seed", range(8))
def test_conversion_preserves_models(seed):
    num_vars = 2 + seed % 3
    phi = random_threecnf(num_vars, 1 + seed % 4, seed)
    f = cnf_of(num_vars, phi.clauses)
    x_cnf = incidence_expression(f)
    converted = dnf_convert(f, x_cnf)
    q = inner_block(converted, num_vars)
    for bits in itertools.product((False, True), repeat=num_vars):
        assignment = dict(enumerate(bits, start=1))
        assert check_2qbf(q, assignment) == evaluate_items(f.clauses, assignment, conjunctive=True)
    witness = build_dnf_witness(converted, x_cnf, num_vars)
    assert verify_witness(witness, converted).ok
    assert witness.colors_used <= 6 * x_cnf.width + 4


def test_cnf_part_folds_into_the_dnf():
    f = cnf_of(2, [(1,)])
    table = f.table
    q = Qbf2(table, (1,), (2,), f, DNF(table, [(2,), (-2,)]))
    folded = to_dnf_matrix(q, parse_kexpr("e(2,1,u(1(x1),2(k0),3(x2)))"))
    assert not folded.cnf.clauses
    assert folded.free == (1,)
    assert folded.inner[0] == 2
    assert set(folded.inner) == set(range(2, len(folded.table) + 1))
    assert check_2qbf(folded, {1: True})
    assert not check_2qbf(folded, {1: False})
