from __future__ import annotations

import itertools
import logging

import pytest

from corpus import PSI_BATTERY, cycle_graph, decision_corpus, fixture_matroids, k3, k4
from matfol.errors import BudgetExceeded, FormulaSyntaxError, LocalityViolation, ScopeError
from matfol.matroid import GraphicMatroid, UniformMatroid
from matfol.logic import (
    And,
    Circ,
    Indep,
    Not,
    Scattered,
    bls_decision,
    circuit_reduce,
    decide_bls,
    decide_sentence,
    eval_bruteforce,
    eval_local,
    expand_scattered,
    format_formula,
    format_sentence,
    free_vars,
    locality_radius,
    parse,
    parse_local,
    quantifier_depth,
    substitute,
)
from matfol.logic.ast import walk
from matfol.logic.semantics import gaifman_for

U23_TEXT = "exists a . exists b . exists c . indep(a,b) & indep(a,c) & indep(b,c) & !indep(a,b,c)"


# -- parsing ---------------------------------------------------------------------------------


def test_parse_examples():
    s = parse(U23_TEXT)
    assert s.is_raw and s.depth == 3
    b = parse("scattered(k=1, r=0) { circ1(x) }")
    (leaf,) = list(b.leaves())
    assert (leaf.k, leaf.r) == (1, 0)
    assert leaf.psi == Circ(("x",))
    with pytest.raises(FormulaSyntaxError):
        parse("scattered(k=2, r=1) { exists y in ball(x,1) . circ(x,y,?) }")


def test_syntax_error_reports_position_and_expectation():
    with pytest.raises(FormulaSyntaxError) as exc:
        parse("exists a . indep(a,")
    assert exc.value.position == len("exists a . indep(a,")
    assert exc.value.expected
    with pytest.raises(SyntaxError):
        parse("circ2(a)")


def test_scope_and_locality_errors():
    with pytest.raises(ScopeError):
        parse("exists a . indep(a,b)")
    with pytest.raises(ScopeError):
        parse("scattered(k=1, r=1) { exists y in ball(z,1) . y = x }")
    with pytest.raises(LocalityViolation):
        parse("scattered(k=1, r=1) { exists y in ball(x,2) . y = x }")
    with pytest.raises(LocalityViolation):
        parse("scattered(k=1, r=2) { exists y in ball(x,1) . exists z in ball(y,2) . z = x }")
    with pytest.raises(LocalityViolation):
        parse("scattered(k=1, r=1) { exists y . y = x }")
    with pytest.raises(LocalityViolation):
        parse("scattered(k=1, r=1) { exists y in ball(x,1) . dist(x,y) <= 2 }")
    parse("scattered(k=1, r=2) { exists y in ball(x,1) . exists z in ball(y,1) . z = x }")
    with pytest.raises(LocalityViolation):
        parse_local("exists y in ball(x,2) . y = x", r=1)


def test_precedence_and_quantifier_scope():
    f = parse("exists a . circ1(a) | !circ1(a) & true").formula
    assert format_formula(f) == "exists a . circ1(a) | !circ1(a) & true"
    g = parse("(exists a . circ1(a)) | true").formula
    assert format_formula(g) == "(exists a . circ1(a)) | true"


@pytest.mark.parametrize("text", [U23_TEXT] + [f"scattered(k=2, r=2) {{ {p} }}" for p in PSI_BATTERY])
def test_round_trip(text):
    s = parse(text)
    again = parse(format_sentence(s))
    assert again == s
    assert again.depth == s.depth


def test_round_trip_of_sentence_files(fixture_path):
    for name in ("u23_sentence.txt", "has_loop.txt", "combo.txt"):
        s = parse(open(fixture_path(name)).read())
        assert parse(format_sentence(s)) == s


def test_quantifier_depth_counts_scattered_witnesses():
    assert parse("scattered(k=2, r=1) { exists y in ball(x,1) . circ2(x,y) }").depth == 3
    assert parse("true").depth == 0


def test_substitution_avoids_capture():
    body = parse_local("exists y in ball(x,1) . circ2(x,y)")
    renamed = substitute(body, "x", "y")
    assert renamed.var != "y"
    assert free_vars(renamed) == {"y"}
    assert renamed.body == Circ(("y", renamed.var))


# -- circuit reduction ----------------------------------------------------------------------


def test_circuit_reduce_examples():
    assert circuit_reduce(Indep(("a",))) == Not(Circ(("a",)))
    assert circuit_reduce(Indep(("a", "b"))) == And(
        (Not(Circ(("a",))), Not(Circ(("b",))), Not(Circ(("a", "b"))))
    )
    s = parse(U23_TEXT)
    r = circuit_reduce(s)
    assert not any(isinstance(n, Indep) for n in _nodes(r.formula))
    assert eval_bruteforce(r, k3()) == eval_bruteforce(s, k3()) is True


def _nodes(f):
    return list(walk(f))


SENTENCES = [
    U23_TEXT,
    "exists a . exists b . indep(a,b) & !(a = b)",
    "forall a . indep(a) | exists b . circ2(a,b)",
    "exists a . forall b . a = b | indep(a,b)",
    "scattered(k=2, r=1) { indep(x) & exists y in ball(x,1) . circ3(x,y,y) | circ2(x,x) }",
]


@pytest.mark.parametrize("text", SENTENCES)
@pytest.mark.parametrize("name", ["U23", "U33", "MK3", "MK4", "loopy", "c2tri", "bin3x5"])
def test_circuit_reduce_preserves_truth(text, name):
    m = fixture_matroids()[name]
    s = parse(text)
    assert eval_bruteforce(circuit_reduce(s), m, s.depth) == eval_bruteforce(s, m)


# -- brute-force semantics ---------------------------------------------------------------------


def test_eval_examples():
    s = parse(U23_TEXT)
    assert eval_bruteforce(s, UniformMatroid(2, 3)) is True
    assert eval_bruteforce(s, UniformMatroid(3, 3)) is False
    one = parse("scattered(k=1, r=0) { true }")
    for name in ("MK3", "U13", "R10"):
        assert eval_bruteforce(one, fixture_matroids()[name]) is True
    two = parse("scattered(k=2, r=0) { true }")
    assert eval_bruteforce(two, k3(), 3) is True


def test_circ_atom_with_repeated_values():
    m = fixture_matroids()["loopy"]
    assert eval_bruteforce(parse("exists a . circ1(a)"), m)
    assert not eval_bruteforce(parse("exists a . circ2(a,a)"), m)
    assert eval_bruteforce(parse("exists a . exists b . circ2(a,b)"), m)


def test_distance_atoms_use_the_gaifman_graph():
    m = GraphicMatroid(cycle_graph(5))
    far = parse("exists a . exists b . !dist(a,b) <= 1")
    assert eval_bruteforce(far, m, 4) is True
    assert eval_bruteforce(far, m, 5) is False


def test_eval_budget():
    with pytest.raises(BudgetExceeded):
        eval_bruteforce(parse(U23_TEXT), fixture_matroids()["R10"], budget=100)


@pytest.mark.parametrize("text", PSI_BATTERY)
@pytest.mark.parametrize("name", ["MK4", "loopy", "strip7", "bowtie4", "c2tri", "sum1"])
@pytest.mark.parametrize("d", [2, 3])
def test_eval_local_matches_full_evaluation(text, name, d):
    m = decision_corpus()[name]
    psi = parse_local(text)
    g = gaifman_for(m, d)
    for x in m.elements:
        full = eval_bruteforce(psi, m, d, g=g, env={"x": x})
        assert eval_local(psi, x, m, g) == full


def test_eval_local_examples():
    m = fixture_matroids()["loopy"]
    g = gaifman_for(m, 3)
    psi = parse_local("circ1(x)")
    for x in m.elements:
        assert eval_local(psi, x, m, g) == (m.rank([x]) == 0)
    tri = parse_local("exists y in ball(x,1) . exists z in ball(x,1) . circ3(x,y,z)")
    gk3 = gaifman_for(k3(), 3)
    assert all(eval_local(tri, x, k3(), gk3) for x in k3().elements)
    eq = parse_local("x = x & !circ1(x)")
    assert all(eval_local(eq, x, k4(), gaifman_for(k4(), 3), r=0) for x in k4().elements)


# -- the locality pipeline ------------------------------------------------------------------------


def test_decide_examples():
    combo = parse(
        "scattered(k=1, r=0) { true } & !scattered(k=1, r=0) { circ1(x) }"
    )
    trace = []
    assert decide_sentence(combo, k3(), trace=trace) is True
    assert len(trace) == 2
    assert decide_sentence(parse(U23_TEXT), k4()) is True
    empty = UniformMatroid(0, 0)
    assert decide_sentence(parse("scattered(k=1, r=1) { true }"), empty) is False
    assert decide_bls(parse("scattered(k=1, r=1) { true }").formula, k3(), 3) is True
    for k in (1, 2, 3):
        b = Scattered(k, 1, parse_local("false"))
        assert decide_bls(b, k4(), 3) is False


def test_raw_subformula_logs_a_warning(caplog):
    with caplog.at_level(logging.WARNING, logger="matfol"):
        decide_sentence(parse(U23_TEXT), k3())
    assert any("exhaustively" in r.message for r in caplog.records)


@pytest.mark.parametrize("name", ["strip7", "bowtie4", "C12", "MK4", "loopy", "R10"])
@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("r", [0, 1, 2])
def test_decide_bls_matches_expanded_sentence(name, k, r):
    m = decision_corpus()[name]
    for text in PSI_BATTERY:
        psi = parse_local(text)
        if locality_radius(psi) > r:
            continue
        b = Scattered(k, r, psi)
        for d in (2, 3):
            expected = eval_bruteforce(expand_scattered(b), m, d)
            assert decide_bls(b, m, d) == expected


def test_pipeline_records_its_intermediate_sets():
    m = decision_corpus()["C12"]
    b = Scattered(3, 1, parse_local("true"))
    out = bls_decision(b, m, 2)
    assert out.x_psi == m.elements
    assert out.verdict is True and out.decided_by == "greedy"
    # with d = 12 the Gaifman graph is complete, so one greedy pick covers everything
    b = Scattered(2, 1, parse_local("exists y in ball(x,1) . !(y = x)"))
    out = bls_decision(b, m, 12)
    assert out.greedy == ("c0",)
    assert out.xi == 1
    assert [blk.m for blk in out.blocks] == [1]
    assert out.verdict is False and out.decided_by == "block sum"
    assert out.stats()["blocks"] == [1]


def test_scattered_expansion_has_expected_depth():
    b = parse("scattered(k=2, r=1) { exists y in ball(x,1) . circ2(x,y) }").formula
    ex = expand_scattered(b)
    assert quantifier_depth(ex) == quantifier_depth(b)
    assert set(itertools.chain.from_iterable(n.vars for n in _nodes(ex) if isinstance(n, Circ)))
