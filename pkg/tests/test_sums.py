from __future__ import annotations

import itertools
import random
from dataclasses import replace

import pytest

from corpus import complete_graph, cycle_graph, k3, k4, random_trees
from matfol import io
from matfol.errors import ElementShared, InvalidTree, SumPreconditionViolated, UnknownElement
from matfol.matroid import (
    CographicMatroid,
    GraphicMatroid,
    GraphRepr,
    UniformMatroid,
    circuits_up_to,
    graphic,
)
from matfol.sums import (
    ChildLink,
    DecompositionNode,
    DecompositionTree,
    SumKind,
    attach_f2_leaf,
    compose_tree,
    cycle_space,
    delta_closure_circuits,
    delta_sum,
    relabel,
    reroot,
    single_node_tree,
    validate_tree,
)


def triangle(labels, vertices=("a", "b", "c")):
    p, q, s = labels
    a, b, c = vertices
    return graphic(vertices, {p: (a, b), q: (b, c), s: (a, c)})


def brute_cycles(m):
    """Disjoint unions of circuits, found as sets whose circuits partition them."""
    circuits = circuits_up_to(m, len(m))
    out = {frozenset()}
    for size in range(1, len(circuits) + 1):
        for combo in itertools.combinations(circuits, size):
            if all(not (a & b) for a, b in itertools.combinations(combo, 2)):
                out.add(frozenset().union(*combo))
    return out


def load_tree(name, fixture_path):
    return io.tree_from_json(io.load_json(fixture_path(name)))


# -- cycle spaces ----------------------------------------------------------------


def test_cycle_space_examples():
    cs = cycle_space(k3())
    assert cs.dimension == 1
    assert cs.basis == (frozenset(k3().elements),)
    assert cycle_space(UniformMatroid(2, 2)).dimension == 0
    assert cycle_space(k4()).dimension == 3


@pytest.mark.parametrize("m", [k4(), GraphicMatroid(cycle_graph(5)), CographicMatroid(complete_graph(4))])
def test_cycle_space_spans_exactly_the_cycles(m):
    assert set(cycle_space(m).all_cycles()) == brute_cycles(m)


# -- delta sums ----------------------------------------------------------------------


def test_one_sum_of_disjoint_triangles_is_direct_sum():
    m = delta_sum(triangle("pqs"), triangle("ghi", ("x", "y", "z")))
    assert len(m) == 6
    assert set(circuits_up_to(m, 6)) == {frozenset("pqs"), frozenset("ghi")}


def test_two_sum_of_triangles_is_the_four_cycle():
    m = delta_sum(triangle("pqs"), triangle("suv", ("x", "y", "z")), SumKind.TWO)
    assert m.elements == ("p", "q", "u", "v")
    assert circuits_up_to(m, 4) == [frozenset("pquv")]
    assert m.rank_table() == GraphicMatroid(cycle_graph(4)).rank_table()


def test_three_sum_of_two_k4_copies():
    a = k4()
    b = relabel(k4(), {"e14": "f14", "e24": "f24", "e34": "f34"})
    m = delta_sum(a, b, SumKind.THREE)
    assert len(m) == 6
    ca, cb = brute_cycles(a), brute_cycles(b)
    shared = a.ground_set & b.ground_set
    expected = {x ^ y for x in ca for y in cb if not (x ^ y) & shared}
    assert brute_cycles(m) == expected


def test_sum_kind_mismatch():
    with pytest.raises(SumPreconditionViolated) as exc:
        delta_sum(triangle("pqs"), triangle("suv", ("x", "y", "z")), SumKind.THREE)
    assert tuple(exc.value.elements) == ("s",)


def test_two_sum_rejects_loop_and_coloop():
    loop = graphic(["a", "b"], {"s": ("a", "a"), "t": ("a", "b"), "w": ("a", "b")})
    with pytest.raises(SumPreconditionViolated, match="loop"):
        delta_sum(triangle("pqs"), loop)
    coloop = graphic(["a", "b", "c"], {"s": ("a", "b"), "t": ("b", "c"), "w": ("b", "c")})
    with pytest.raises(SumPreconditionViolated, match="coloop"):
        delta_sum(triangle("pqs"), coloop)


def test_three_sum_rejects_non_circuit_and_cocircuit():
    a = k4()
    star = relabel(k4(), {"e12": "x1", "e13": "x2", "e23": "x3", "e14": "e12", "e24": "e13", "e34": "e23"})
    # the shared set is the star at vertex 4 of the second copy: a cocircuit, not a circuit
    with pytest.raises(SumPreconditionViolated, match="not a circuit"):
        delta_sum(a, star)


def test_size_precondition():
    with pytest.raises(SumPreconditionViolated, match="exceeds"):
        delta_sum(k3(), k3())


def test_delta_sum_output_is_a_k_separation():
    trees = [t for t in random_trees(60, seed=5, max_elements=12, max_nodes=2) if len(t.nodes) == 2]
    kinds = set()
    for tree in trees:
        root = tree.nodes[tree.root]
        link = root.children[0]
        m1, m2 = root.matroid, tree.nodes[link.id].matroid
        m = delta_sum(m1, m2)
        a = m1.ground_set - m2.ground_set
        b = m2.ground_set - m1.ground_set
        k = SumKind.for_shared(len(link.shared))
        kinds.add(k)
        assert m.rank(a) + m.rank(b) - m.rank() == int(k) - 1
    assert kinds == {SumKind.TWO, SumKind.THREE}
    one = delta_sum(triangle("pqs"), triangle("ghi", ("x", "y", "z")))
    assert one.rank(list("pqs")) + one.rank(list("ghi")) - one.rank() == 0


# -- composition -------------------------------------------------------------------


def test_compose_single_node_is_unchanged():
    m = k4()
    assert compose_tree(single_node_tree(m)).rank_table() == m.rank_table()


def test_compose_fixture_examples(fixture_path):
    two = compose_tree(load_tree("two_sum_triangles.json", fixture_path))
    assert two.rank_table() == GraphicMatroid(cycle_graph(4)).rank_table()
    path = compose_tree(load_tree("path_of_triangles.json", fixture_path))
    assert len(path) == 5
    assert circuits_up_to(path, 5) == [frozenset(path.elements)]


def test_compose_up_to_returns_partial_composition(fixture_path):
    t = load_tree("path_of_triangles.json", fixture_path)
    leaf = [nid for nid, n in t.nodes.items() if not n.children][0]
    assert compose_tree(t, up_to=leaf).rank_table() == t.nodes[leaf].matroid.to_binary().rank_table()
    assert compose_tree(t, up_to=t.root).rank_table() == compose_tree(t).rank_table()


def test_compose_rejects_invalid_tree(fixture_path):
    with pytest.raises(InvalidTree) as exc:
        compose_tree(load_tree("bad_three_sum.json", fixture_path))
    assert any("not a circuit in both" in v for v in exc.value.violations)


@pytest.mark.parametrize("seed", range(20))
def test_compose_matches_delta_closure(seed):
    t = random_trees(1, seed=100 + seed, max_elements=12, max_nodes=4)[0]
    assert set(circuits_up_to(compose_tree(t), 12)) == set(delta_closure_circuits(t))


@pytest.mark.parametrize("seed", range(10))
def test_compose_ignores_child_order(seed):
    t = random_trees(1, seed=200 + seed, max_elements=12, max_nodes=5)[0]
    rng = random.Random(seed)
    nodes = {}
    for nid, node in t.nodes.items():
        kids = list(node.children)
        rng.shuffle(kids)
        nodes[nid] = replace(node, children=tuple(kids))
    assert compose_tree(DecompositionTree(nodes, t.root)).rank_table() == compose_tree(t).rank_table()


# -- validation ---------------------------------------------------------------------


def test_validate_examples(fixture_path):
    assert validate_tree(load_tree("two_sum_triangles.json", fixture_path)).valid
    assert validate_tree(load_tree("three_sum_mixed.json", fixture_path)).valid
    rep = validate_tree(load_tree("bad_three_sum.json", fixture_path))
    assert not rep.valid
    assert any("not a circuit in both" in v for v in rep.violations)


def prism() -> GraphRepr:
    return GraphRepr(
        ("a1", "a2", "a3", "b1", "b2", "b3"),
        {
            "x1": ("a1", "a2"), "x2": ("a2", "a3"), "x3": ("a1", "a3"),
            "y1": ("b1", "b2"), "y2": ("b2", "b3"), "y3": ("b1", "b3"),
            "r1": ("a1", "b1"), "r2": ("a2", "b2"), "r3": ("a3", "b3"),
        },
    )


def test_cographic_three_set_must_be_a_vertex_star():
    # the three rungs of a prism form a bond that is not the star of any vertex
    host = CographicMatroid(prism())
    rungs = ("r1", "r2", "r3")
    assert host.is_circuit(rungs)
    child = relabel(k4(), {"e12": "r1", "e13": "r2", "e23": "r3"})
    t = DecompositionTree(
        {
            "n1": DecompositionNode("n1", host, None, (), (ChildLink("n2", rungs),)),
            "n2": DecompositionNode("n2", child, "n1", rungs, ()),
        },
        "n1",
    )
    rep = validate_tree(t)
    assert len(rep.violations) == 1
    assert "not simple" in rep.violations[0]


def test_validate_reports_label_and_shape_problems():
    tri = triangle("pqs")
    other = triangle("suv", ("x", "y", "z"))
    t = DecompositionTree(
        {
            "n1": DecompositionNode("n1", tri, None, (), (ChildLink("n2", ("s",)),)),
            "n2": DecompositionNode("n2", other, "n9", ("u",), ()),
        },
        "n1",
    )
    rep = validate_tree(t)
    assert any("names parent" in v for v in rep.violations)
    t2 = DecompositionTree(
        {
            "n1": DecompositionNode("n1", tri, None, (), (ChildLink("n2", ("s",)),)),
            "n2": DecompositionNode("n2", other, "n1", ("u",), ()),
        },
        "n1",
    )
    assert any("does not match" in v for v in validate_tree(t2).violations)


# -- normalization helpers -------------------------------------------------------------


def test_attach_f2_leaf_examples(fixture_path):
    t = load_tree("two_sum_triangles.json", fixture_path)
    before = compose_tree(t)
    root_element = t.nodes[t.root].parent_set[0]
    for f2 in set(before.elements) - {root_element}:
        t2 = attach_f2_leaf(t, f2)
        assert validate_tree(t2).valid
        leaf = t2.node_of(f2)
        assert not t2.nodes[leaf].children
        assert set(circuits_up_to(compose_tree(t2), 4)) == set(circuits_up_to(before, 4))
    with pytest.raises(UnknownElement):
        attach_f2_leaf(t, "nope")
    shared = t.nodes[t.root].children[0].shared[0]
    with pytest.raises(ElementShared):
        attach_f2_leaf(t, shared)
    with pytest.raises(ElementShared):
        attach_f2_leaf(t, root_element)


def test_attach_f2_leaf_on_a_leaf_still_adds_a_node(fixture_path):
    t = load_tree("path_of_triangles.json", fixture_path)
    leaf = [nid for nid, n in t.nodes.items() if not n.children][0]
    f2 = sorted(t.nodes[leaf].own_elements())[0]
    t2 = attach_f2_leaf(t, f2)
    assert len(t2.nodes) == len(t.nodes) + 1
    assert compose_tree(t2).rank_table() == compose_tree(t).rank_table()


@pytest.mark.parametrize("seed", range(15))
def test_attach_f2_leaf_preserves_rank_function(seed):
    t = random_trees(1, seed=300 + seed, max_elements=12, max_nodes=4)[0]
    composed = compose_tree(t)
    f2 = random.Random(seed).choice(composed.elements)
    assert compose_tree(attach_f2_leaf(t, f2)).rank_table() == composed.rank_table()


@pytest.mark.parametrize("seed", range(10))
def test_reroot_preserves_rank_function(seed):
    t = random_trees(1, seed=400 + seed, max_elements=12, max_nodes=4)[0]
    composed = compose_tree(t)
    for nid in t.nodes:
        t2 = reroot(t, nid)
        assert validate_tree(t2).valid
        assert compose_tree(t2).rank_table() == composed.rank_table()
