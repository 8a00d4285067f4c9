"""Circuit distance, Gaifman graphs, brute-force branch-width, and the
decomposition-tree DP for shortest circuits through two elements."""

from __future__ import annotations

import functools
import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from . import gf2
from .errors import MdwcFailure, SizeBoundTooLarge, TreeNotNormalized, UnknownElement
from .matroid import DEFAULT_BUDGET, Matroid, iter_circuit_masks
from .mdwc import INF, MdwcInstance, Triple, solve_mdwc
from .sums import DecompositionTree, attach_f2_leaf, reroot, validate_tree

DEFAULT_BRANCHWIDTH_BOUND = 10


# ---------------------------------------------------------------------------
# Distances
# ---------------------------------------------------------------------------


def element_distance(m: Matroid, e: str, f: str, cap: int, *, budget: int = DEFAULT_BUDGET):
    """Size of a smallest circuit containing ``e`` and ``f``, or ``inf`` beyond ``cap``."""
    if cap < 0:
        raise ValueError("cap must be non-negative")
    fmask = m.mask((e, f))
    if e == f:
        return 0
    for c in iter_circuit_masks(m, cap, fmask, budget=budget):
        return gf2.popcount(c)
    return INF


@dataclass
class DistanceTable:
    elements: Tuple[str, ...]
    cap: int
    dist: Dict[Tuple[str, str], float]

    def __call__(self, e: str, f: str):
        if e == f:
            if e not in self.elements:
                raise UnknownElement(e)
            return 0
        key = (e, f) if e < f else (f, e)
        if key not in self.dist:
            raise UnknownElement(e if e not in self.elements else f)
        return self.dist[key]


def distance_table(m: Matroid, cap: int, *, budget: int = DEFAULT_BUDGET) -> DistanceTable:
    """All pairwise distances up to ``cap`` from one sweep over small circuits."""
    dist = {pair: INF for pair in itertools.combinations(m.elements, 2)}
    for c in iter_circuit_masks(m, cap, 0, budget=budget):
        size = gf2.popcount(c)
        members = [m.elements[i] for i in gf2.bits(c)]
        for pair in itertools.combinations(members, 2):
            if size < dist[pair]:
                dist[pair] = size
    return DistanceTable(m.elements, cap, dist)


def neighborhood(m: Matroid, e: str, d: int, *, budget: int = DEFAULT_BUDGET) -> FrozenSet[str]:
    """Elements at matroid distance at most ``d`` from ``e``."""
    if d < 0:
        raise ValueError("d must be non-negative")
    out = {e}
    m.index(e)
    for c in iter_circuit_masks(m, d, m.mask(e), budget=budget):
        out.update(m.labels(c))
    return frozenset(out)


# ---------------------------------------------------------------------------
# Gaifman graph
# ---------------------------------------------------------------------------


@dataclass
class GaifmanGraph:
    vertices: Tuple[str, ...]
    adjacency: Dict[str, FrozenSet[str]]
    d: int
    _bfs: Dict[str, Dict[str, int]] = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_edges(cls, vertices: Iterable[str], edges: Iterable[Tuple[str, str]], d: int) -> "GaifmanGraph":
        verts = tuple(sorted(vertices))
        adj: Dict[str, set] = {v: set() for v in verts}
        for u, v in edges:
            if u != v:
                adj[u].add(v)
                adj[v].add(u)
        return cls(verts, {v: frozenset(n) for v, n in adj.items()}, d)

    def edges(self) -> List[Tuple[str, str]]:
        return sorted((u, v) for u in self.vertices for v in self.adjacency[u] if u < v)

    def adjacent(self, u: str, v: str) -> bool:
        return v in self.adjacency[u]

    def distances_from(self, x: str) -> Dict[str, int]:
        """BFS distances from ``x`` (unreachable vertices are absent)."""
        cached = self._bfs.get(x)
        if cached is not None:
            return cached
        if x not in self.adjacency:
            raise UnknownElement(x, "Gaifman graph")
        dist = {x: 0}
        queue = deque([x])
        while queue:
            u = queue.popleft()
            for w in self.adjacency[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        self._bfs[x] = dist
        return dist

    def distance(self, u: str, v: str):
        return self.distances_from(u).get(v, INF)

    def ball(self, x: str, r: int) -> FrozenSet[str]:
        return frozenset(v for v, k in self.distances_from(x).items() if k <= r)

    def induced(self, subset: Iterable[str]) -> "GaifmanGraph":
        keep = set(subset)
        adj = {v: self.adjacency[v] & keep for v in sorted(keep)}
        return GaifmanGraph(tuple(sorted(keep)), adj, self.d)


def gaifman_graph(m: Matroid, d: int, *, budget: int = DEFAULT_BUDGET) -> GaifmanGraph:
    """Elements are adjacent when some circuit of size at most ``d`` holds both."""
    if d < 1:
        raise ValueError("d must be at least 1")
    edges = set()
    for c in iter_circuit_masks(m, d, 0, budget=budget):
        members = [m.elements[i] for i in gf2.bits(c)]
        edges.update(itertools.combinations(members, 2))
    return GaifmanGraph.from_edges(m.elements, edges, d)


def gaifman_graph_dp(t: DecompositionTree, d: int, **mdwc_opts) -> GaifmanGraph:
    """Gaifman graph of the composed matroid with one DP run per element pair."""
    if d < 1:
        raise ValueError("d must be at least 1")
    elements = sorted(t.composed_elements())
    edges = [
        (e, f)
        for e, f in itertools.combinations(elements, 2)
        if min_circuit_length(t, e, f, d, **mdwc_opts) <= d
    ]
    return GaifmanGraph.from_edges(elements, edges, d)


def gaifman_ball(g: GaifmanGraph, x: str, r: int) -> FrozenSet[str]:
    if r < 0:
        raise ValueError("r must be non-negative")
    return g.ball(x, r)


# ---------------------------------------------------------------------------
# Branch-width
# ---------------------------------------------------------------------------


def branch_width_bruteforce(m: Matroid, *, bound: int = DEFAULT_BRANCHWIDTH_BOUND) -> int:
    """Exact branch-width by recursion over the bipartitions of a rooted tree.

    ``g(S)`` is the best width of a rooted binary tree on leaves ``S`` counting
    the edge above ``S``; hanging the tree from one fixed leaf gives the answer.
    """
    n = len(m)
    if n < 2:
        raise ValueError("branch-width needs at least two elements")
    if n > bound:
        raise SizeBoundTooLarge(f"branch-width brute force is limited to {bound} elements")
    full = m.full_mask
    r_all = m.rank_mask(full)

    def lam(s: int) -> int:
        return m.rank_mask(s) + m.rank_mask(full ^ s) - r_all + 1

    @functools.lru_cache(maxsize=None)
    def g(s: int) -> int:
        here = lam(s)
        if s & (s - 1) == 0:
            return here
        low = s & -s
        rest = s ^ low
        best = math.inf
        # enumerate each unordered split once by keeping ``low`` on the left
        sub = rest
        while True:
            left = low | sub
            right = s ^ left
            if right:
                best = min(best, max(g(left), g(right)))
            if sub == 0:
                break
            sub = (sub - 1) & rest
        return max(here, best)

    return g(full ^ 1)


# ---------------------------------------------------------------------------
# Shortest circuit through two elements over a decomposition tree
# ---------------------------------------------------------------------------


@dataclass
class CircuitDpResult:
    """Per-node quantities; ``None`` marks a value above the length bound."""

    m_i: Optional[int] = None
    m_ij: Tuple[Optional[int], ...] = (None, None, None)
    m_prime_ij: Tuple[Optional[int], ...] = (None, None, None)
    parent_set: Tuple[str, ...] = ()
    contains_f2: bool = False
    instances: int = 0


@dataclass
class CircuitDpTrace:
    value: float
    nodes: Dict[str, CircuitDpResult]


def _finite(x) -> Optional[int]:
    return None if x == INF else int(x)


def check_normalized(t: DecompositionTree, f1: str, f2: str) -> str:
    """Return the id of the f2 leaf, or raise :class:`TreeNotNormalized`."""
    rep = validate_tree(t)
    if not rep.valid:
        raise TreeNotNormalized("; ".join(rep.violations))
    root = t.nodes[t.root]
    if tuple(root.parent_set) != (f1,):
        raise TreeNotNormalized(f"root parent set must be ({f1!r},), got {list(root.parent_set)}")
    try:
        leaf_id = t.node_of(f2)
    except UnknownElement:
        raise TreeNotNormalized(f"{f2!r} is not a surviving element of the tree") from None
    leaf = t.nodes[leaf_id]
    m = leaf.matroid
    if (
        leaf_id == t.root
        or leaf.children
        or len(m) != 2
        or len(leaf.parent_set) != 1
        or m.rank() != 1
        or not m.is_circuit(m.elements)
    ):
        raise TreeNotNormalized(f"{f2!r} must sit in a U_1,2 leaf 2-summed onto its piece")
    return leaf_id


def shortest_circuit_dp(
    t: DecompositionTree,
    f1: str,
    f2: str,
    d: int,
    *,
    trace: bool = False,
    **mdwc_opts,
):
    """Minimum size of a circuit through ``f1`` and ``f2`` of the composed matroid.

    Values above ``d`` are reported as ``inf``.  The tree must already be
    normalized: root parent set ``(f1,)`` and ``f2`` alone in a U_{1,2} leaf.
    """
    if f1 == f2:
        raise TreeNotNormalized("f1 and f2 must differ")
    leaf_id = check_normalized(t, f1, f2)
    big = d + 1  # stands in for an undetermined (too large) value
    results: Dict[str, CircuitDpResult] = {}
    has_f2: Dict[str, bool] = {}
    if d < 2:
        for nid in t.postorder():
            results[nid] = CircuitDpResult(parent_set=t.nodes[nid].parent_set)
        return CircuitDpTrace(INF, results) if trace else INF

    for nid in t.postorder():
        node = t.nodes[nid]
        if nid == leaf_id:
            has_f2[nid] = True
            results[nid] = CircuitDpResult(m_i=2 if d >= 2 else None, parent_set=node.parent_set, contains_f2=True)
            continue
        f2_child = [c for c in node.children if has_f2[c.id]]
        has_f2[nid] = bool(f2_child)
        m = node.matroid

        weights: Dict[str, int] = {}
        triples: List[Triple] = []
        special = set()
        for c in node.children:
            res = results[c.id]
            special.update(c.shared)
            if len(c.shared) == 1:
                (s,) = c.shared
                if res.m_i is not None and res.m_i < 2:
                    raise MdwcFailure(f"child {c.id!r} reports m = {res.m_i}; {s!r} would get weight 0")
                weights[s] = big if res.m_i is None else res.m_i - 1
            else:
                triples.append(_special_triple(c.shared, res, big, c.id))
        for e in m.elements:
            if e not in special:
                weights[e] = 1

        extra_f = [()] if not f2_child else [(s,) for s in f2_child[0].shared]
        pset = tuple(node.parent_set)
        res = CircuitDpResult(parent_set=pset, contains_f2=has_f2[nid])

        def run(F, ell, tri):
            best = INF
            for extra in extra_f:
                inst = MdwcInstance(m, tuple(F) + extra, tuple(tri), weights, ell)
                res.instances += 1
                best = min(best, solve_mdwc(inst, **mdwc_opts))
            return best

        if len(pset) == 1:
            w = run(pset, d, triples)
            res.m_i = _finite(w)
        else:
            ps = list(pset)
            ms, mps = [], []
            for j in range(3):
                ej, ek, el = ps[j], ps[(j + 1) % 3], ps[(j + 2) % 3]
                single = Triple.from_function(ps, lambda a, ej=ej: _parent_weight_single(a, ej, big))
                ms.append(_finite(run((ej,), d, triples + [single])))
                pair = Triple.from_function(ps, lambda a, ej=ej: _parent_weight_pair(a, ej, big))
                w = run((ek, el), d + 1, triples + [pair])
                mps.append(_finite(w - 1 if w != INF else INF))
            res.m_ij = tuple(ms)
            res.m_prime_ij = tuple(mps)
        results[nid] = res

    value = results[t.root].m_i
    value = INF if value is None else value
    return CircuitDpTrace(value, results) if trace else value


def _special_triple(shared, res: CircuitDpResult, big: int, child_id: str) -> Triple:
    els = tuple(shared)
    for j, mp in enumerate(res.m_prime_ij):
        if mp is not None and mp < 2:
            raise MdwcFailure(
                f"child {child_id!r} reports m'_{j + 1} = {mp}; the singleton weight would be below 1"
            )
    pos = {e: j for j, e in enumerate(res.parent_set)}

    def fn(a: FrozenSet[str]) -> int:
        if not a:
            return 0
        if len(a) == 3:
            return big
        if len(a) == 1:
            (e,) = a
            mp = res.m_prime_ij[pos[e]]
            return big if mp is None else mp - 1
        (missing,) = set(els) - a
        mj = res.m_ij[pos[missing]]
        return big if mj is None else max(2, mj - 1)

    return Triple.from_function(els, fn)


def _parent_weight_single(a: FrozenSet[str], ej: str, big: int) -> int:
    # circuits meeting the parent set exactly in e_j
    if not a:
        return 0
    if len(a) == 1:
        return 1
    return big


def _parent_weight_pair(a: FrozenSet[str], ej: str, big: int) -> int:
    # circuits meeting the parent set exactly in the two elements other than e_j
    if not a:
        return 0
    if len(a) == 1:
        return 1
    if len(a) == 2:
        return 2 if ej not in a else big
    return big


def normalize_for_pair(t: DecompositionTree, f1: str, f2: str) -> DecompositionTree:
    """Hang the tree from the piece holding ``f1`` and move ``f2`` into a leaf."""
    host = t.node_of(f1)
    t.node_of(f2)
    return attach_f2_leaf(reroot(t, host, root_element=f1), f2)


def min_circuit_length(t: DecompositionTree, f1: str, f2: str, d: int, **mdwc_opts):
    """Shortest circuit through ``f1`` and ``f2`` (``inf`` above ``d``) for any valid tree."""
    if f1 == f2:
        t.node_of(f1)
        return 0
    return shortest_circuit_dp(normalize_for_pair(t, f1, f2), f1, f2, d, **mdwc_opts)
