"""Minimum dependency weight circuit (MDWC) solvers.

A circuit C is priced as the sum of ``weights[e]`` over its elements outside
every triple, plus ``triple.weights[C & T]`` for each designated 3-element
circuit T.  Every solver returns the minimum price of a circuit containing the
required set ``F`` when that price is at most ``ell``, and ``math.inf``
otherwise.
"""

from __future__ import annotations

import enum
import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from .errors import (
    InvalidInstance,
    KernelTooLarge,
    NotCographic,
    NotGraphic,
    TTNotSimple,
)
from .matroid import (
    DEFAULT_BUDGET,
    CographicMatroid,
    GraphicMatroid,
    GraphRepr,
    Matroid,
    iter_circuit_masks,
)

INF = math.inf
DEFAULT_KERNEL_BOUND = 16


def subset_key(labels: Iterable[str]) -> str:
    """JSON key of a triple subset: sorted ids concatenated, ``""`` for the empty set."""
    return "".join(sorted(labels))


@dataclass(frozen=True)
class Triple:
    elements: Tuple[str, str, str]
    weights: Mapping[FrozenSet[str], int]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(sorted(self.elements)))
        object.__setattr__(self, "weights", {frozenset(k): v for k, v in self.weights.items()})

    def price(self, part: Iterable[str]) -> int:
        return self.weights[frozenset(part)]

    @classmethod
    def from_function(cls, elements: Sequence[str], fn) -> "Triple":
        els = tuple(sorted(elements))
        ws = {}
        for size in range(4):
            for combo in itertools.combinations(els, size):
                ws[frozenset(combo)] = fn(frozenset(combo))
        return cls(els, ws)


@dataclass(frozen=True)
class MdwcInstance:
    matroid: Matroid
    F: Tuple[str, ...]
    triples: Tuple[Triple, ...]
    weights: Mapping[str, int]
    ell: int

    def __post_init__(self):
        object.__setattr__(self, "F", tuple(self.F))
        object.__setattr__(self, "triples", tuple(self.triples))
        object.__setattr__(self, "weights", dict(self.weights))

    def validate(self) -> "MdwcInstance":
        m = self.matroid
        if not 1 <= len(set(self.F)) <= 3:
            raise InvalidInstance("F must hold one, two or three elements")
        for e in self.F:
            if e not in m.ground_set:
                raise InvalidInstance(f"F element {e!r} is not in the matroid")
        covered: Dict[str, int] = {}
        for i, t in enumerate(self.triples):
            for e in t.elements:
                if e not in m.ground_set:
                    raise InvalidInstance(f"triple element {e!r} is not in the matroid")
                if e in covered:
                    raise InvalidInstance(f"triples overlap in {e!r}")
                covered[e] = i
            if not m.is_circuit(t.elements):
                raise InvalidInstance(f"triple {list(t.elements)} is not a circuit")
            for size in range(4):
                for combo in itertools.combinations(t.elements, size):
                    key = frozenset(combo)
                    if key not in t.weights:
                        raise InvalidInstance(
                            f"triple {list(t.elements)} has no weight for {subset_key(combo)!r}"
                        )
                    w = t.weights[key]
                    if size == 0 and w != 0:
                        raise InvalidInstance("w_T(empty set) must be 0")
                    if w < size:
                        raise InvalidInstance(
                            f"w_T({subset_key(combo)}) = {w} is below |A| = {size}"
                        )
        for e in m.elements:
            if e in covered:
                continue
            if e not in self.weights:
                raise InvalidInstance(f"no weight for element {e!r}")
            if self.weights[e] < 1:
                raise InvalidInstance(f"weight of {e!r} must be positive")
        if self.ell < 0:
            raise InvalidInstance("ell must be non-negative")
        return self

    def triple_of(self) -> Dict[str, int]:
        return {e: i for i, t in enumerate(self.triples) for e in t.elements}

    def weight(self, circuit: Iterable[str]) -> int:
        """Dependency weight of a set of elements."""
        c = set(circuit)
        tof = self.triple_of()
        total = sum(self.weights[e] for e in c if e not in tof)
        for t in self.triples:
            total += t.price(c & set(t.elements))
        return total


def unit_instance(m: Matroid, F: Iterable[str], ell: int, triples: Iterable[Triple] = ()) -> MdwcInstance:
    triples = tuple(triples)
    covered = {e for t in triples for e in t.elements}
    return MdwcInstance(m, tuple(F), triples, {e: 1 for e in m.elements if e not in covered}, ell)


# ---------------------------------------------------------------------------
# Brute force
# ---------------------------------------------------------------------------


def mdwc_bruteforce(inst: MdwcInstance, *, budget: int = DEFAULT_BUDGET):
    """Exact minimum over all circuits; only sizes up to ``ell`` are examined."""
    inst.validate()
    m = inst.matroid
    tof = inst.triple_of()
    unit = [0 if e in tof else inst.weights[e] for e in m.elements]
    tmasks = [(m.mask(t.elements), t) for t in inst.triples]
    best = INF
    fmask = m.mask(inst.F)
    for c in iter_circuit_masks(m, inst.ell, fmask, budget=budget):
        w = 0
        rest = c
        while rest:
            low = rest & -rest
            rest ^= low
            w += unit[low.bit_length() - 1]
        for tm, t in tmasks:
            w += t.price(m.labels(c & tm))
        if w < best:
            best = w
    return best if best <= inst.ell else INF


# ---------------------------------------------------------------------------
# Colour coding (graphic matroids)
# ---------------------------------------------------------------------------


class ColoringMode(str, enum.Enum):
    EXHAUSTIVE = "exhaustive"
    MONTE_CARLO = "monte_carlo"


def monte_carlo_trials(ell: int, failure_bound: float) -> int:
    """Smallest t with (1 - ell!/ell^ell)^t <= failure_bound."""
    if ell <= 1:
        return 1
    p = math.factorial(ell) / ell**ell
    return max(1, math.ceil(math.log(failure_bound) / math.log1p(-p)))


@dataclass
class ColoringFamily:
    colorings: List[Tuple[int, ...]]
    mode: ColoringMode
    ell: int
    failure_bound: Optional[float] = None

    def __len__(self):
        return len(self.colorings)

    def __iter__(self):
        return iter(self.colorings)


def coloring_family(
    num_vertices: int,
    ell: int,
    mode: ColoringMode = ColoringMode.EXHAUSTIVE,
    *,
    anchors: Sequence[int] = (),
    failure_bound: float = 1e-6,
    rng: Optional[random.Random] = None,
) -> ColoringFamily:
    """Vertex colourings with colours ``0..ell-1``.

    EXHAUSTIVE: every vertex set of size at most ``ell`` that contains all
    ``anchors`` is rainbow in some member.  Anchors get colours ``0..a-1``; each
    member colours one maximal subset of the other vertices injectively and
    gives the rest colour 0.  MONTE_CARLO: independent uniform colourings, as
    many as needed for ``failure_bound``.
    """
    if ell < 1:
        raise ValueError("ell must be at least 1")
    mode = ColoringMode(mode)
    if mode is ColoringMode.MONTE_CARLO:
        rng = rng or random.Random(0)
        t = monte_carlo_trials(ell, failure_bound)
        cols = [tuple(rng.randrange(ell) for _ in range(num_vertices)) for _ in range(t)]
        return ColoringFamily(cols, mode, ell, failure_bound)
    anchors = list(anchors)
    if len(set(anchors)) > ell:
        raise ValueError("more anchors than colours")
    others = [v for v in range(num_vertices) if v not in anchors]
    size = min(ell - len(anchors), len(others))
    out = []
    for chosen in itertools.combinations(others, size):
        col = [0] * num_vertices
        for c, v in enumerate(anchors):
            col[v] = c
        for c, v in enumerate(chosen, start=len(anchors)):
            col[v] = c
        out.append(tuple(col))
    # small ell makes several members coincide (ell = 1 leaves only the constant one)
    return ColoringFamily(list(dict.fromkeys(out)), mode, ell)


class _Pricer:
    """Incremental dependency weights along a path of graph edges."""

    def __init__(self, inst: MdwcInstance):
        self.tof = inst.triple_of()
        self.triples = inst.triples
        self.w = inst.weights

    def single(self, e: str) -> int:
        t = self.tof.get(e)
        return self.w[e] if t is None else self.triples[t].price((e,))

    def step(self, prev: str, e: str) -> int:
        t = self.tof.get(e)
        if t is None:
            return self.w[e]
        tr = self.triples[t]
        if self.tof.get(prev) == t:
            return tr.price((prev, e)) - tr.price((prev,))
        return tr.price((e,))

    def closing(self, last: str, first: str) -> int:
        t = self.tof.get(last)
        if t is None or self.tof.get(first) != t:
            return 0
        tr = self.triples[t]
        return tr.price((last, first)) - tr.price((last,)) - tr.price((first,))


def _relevant_vertices(graph: GraphRepr, sources: Iterable[str], radius: int) -> List[str]:
    adj: Dict[str, set] = {v: set() for v in graph.vertices}
    for u, v in graph.edges.values():
        if u != v:
            adj[u].add(v)
            adj[v].add(u)
    seen = set(sources)
    frontier = list(seen)
    for _ in range(radius):
        nxt = []
        for v in frontier:
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return sorted(seen)


def mdwc_graphic(
    inst: MdwcInstance,
    *,
    mode: ColoringMode = ColoringMode.EXHAUSTIVE,
    failure_bound: float = 1e-6,
    seed: Optional[int] = 0,
    stats: Optional[dict] = None,
):
    """Colour-coding MDWC for cycle matroids.

    Cycles of length 3 are enumerated directly; every other length runs the
    layered path DP over one cyclic colour sequence at a time.  In Monte Carlo
    mode the answer can only be an overestimate.
    """
    m = inst.matroid
    if not isinstance(m, GraphicMatroid):
        raise NotGraphic(f"mdwc_graphic needs a graphic matroid, got {m.kind}")
    inst.validate()
    g = m.graph
    ell = inst.ell
    F = list(dict.fromkeys(inst.F))
    f1 = F[0]
    a, b = g.edges[f1]
    pricer = _Pricer(inst)

    loops = [e for e in F if g.edges[e][0] == g.edges[e][1]]
    if loops:
        if len(F) == 1:
            w = pricer.single(f1)
            return w if w <= ell else INF
        return INF
    if ell < 2:
        return INF

    best = INF

    def consider(cycle_edges):
        nonlocal best
        if not set(F) <= set(cycle_edges):
            return
        w = inst.weight(cycle_edges)
        if w < best:
            best = w

    # length 3: direct triangle enumeration through f1
    if ell >= 3:
        for g_edge, (u, v) in g.edges.items():
            if g_edge == f1 or u == v or b not in (u, v):
                continue
            x = v if u == b else u
            if x in (a, b):
                continue
            for h_edge, (p, q) in g.edges.items():
                if {p, q} == {x, a} and h_edge not in (f1, g_edge):
                    consider((f1, g_edge, h_edge))

    verts = _relevant_vertices(g, (a, b), ell // 2)
    vindex = {v: i for i, v in enumerate(verts)}
    vset = set(verts)
    # adjacency restricted to relevant vertices: vertex -> [(edge, other endpoint)]
    inc: Dict[str, List[Tuple[str, str]]] = {v: [] for v in verts}
    for e, (u, v) in g.edges.items():
        if u != v and u in vset and v in vset:
            inc[u].append((e, v))
            inc[v].append((e, u))
    lengths = [k for k in range(2, ell + 1) if k != 3]
    if not lengths:
        return best if best <= ell else INF

    mode = ColoringMode(mode)
    rng = random.Random(seed)
    family = coloring_family(
        len(verts),
        ell,
        mode,
        anchors=(vindex[a], vindex[b]) if mode is ColoringMode.EXHAUSTIVE else (),
        failure_bound=failure_bound,
        rng=rng,
    )
    f_ends = {e: g.edges[e] for e in F[1:]}
    w_first = pricer.single(f1)
    n_runs = 0
    seen = set()
    for coloring in family:
        # only the induced partition matters: colour names are permuted by sigma anyway
        canon: Dict[int, int] = {}
        key = tuple(canon.setdefault(c, len(canon)) for c in coloring)
        if key in seen:
            continue
        seen.add(key)
        col = {v: key[vindex[v]] for v in verts}
        ca, cb = col[a], col[b]
        if ca == cb:
            continue
        spare = sorted(set(key) - {ca, cb})
        for k in lengths:
            for middle in itertools.permutations(spare, k - 2):
                sigma = (ca,) + middle + (cb,)
                forced = _forced_positions(sigma, f_ends, col)
                if forced is None:
                    continue
                n_runs += 1
                w = _path_dp(sigma, forced, col, inc, f1, a, b, w_first, pricer)
                if w < best:
                    best = w
    if stats is not None:
        stats["colorings"] = len(family)
        stats["dp_runs"] = n_runs
    return best if best <= ell else INF


def _forced_positions(sigma, f_ends, col):
    """Map layer index -> required edge, or None when some F edge cannot fit."""
    pos = {frozenset((sigma[i - 1], sigma[i])): i for i in range(1, len(sigma))}
    forced = {}
    for e, (u, v) in f_ends.items():
        cu, cv = col.get(u), col.get(v)
        if cu is None or cv is None:
            return None
        i = pos.get(frozenset((cu, cv)))
        if i is None or i in forced:
            return None
        forced[i] = e
    return forced


def _path_dp(sigma, forced, col, inc, f1, a, b, w_first, pricer):
    """Minimum weight of a cycle f1=b->a, then through colour classes sigma[1:]."""
    k = len(sigma)
    # state: last edge -> (end vertex, weight)
    layer = {f1: (a, w_first)}
    for i in range(1, k):
        target = sigma[i]
        need = forced.get(i)
        nxt: Dict[str, Tuple[str, int]] = {}
        for f, (u, w) in layer.items():
            for e, x in inc[u]:
                if e == f1 or col[x] != target:
                    continue
                if need is not None and e != need:
                    continue
                if i == k - 1 and x != b:
                    continue
                nw = w + pricer.step(f, e)
                if i == k - 1:
                    nw += pricer.closing(e, f1)
                old = nxt.get(e)
                if old is None or nw < old[1]:
                    nxt[e] = (x, nw)
        layer = nxt
        if not layer:
            return INF
    return min(w for _, w in layer.values())


# ---------------------------------------------------------------------------
# Cut kernelization (cographic matroids)
# ---------------------------------------------------------------------------


def _simple_graph(graph: GraphRepr, vertices: Iterable[str]) -> nx.Graph:
    vs = set(vertices)
    h = nx.Graph()
    h.add_nodes_from(vs)
    for u, v in graph.edges.values():
        if u == v or u not in vs or v not in vs:
            continue
        if h.has_edge(u, v):
            h[u][v]["capacity"] += 1
        else:
            h.add_edge(u, v, capacity=1)
    return h


def kernelize(graph: GraphRepr, ell: int, vertices: Optional[Iterable[str]] = None):
    """Identify every vertex pair whose minimum edge cut exceeds ``ell``.

    Works on the connected subgraph induced by ``vertices`` (default: all).
    Returns the kernel multigraph (edges inside a merged class are dropped,
    the others keep their labels) and the vertex -> class representative map.
    """
    vs = sorted(vertices if vertices is not None else graph.vertices)
    h = _simple_graph(graph, vs)
    rep = {v: v for v in vs}
    if len(vs) > 1:
        if not nx.is_connected(h):
            raise ValueError("kernelize expects a connected vertex set")
        tree = nx.gomory_hu_tree(h, capacity="capacity")
        strong = nx.Graph()
        strong.add_nodes_from(vs)
        strong.add_edges_from((u, v) for u, v, d in tree.edges(data=True) if d["weight"] > ell)
        for comp in nx.connected_components(strong):
            r = min(comp)
            for v in comp:
                rep[v] = r
    vset = set(vs)
    edges = {}
    for e, (u, v) in graph.edges.items():
        if u in vset and v in vset and rep[u] != rep[v]:
            edges[e] = (rep[u], rep[v])
    kernel = GraphRepr(tuple(sorted(set(rep.values()))), edges)
    return kernel, rep


def _connected(vertices: List[str], adj: Dict[str, set]) -> bool:
    if not vertices:
        return False
    vs = set(vertices)
    seen = {vertices[0]}
    stack = [vertices[0]]
    while stack:
        for w in adj[stack.pop()]:
            if w in vs and w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(vs)


def mdwc_cographic(
    inst: MdwcInstance,
    *,
    kernel_bound: int = DEFAULT_KERNEL_BOUND,
    stats: Optional[dict] = None,
):
    """MDWC for bond matroids: kernelize, then enumerate bonds on the kernel."""
    m = inst.matroid
    if not isinstance(m, CographicMatroid):
        raise NotCographic(f"mdwc_cographic needs a cographic matroid, got {m.kind}")
    inst.validate()
    g = m.graph
    for t in inst.triples:
        if not any(set(g.incident(v)) == set(t.elements) for v in g.vertices):
            raise TTNotSimple(f"triple {list(t.elements)} is not the cut around a vertex")
    F = list(dict.fromkeys(inst.F))
    if any(g.edges[e][0] == g.edges[e][1] for e in F):
        return INF
    comp_of = {}
    for comp in g.components():
        for v in comp:
            comp_of[v] = comp
    comps = {comp_of[g.edges[e][0]] for e in F}
    if len(comps) != 1:
        return INF
    (comp,) = comps
    kernel, rep = kernelize(g, inst.ell, comp)
    if stats is not None:
        stats["kernel_vertices"] = len(kernel.vertices)
        stats["component_vertices"] = len(comp)
    if any(e not in kernel.edges for e in F):
        return INF
    kv = list(kernel.vertices)
    if len(kv) > kernel_bound:
        raise KernelTooLarge(f"kernel has {len(kv)} vertices (bound {kernel_bound})")
    adj: Dict[str, set] = {v: set() for v in kv}
    for u, v in kernel.edges.values():
        adj[u].add(v)
        adj[v].add(u)
    tof = inst.triple_of()
    best = INF
    root, rest = kv[0], kv[1:]
    for size in range(0, len(rest)):
        for combo in itertools.combinations(rest, size):
            side = {root, *combo}
            cut = [e for e, (u, v) in kernel.edges.items() if (u in side) != (v in side)]
            if not set(F) <= set(cut):
                continue
            if len(cut) > inst.ell:
                continue
            other = [v for v in kv if v not in side]
            if not _connected(sorted(side), adj) or not _connected(other, adj):
                continue
            w = sum(inst.weights[e] for e in cut if e not in tof)
            cs = set(cut)
            for t in inst.triples:
                w += t.price(cs & set(t.elements))
            if w < best:
                best = w
    return best if best <= inst.ell else INF


def solve_mdwc(inst: MdwcInstance, **opts):
    """Dispatch on the matroid type: colour coding, kernelized cuts, or brute force."""
    m = inst.matroid
    if isinstance(m, GraphicMatroid):
        keys = {"mode", "failure_bound", "seed", "stats"}
        return mdwc_graphic(inst, **{k: v for k, v in opts.items() if k in keys})
    if isinstance(m, CographicMatroid):
        keys = {"kernel_bound", "stats"}
        return mdwc_cographic(inst, **{k: v for k, v in opts.items() if k in keys})
    keys = {"budget"}
    return mdwc_bruteforce(inst, **{k: v for k, v in opts.items() if k in keys})
