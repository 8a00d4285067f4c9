"""Cycle spaces, delta-sums of binary matroids and decomposition trees.

A decomposition tree is consumed, never computed: each node carries a binary
(or graphic/cographic/R10) piece, and every parent-child link names the 1- or
3-element set the two pieces share.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import gf2
from .errors import (
    ElementShared,
    InvalidTree,
    SumPreconditionViolated,
    UnknownElement,
)
from .matroid import (
    BinaryMatroid,
    CographicMatroid,
    ElementSet,
    GraphicMatroid,
    GraphRepr,
    Matroid,
    R10Matroid,
    UniformMatroid,
)


class SumKind(enum.IntEnum):
    ONE = 1
    TWO = 2
    THREE = 3

    @property
    def shared_size(self) -> int:
        return {1: 0, 2: 1, 3: 3}[int(self)]

    @classmethod
    def for_shared(cls, size: int) -> "SumKind":
        try:
            return {0: cls.ONE, 1: cls.TWO, 3: cls.THREE}[size]
        except KeyError:
            raise SumPreconditionViolated(f"{size} shared elements match no sum kind") from None


@dataclass(frozen=True)
class CycleSpace:
    ground_set: Tuple[str, ...]
    basis: Tuple[ElementSet, ...]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def masks(self) -> List[int]:
        index = {e: i for i, e in enumerate(self.ground_set)}
        return [sum(1 << index[e] for e in c) for c in self.basis]

    def __contains__(self, x: Iterable[str]) -> bool:
        index = {e: i for i, e in enumerate(self.ground_set)}
        v = sum(1 << index[e] for e in x)
        return gf2.in_span(v, gf2.reduce_basis(self.masks()))

    def all_cycles(self) -> List[ElementSet]:
        """Every member of the span (2^dimension sets, the empty set included)."""
        masks = self.masks()
        out = []
        for coeffs in itertools.product((0, 1), repeat=len(masks)):
            v = 0
            for c, b in zip(coeffs, masks):
                if c:
                    v ^= b
            out.append(frozenset(self.ground_set[i] for i in gf2.bits(v)))
        return out


def cycle_space(m: Matroid) -> CycleSpace:
    b = m.to_binary()
    basis = gf2.reduce_basis(b.cycle_basis_masks())
    return CycleSpace(b.elements, tuple(b.labels(v) for v in basis))


def _is_loop(m: Matroid, e: str) -> bool:
    return m.rank([e]) == 0


def _is_coloop(m: Matroid, e: str) -> bool:
    return m.rank(m.ground_set - {e}) == m.rank() - 1


def cocircuits_within(m: Matroid, subset: Iterable[str]) -> List[ElementSet]:
    """Cocircuits of ``m`` contained in ``subset`` (checked through the dual rank)."""
    dual = m.dual()
    items = sorted(subset)
    out = []
    for size in range(1, len(items) + 1):
        for combo in itertools.combinations(items, size):
            if dual.is_circuit(combo):
                out.append(frozenset(combo))
    return out


def check_sum_preconditions(m1: Matroid, m2: Matroid, kind: Optional[SumKind] = None) -> SumKind:
    e1, e2 = m1.ground_set, m2.ground_set
    shared = e1 & e2
    actual = SumKind.for_shared(len(shared))
    if kind is not None and SumKind(kind) != actual:
        raise SumPreconditionViolated(
            f"{SumKind(kind).name}-sum needs {SumKind(kind).shared_size} shared elements, got {len(shared)}",
            sorted(shared),
        )
    if min(len(e1), len(e2)) > len(e1 ^ e2):
        raise SumPreconditionViolated("min(|E1|,|E2|) exceeds |E1 xor E2|", sorted(shared))
    if actual == SumKind.TWO:
        (s,) = shared
        for name, m in (("M1", m1), ("M2", m2)):
            if _is_loop(m, s):
                raise SumPreconditionViolated(f"shared element is a loop in {name}", [s])
            if _is_coloop(m, s):
                raise SumPreconditionViolated(f"shared element is a coloop in {name}", [s])
    elif actual == SumKind.THREE:
        for name, m in (("M1", m1), ("M2", m2)):
            if not m.is_circuit(shared):
                raise SumPreconditionViolated(f"shared set is not a circuit in {name}", sorted(shared))
            found = cocircuits_within(m, shared)
            if found:
                raise SumPreconditionViolated(
                    f"shared set contains a cocircuit of {name}", sorted(found[0])
                )
    return actual


def delta_sum(m1: Matroid, m2: Matroid, kind: Optional[SumKind] = None) -> BinaryMatroid:
    """The binary matroid on E1 xor E2 whose cycles are the sets C1 xor C2."""
    check_sum_preconditions(m1, m2, kind)
    b1, b2 = m1.to_binary(), m2.to_binary()
    union = sorted(b1.ground_set | b2.ground_set)
    uindex = {e: i for i, e in enumerate(union)}
    shared_mask = sum(1 << uindex[e] for e in b1.ground_set & b2.ground_set)

    def lift(b: BinaryMatroid, v: int) -> int:
        return sum(1 << uindex[b.elements[i]] for i in gf2.bits(v))

    span = gf2.reduce_basis(
        [lift(b1, v) for v in b1.cycle_basis_masks()] + [lift(b2, v) for v in b2.cycle_basis_masks()]
    )
    # combinations of span vectors that vanish on the shared coordinates
    constraint_rows = []
    for s in gf2.bits(shared_mask):
        constraint_rows.append(sum(1 << i for i, v in enumerate(span) if (v >> s) & 1))
    cycles_u = []
    for coeffs in gf2.nullspace(constraint_rows, len(span)):
        v = 0
        for i in gf2.bits(coeffs):
            v ^= span[i]
        cycles_u.append(v)
    result = [e for e in union if not (shared_mask >> uindex[e]) & 1]
    rindex = {e: i for i, e in enumerate(result)}
    cycles = [sum(1 << rindex[union[i]] for i in gf2.bits(v)) for v in cycles_u]
    return BinaryMatroid.from_cycle_space(result, cycles)


# ---------------------------------------------------------------------------
# Decomposition trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChildLink:
    id: str
    shared: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "shared", tuple(sorted(self.shared)))


@dataclass(frozen=True)
class DecompositionNode:
    id: str
    matroid: Matroid
    parent: Optional[str] = None
    parent_set: Tuple[str, ...] = ()
    children: Tuple[ChildLink, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "parent_set", tuple(sorted(self.parent_set)))
        object.__setattr__(self, "children", tuple(self.children))

    @property
    def special_sets(self) -> List[Tuple[str, ...]]:
        return [c.shared for c in self.children]

    def shared_labels(self) -> set:
        out = set(self.parent_set) if self.parent is not None else set()
        for c in self.children:
            out.update(c.shared)
        return out

    def own_elements(self) -> ElementSet:
        """Elements of this piece that survive composition."""
        return self.matroid.ground_set - self.shared_labels()


@dataclass(frozen=True)
class DecompositionTree:
    nodes: Mapping[str, DecompositionNode]
    root: str

    def __post_init__(self):
        object.__setattr__(self, "nodes", dict(self.nodes))

    def __getitem__(self, node_id: str) -> DecompositionNode:
        return self.nodes[node_id]

    def postorder(self, start: Optional[str] = None) -> List[str]:
        out: List[str] = []
        stack = [(start or self.root, False)]
        while stack:
            nid, done = stack.pop()
            if done:
                out.append(nid)
                continue
            stack.append((nid, True))
            for c in reversed(self.nodes[nid].children):
                stack.append((c.id, False))
        return out

    def subtree_elements(self, node_id: str) -> ElementSet:
        out = set()
        for nid in self.postorder(node_id):
            node = self.nodes[nid]
            own = node.own_elements()
            out |= own
        return frozenset(out)

    def node_of(self, label: str) -> str:
        """Id of the node whose surviving elements include ``label``."""
        for nid, node in self.nodes.items():
            if label in node.own_elements():
                return nid
        raise UnknownElement(label, "decomposition tree")

    def composed_elements(self) -> ElementSet:
        return self.subtree_elements(self.root)


@dataclass
class TreeReport:
    violations: List[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.valid


def is_vertex_star(graph: GraphRepr, labels: Iterable[str]) -> bool:
    target = set(labels)
    return any(set(graph.incident(v)) == target for v in graph.vertices)


def validate_tree(t: DecompositionTree) -> TreeReport:
    """Structural and side-condition checks; violations are collected, not raised."""
    rep = TreeReport()
    v = rep.violations
    nodes = t.nodes
    if t.root not in nodes:
        v.append(f"root {t.root!r} is not a node")
        return rep
    if nodes[t.root].parent is not None:
        v.append(f"root {t.root!r} has a parent")
    # tree shape
    seen = set()
    stack = [t.root]
    while stack:
        nid = stack.pop()
        if nid in seen:
            v.append(f"node {nid!r} reached twice (not a tree)")
            continue
        seen.add(nid)
        for c in nodes[nid].children:
            if c.id not in nodes:
                v.append(f"node {nid!r} lists unknown child {c.id!r}")
                continue
            if nodes[c.id].parent != nid:
                v.append(f"child {c.id!r} of {nid!r} names parent {nodes[c.id].parent!r}")
            stack.append(c.id)
    for nid in nodes:
        if nid not in seen:
            v.append(f"node {nid!r} is not reachable from the root")
    if v:
        return rep

    # label accounting: shared labels in exactly their two pieces, others unique
    owners: Dict[str, List[str]] = {}
    for nid, node in nodes.items():
        for e in node.matroid.ground_set:
            owners.setdefault(e, []).append(nid)
    link_of: Dict[str, Tuple[str, str]] = {}
    for nid, node in nodes.items():
        for c in node.children:
            if len(c.shared) not in (1, 3):
                v.append(f"link {nid!r}->{c.id!r} shares {len(c.shared)} elements (need 1 or 3)")
            if tuple(nodes[c.id].parent_set) != c.shared:
                v.append(
                    f"parent set of {c.id!r} {list(nodes[c.id].parent_set)} does not match "
                    f"special set {list(c.shared)} of {nid!r}"
                )
            for e in c.shared:
                if e in link_of:
                    v.append(f"element {e!r} shared by more than one link")
                link_of[e] = (nid, c.id)
    for e, where in owners.items():
        if e in link_of:
            expected = sorted(link_of[e])
            if sorted(where) != expected:
                v.append(f"shared element {e!r} appears in {sorted(where)}, expected exactly {expected}")
        elif len(where) > 1:
            v.append(f"element {e!r} appears in several pieces {sorted(where)} without being shared")
    for e, (p, c) in link_of.items():
        for nid in (p, c):
            if e not in nodes[nid].matroid.ground_set:
                v.append(f"shared element {e!r} missing from the matroid of {nid!r}")
    root = nodes[t.root]
    if len(root.parent_set) > 1:
        v.append("root parent set must hold at most one element")
    for e in root.parent_set:
        if e not in root.own_elements():
            v.append(f"root parent element {e!r} is not a surviving element of the root")
    if v:
        return rep

    # side conditions per link and per node
    for nid, node in nodes.items():
        m = node.matroid
        three_sets = [c.shared for c in node.children if len(c.shared) == 3]
        if node.parent is not None and len(node.parent_set) == 3:
            three_sets.append(node.parent_set)
        for a, b in itertools.combinations(three_sets, 2):
            if set(a) & set(b):
                v.append(f"3-element sets {list(a)} and {list(b)} of {nid!r} are not disjoint")
        sets = [c.shared for c in node.children]
        if node.parent is not None:
            sets.append(node.parent_set)
        for s in sets:
            if len(s) == 1:
                if _is_loop(m, s[0]):
                    v.append(f"{s[0]!r} is a loop in {nid!r} (2-sum element must not be)")
                elif _is_coloop(m, s[0]):
                    v.append(f"{s[0]!r} is a coloop in {nid!r} (2-sum element must not be)")
            elif len(s) == 3:
                if not m.is_circuit(s):
                    v.append(f"{list(s)} is not a circuit in both pieces (fails in {nid!r})")
                    continue
                cc = cocircuits_within(m, s)
                if cc:
                    v.append(
                        f"{list(s)} contains the cocircuit {sorted(cc[0])} of {nid!r} "
                        "(read as: no cocircuit contained in the shared 3-set)"
                    )
                if isinstance(m, CographicMatroid) and not is_vertex_star(m.graph, s):
                    v.append(f"{list(s)} in cographic {nid!r} is not simple (not a cut around a vertex)")
    return rep


def compose_tree(t: DecompositionTree, up_to: Optional[str] = None, *, check: bool = True) -> BinaryMatroid:
    """Fold delta-sums bottom-up; ``up_to=i`` returns the partial composition N_i."""
    if check:
        rep = validate_tree(t)
        if not rep.valid:
            raise InvalidTree(rep.violations)
    start = up_to or t.root
    if start not in t.nodes:
        raise KeyError(start)
    done: Dict[str, BinaryMatroid] = {}
    for nid in t.postorder(start):
        node = t.nodes[nid]
        cur = node.matroid.to_binary()
        for c in node.children:
            try:
                cur = delta_sum(cur, done.pop(c.id))
            except SumPreconditionViolated as exc:
                raise SumPreconditionViolated(exc.condition, exc.elements, (nid, c.id) + exc.path) from None
        done[nid] = cur
    return done[start]


def relabel(m: Matroid, mapping: Mapping[str, str]) -> Matroid:
    """Copy of ``m`` with labels renamed (graphic/cographic stay typed)."""
    ren = lambda e: mapping.get(e, e)  # noqa: E731
    if isinstance(m, (GraphicMatroid, CographicMatroid)):
        g = GraphRepr(m.graph.vertices, {ren(e): uv for e, uv in m.graph.edges.items()})
        return type(m)(g)
    b = m.to_binary()
    return BinaryMatroid(b.num_rows, {ren(e): col for e, col in b.columns.items()})


def attach_f2_leaf(t: DecompositionTree, f2: str, connector: Optional[str] = None) -> DecompositionTree:
    """Move ``f2`` into a fresh U_{1,2} leaf 2-summed onto its current piece."""
    owners = [nid for nid, n in t.nodes.items() if f2 in n.matroid.ground_set]
    if not owners:
        raise UnknownElement(f2, "decomposition tree")
    nid = owners[0]
    node = t.nodes[nid]
    if len(owners) > 1 or f2 in node.shared_labels():
        raise ElementShared(f"{f2!r} is a shared element and cannot be moved to a leaf")
    if node.parent is None and f2 in node.parent_set:
        raise ElementShared(f"{f2!r} is the root's parent-set element")
    all_labels = {e for n in t.nodes.values() for e in n.matroid.ground_set}
    connector = connector or f"{f2}~c"
    while connector in all_labels:
        connector += "'"
    leaf_id = f"{nid}~{f2}"
    while leaf_id in t.nodes:
        leaf_id += "'"
    leaf = DecompositionNode(
        leaf_id,
        BinaryMatroid(1, {connector: 1, f2: 1}),
        parent=nid,
        parent_set=(connector,),
    )
    host = replace(
        node,
        matroid=relabel(node.matroid, {f2: connector}),
        children=node.children + (ChildLink(leaf_id, (connector,)),),
    )
    nodes = dict(t.nodes)
    nodes[nid] = host
    nodes[leaf_id] = leaf
    return DecompositionTree(nodes, t.root)


def reroot(t: DecompositionTree, new_root: str, root_element: Optional[str] = None) -> DecompositionTree:
    """Same decomposition hung from ``new_root``; its parent set becomes ``(root_element,)``."""
    if new_root not in t.nodes:
        raise KeyError(new_root)
    adj: Dict[str, List[Tuple[str, Tuple[str, ...]]]] = {nid: [] for nid in t.nodes}
    for nid, node in t.nodes.items():
        for c in node.children:
            adj[nid].append((c.id, c.shared))
            adj[c.id].append((nid, c.shared))
    nodes: Dict[str, DecompositionNode] = {}
    stack: List[Tuple[str, Optional[str], Tuple[str, ...]]] = [(new_root, None, ())]
    while stack:
        nid, parent, pset = stack.pop()
        kids = tuple(ChildLink(k, s) for k, s in adj[nid] if k != parent)
        if parent is None:
            pset = (root_element,) if root_element is not None else ()
        nodes[nid] = DecompositionNode(nid, t.nodes[nid].matroid, parent, pset, kids)
        for k in kids:
            stack.append((k.id, nid, k.shared))
    return DecompositionTree(nodes, new_root)


def single_node_tree(m: Matroid, node_id: str = "n1", root_element: Optional[str] = None) -> DecompositionTree:
    pset = (root_element,) if root_element is not None else ()
    return DecompositionTree({node_id: DecompositionNode(node_id, m, None, pset, ())}, node_id)


def delta_closure_circuits(t: DecompositionTree) -> List[ElementSet]:
    """Independent oracle: minimal non-empty members of the xor-closure of piece cycles.

    Enumerates every choice of one cycle per piece (by brute force over each
    piece's circuits), keeps the xor when every shared label cancels, and
    returns the inclusion-minimal non-empty results.
    """
    from .matroid import circuits_up_to

    pieces = []
    for nid in t.postorder():
        m = t.nodes[nid].matroid
        circuits = circuits_up_to(m, len(m))
        # all cycles = xor-closure of circuits, computed without linear algebra
        cycles = {frozenset()}
        frontier = [frozenset()]
        while frontier:
            nxt = []
            for c in frontier:
                for z in circuits:
                    y = c ^ z
                    if y not in cycles:
                        cycles.add(y)
                        nxt.append(y)
            frontier = nxt
        pieces.append(sorted(cycles, key=sorted))
    shared = set()
    for node in t.nodes.values():
        for c in node.children:
            shared.update(c.shared)
    results = set()
    for choice in itertools.product(*pieces):
        acc = frozenset()
        for c in choice:
            acc = acc ^ c
        if acc and not (acc & shared):
            # every shared label must cancel in each cycle pair, which the xor checks
            results.add(acc)
    minimal = [c for c in results if not any(o < c for o in results)]
    return sorted(minimal, key=lambda c: (len(c), sorted(c)))
