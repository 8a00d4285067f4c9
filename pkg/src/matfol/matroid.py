"""Matroid representations behind a single rank-oracle interface.

Every matroid exposes its ground set as sorted string labels; bit ``i`` of an
element mask corresponds to ``matroid.elements[i]``.  Subclasses only implement
``_rank_mask``; the circuit machinery in this module is written against the
oracle alone.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Tuple

from . import gf2
from .errors import NotBinary, SizeBoundTooLarge, UnknownElement

DEFAULT_BUDGET = 10**7
DEFAULT_AXIOM_BOUND = 9

ElementSet = FrozenSet[str]


def _popcount(v: int) -> int:
    return bin(v).count("1")


class Matroid:
    """Rank-oracle matroid on a finite set of string labels."""

    kind = "oracle"

    def __init__(self, elements: Iterable[str]):
        elems = tuple(sorted(elements))
        if len(set(elems)) != len(elems):
            raise ValueError("element labels must be pairwise distinct")
        self.elements: Tuple[str, ...] = elems
        self.ground_set: ElementSet = frozenset(elems)
        self._index: Dict[str, int] = {e: i for i, e in enumerate(elems)}
        self._rank_cache: Dict[int, int] = {}
        self.full_mask = (1 << len(elems)) - 1

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"{type(self).__name__}(n={len(self)}, rank={self.rank()})"

    # -- element/mask conversion -------------------------------------------

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownElement(label) from None

    def mask(self, x: Iterable[str]) -> int:
        if isinstance(x, str):
            x = (x,)
        m = 0
        for label in x:
            m |= 1 << self.index(label)
        return m

    def labels(self, mask: int) -> ElementSet:
        return frozenset(self.elements[i] for i in gf2.bits(mask))

    # -- rank oracle ---------------------------------------------------------

    def _rank_mask(self, mask: int) -> int:
        raise NotImplementedError

    def rank_mask(self, mask: int) -> int:
        r = self._rank_cache.get(mask)
        if r is None:
            r = self._rank_mask(mask)
            self._rank_cache[mask] = r
        return r

    def rank(self, x: Optional[Iterable[str]] = None) -> int:
        if x is None:
            return self.rank_mask(self.full_mask)
        return self.rank_mask(self.mask(x))

    def is_independent(self, x: Iterable[str]) -> bool:
        m = self.mask(x)
        return self.rank_mask(m) == _popcount(m)

    def is_circuit_mask(self, mask: int) -> bool:
        size = _popcount(mask)
        if size == 0 or self.rank_mask(mask) != size - 1:
            return False
        rest = mask
        while rest:
            low = rest & -rest
            rest ^= low
            if self.rank_mask(mask ^ low) != size - 1:
                return False
        return True

    def is_circuit(self, x: Iterable[str]) -> bool:
        return self.is_circuit_mask(self.mask(x))

    # -- derived matroids ----------------------------------------------------

    def dual(self) -> "Matroid":
        return DualMatroid(self)

    def restrict(self, x: Iterable[str]) -> "Matroid":
        return Restriction(self, x)

    def to_binary(self) -> "BinaryMatroid":
        """GF(2) representation reconstructed from the oracle.

        Only valid under the promise that the matroid is binary; the result is
        checked against the oracle on every circuit-defining rank.
        """
        return binary_from_oracle(self)

    def rank_table(self) -> List[int]:
        """Ranks of all ``2^n`` masks (for exhaustive checks)."""
        return [self.rank_mask(m) for m in range(1 << len(self))]


# ---------------------------------------------------------------------------
# Concrete representations
# ---------------------------------------------------------------------------


class BinaryMatroid(Matroid):
    """Vector matroid of GF(2) columns; ``columns[label]`` is an int of ``num_rows`` bits.

    Bit ``i`` of a column holds row ``i``; the JSON ``vector`` string lists rows
    top to bottom, so character ``i`` is bit ``i``.
    """

    kind = "binary"

    def __init__(self, num_rows: int, columns: Mapping[str, int]):
        super().__init__(columns)
        self.num_rows = num_rows
        for label, col in columns.items():
            if col < 0 or col >> num_rows:
                raise ValueError(f"column {label!r} does not fit in {num_rows} rows")
        self.columns: Dict[str, int] = {e: columns[e] for e in self.elements}
        self._cols = [self.columns[e] for e in self.elements]

    def _rank_mask(self, mask: int) -> int:
        return gf2.rank(self._cols[i] for i in gf2.bits(mask))

    def to_binary(self) -> "BinaryMatroid":
        return self

    def row_vectors(self) -> List[int]:
        """Rows of the representation as element masks."""
        return gf2.transpose(self._cols, self.num_rows)

    def cycle_basis_masks(self) -> List[int]:
        return gf2.nullspace(self.row_vectors(), len(self))

    def dual(self) -> "BinaryMatroid":
        return BinaryMatroid.from_cycle_space(self.elements, gf2.reduce_basis(self.row_vectors()))

    def restrict(self, x: Iterable[str]) -> "BinaryMatroid":
        keep = self.labels(self.mask(x))
        return BinaryMatroid(self.num_rows, {e: self.columns[e] for e in keep})

    @classmethod
    def from_rows(cls, elements: Iterable[str], rows: Iterable[int]) -> "BinaryMatroid":
        """Build from row vectors given as masks over sorted ``elements``."""
        elems = tuple(sorted(elements))
        rows = gf2.reduce_basis(rows)
        cols = gf2.transpose(rows, len(elems))
        return cls(len(rows), dict(zip(elems, cols)))

    @classmethod
    def from_cycle_space(cls, elements: Iterable[str], cycles: Iterable[int]) -> "BinaryMatroid":
        """Binary matroid whose cycle space is spanned by ``cycles`` (masks)."""
        elems = tuple(sorted(elements))
        rows = gf2.orthogonal_complement(list(cycles), len(elems))
        return cls.from_rows(elems, rows)


@dataclass(frozen=True)
class GraphRepr:
    """Multigraph with labelled edges; loops and parallel edges allowed."""

    vertices: Tuple[str, ...]
    edges: Mapping[str, Tuple[str, str]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", dict(self.edges))
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ValueError("duplicate vertex labels")
        for label, (u, v) in self.edges.items():
            if u not in vs or v not in vs:
                raise ValueError(f"edge {label!r} has an undeclared endpoint")

    def __hash__(self):
        return hash((self.vertices, tuple(sorted(self.edges.items()))))

    def incident(self, vertex: str) -> List[str]:
        return sorted(e for e, (u, v) in self.edges.items() if vertex in (u, v) and u != v)

    def subgraph(self, edge_labels: Iterable[str]) -> "GraphRepr":
        keep = set(edge_labels)
        return GraphRepr(self.vertices, {e: uv for e, uv in self.edges.items() if e in keep})

    def contract(self, edge_labels: Iterable[str]) -> "GraphRepr":
        """Contract the given edges; the remaining edges keep their labels."""
        gone = set(edge_labels)
        parent = {v: v for v in self.vertices}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for e in gone:
            u, v = self.edges[e]
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)
        verts = sorted({find(v) for v in self.vertices})
        edges = {e: (find(u), find(v)) for e, (u, v) in self.edges.items() if e not in gone}
        return GraphRepr(tuple(verts), edges)

    def components(self) -> List[FrozenSet[str]]:
        adj: Dict[str, set] = {v: set() for v in self.vertices}
        for u, v in self.edges.values():
            adj[u].add(v)
            adj[v].add(u)
        seen, out = set(), []
        for v in self.vertices:
            if v in seen:
                continue
            comp, stack = {v}, [v]
            while stack:
                for w in adj[stack.pop()]:
                    if w not in comp:
                        comp.add(w)
                        stack.append(w)
            seen |= comp
            out.append(frozenset(comp))
        return out


def _forest_rank(graph: GraphRepr, labels: Iterable[str]) -> int:
    parent: Dict[str, str] = {}

    def find(v):
        parent.setdefault(v, v)
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    r = 0
    for e in labels:
        u, v = graph.edges[e]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            r += 1
    return r


class GraphicMatroid(Matroid):
    """Cycle matroid M(G): a set is independent iff it spans a forest."""

    kind = "graphic"

    def __init__(self, graph: GraphRepr):
        super().__init__(graph.edges)
        self.graph = graph

    def _rank_mask(self, mask: int) -> int:
        return _forest_rank(self.graph, (self.elements[i] for i in gf2.bits(mask)))

    def dual(self) -> "CographicMatroid":
        return CographicMatroid(self.graph)

    def restrict(self, x: Iterable[str]) -> "GraphicMatroid":
        return GraphicMatroid(self.graph.subgraph(self.labels(self.mask(x))))

    def to_binary(self) -> BinaryMatroid:
        vindex = {v: i for i, v in enumerate(self.graph.vertices)}
        cols = {}
        for e, (u, v) in self.graph.edges.items():
            cols[e] = 0 if u == v else (1 << vindex[u]) | (1 << vindex[v])
        return BinaryMatroid(len(self.graph.vertices), cols)


class CographicMatroid(Matroid):
    """Bond matroid M*(G): independent iff deleting it keeps the component count."""

    kind = "cographic"

    def __init__(self, graph: GraphRepr):
        super().__init__(graph.edges)
        self.graph = graph
        self._graph_rank = _forest_rank(graph, graph.edges)

    def _rank_mask(self, mask: int) -> int:
        rest = self.full_mask & ~mask
        r_rest = _forest_rank(self.graph, (self.elements[i] for i in gf2.bits(rest)))
        return _popcount(mask) + r_rest - self._graph_rank

    def dual(self) -> GraphicMatroid:
        return GraphicMatroid(self.graph)

    def restrict(self, x: Iterable[str]) -> "CographicMatroid":
        keep = self.labels(self.mask(x))
        return CographicMatroid(self.graph.contract(self.ground_set - keep))

    def to_binary(self) -> BinaryMatroid:
        return GraphicMatroid(self.graph).to_binary().dual()


class UniformMatroid(Matroid):
    kind = "uniform"

    def __init__(self, r: int, n: int, prefix: str = "e"):
        if not 0 <= r <= n:
            raise ValueError("uniform matroid needs 0 <= r <= n")
        super().__init__(f"{prefix}{i}" for i in range(1, n + 1))
        self.r, self.n, self.prefix = r, n, prefix

    def _rank_mask(self, mask: int) -> int:
        return min(_popcount(mask), self.r)

    def dual(self) -> "UniformMatroid":
        return UniformMatroid(self.n - self.r, self.n, self.prefix)

    def to_binary(self) -> BinaryMatroid:
        if not (self.r <= 1 or self.r >= self.n - 1):
            raise NotBinary(f"U_{{{self.r},{self.n}}} is not binary")
        return binary_from_oracle(self)


R10_FIRST_ROW = "11001"


def r10_columns() -> List[int]:
    """Columns of ``[I5 | A]`` with ``A`` the circulant generated by ``R10_FIRST_ROW``."""
    rows = [R10_FIRST_ROW[-i:] + R10_FIRST_ROW[:-i] if i else R10_FIRST_ROW for i in range(5)]
    cols = [1 << i for i in range(5)]
    for j in range(5):
        cols.append(sum(int(rows[i][j]) << i for i in range(5)))
    return cols


class R10Matroid(BinaryMatroid):
    """R10, optionally with parallel copies of its original elements.

    ``parallel`` maps an extra label to the original element it duplicates.
    """

    kind = "r10"

    def __init__(self, prefix: str = "e", parallel: Optional[Mapping[str, str]] = None):
        names = [f"{prefix}{i}" for i in range(1, 11)]
        cols = dict(zip(names, r10_columns()))
        self.prefix = prefix
        self.parallel = dict(parallel or {})
        for extra, orig in self.parallel.items():
            if orig not in cols or extra in cols:
                raise ValueError(f"bad parallel extension {extra!r} -> {orig!r}")
            cols[extra] = cols[orig]
        super().__init__(5, cols)


class DualMatroid(Matroid):
    """Generic dual through r*(X) = |X| + r(E - X) - r(E)."""

    kind = "dual"

    def __init__(self, base: Matroid):
        super().__init__(base.elements)
        self.base = base

    def _rank_mask(self, mask: int) -> int:
        b = self.base
        return _popcount(mask) + b.rank_mask(b.full_mask & ~mask) - b.rank_mask(b.full_mask)

    def dual(self) -> Matroid:
        return self.base


class Restriction(Matroid):
    kind = "restriction"

    def __init__(self, base: Matroid, x: Iterable[str]):
        keep = base.labels(base.mask(x))
        super().__init__(keep)
        self.base = base
        self._base_bits = [base.index(e) for e in self.elements]

    def _rank_mask(self, mask: int) -> int:
        bm = 0
        for i in gf2.bits(mask):
            bm |= 1 << self._base_bits[i]
        return self.base.rank_mask(bm)

    def restrict(self, x: Iterable[str]) -> Matroid:
        return Restriction(self.base, self.labels(self.mask(x)))


def binary_from_oracle(m: Matroid) -> BinaryMatroid:
    """GF(2) representation of an oracle matroid promised to be binary.

    Takes a basis B; the column of e outside B is the indicator of its
    fundamental circuit restricted to B.
    """
    basis = greedy_basis(m)
    bindex = {b: i for i, b in enumerate(basis)}
    bmask = m.mask(basis)
    cols = {b: 1 << bindex[b] for b in basis}
    for e in m.elements:
        if e in bindex:
            continue
        circuit = fundamental_circuit(m, bmask, m.index(e))
        cols[e] = sum(1 << bindex[m.elements[i]] for i in gf2.bits(circuit) if m.elements[i] in bindex)
    rep = BinaryMatroid(len(basis), cols)
    for mask in range(1 << len(m)) if len(m) <= 12 else ():
        if rep.rank_mask(mask) != m.rank_mask(mask):
            raise NotBinary("oracle matroid is not binary")
    return rep


def greedy_basis(m: Matroid) -> List[str]:
    mask = 0
    for i in range(len(m)):
        if m.rank_mask(mask | (1 << i)) > m.rank_mask(mask):
            mask |= 1 << i
    return [m.elements[i] for i in gf2.bits(mask)]


def fundamental_circuit(m: Matroid, basis_mask: int, i: int) -> int:
    """Unique circuit inside basis + element ``i`` (``i`` outside the basis)."""
    r = m.rank_mask(basis_mask)
    out = 1 << i
    for b in gf2.bits(basis_mask):
        if m.rank_mask((basis_mask ^ (1 << b)) | (1 << i)) == r:
            out |= 1 << b
    return out


# ---------------------------------------------------------------------------
# Circuit enumeration and structural queries
# ---------------------------------------------------------------------------


def _check_budget(n_free: int, sizes: Iterable[int], budget: int):
    total = 0
    for s in sizes:
        total += math.comb(n_free, s)
        if total > budget:
            raise SizeBoundTooLarge(
                f"circuit enumeration needs more than {budget} subset checks"
            )


def iter_circuit_masks(
    m: Matroid,
    max_size: int,
    must_contain: int = 0,
    *,
    budget: int = DEFAULT_BUDGET,
    within: Optional[int] = None,
) -> Iterator[int]:
    """Yield circuit masks by increasing size, then lexicographic label order.

    ``within`` restricts the search to a sub-mask of the ground set.
    """
    if max_size < 0:
        raise ValueError("max_size must be non-negative")
    pool_mask = m.full_mask if within is None else within
    if must_contain & ~pool_mask:
        return
    free = gf2.bits(pool_mask & ~must_contain)
    base = _popcount(must_contain)
    sizes = range(max(base, 1), min(max_size, base + len(free)) + 1)
    _check_budget(len(free), (s - base for s in sizes), budget)
    for size in sizes:
        for combo in itertools.combinations(free, size - base):
            mask = must_contain
            for i in combo:
                mask |= 1 << i
            if m.is_circuit_mask(mask):
                yield mask


def circuits_up_to(
    m: Matroid,
    max_size: int,
    must_contain: Iterable[str] = (),
    *,
    budget: int = DEFAULT_BUDGET,
) -> List[ElementSet]:
    """All circuits of size at most ``max_size`` containing ``must_contain``."""
    fmask = m.mask(must_contain)
    out = [m.labels(c) for c in iter_circuit_masks(m, max_size, fmask, budget=budget)]
    out.sort(key=lambda c: (len(c), sorted(c)))
    return out


def components(m: Matroid) -> List[ElementSet]:
    """Connected components of ``m`` (classes of the common-circuit relation).

    Uses the fact that components are the connected pieces of the union of the
    fundamental circuits of any basis.
    """
    parent = list(range(len(m)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    basis = m.mask(greedy_basis(m))
    for i in range(len(m)):
        if (basis >> i) & 1:
            continue
        bits = gf2.bits(fundamental_circuit(m, basis, i))
        for j in bits[1:]:
            a, b = find(bits[0]), find(j)
            if a != b:
                parent[a] = b
    groups: Dict[int, set] = {}
    for i, e in enumerate(m.elements):
        groups.setdefault(find(i), set()).add(e)
    return sorted((frozenset(g) for g in groups.values()), key=lambda g: sorted(g))


def is_connected(m: Matroid) -> bool:
    if len(m) == 0:
        raise ValueError("connectivity needs a non-empty ground set")
    return len(components(m)) == 1


@dataclass
class AxiomReport:
    violations: List[str] = field(default_factory=list)
    checked_subsets: int = 0

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.valid


def validate_axioms(m: Matroid, *, bound: int = DEFAULT_AXIOM_BOUND, max_reported: int = 20) -> AxiomReport:
    """Exhaustively check the independence axioms and the rank axioms.

    Independence is derived from the rank oracle (``r(X) == |X|``).
    """
    n = len(m)
    if n > bound:
        raise SizeBoundTooLarge(f"validate_axioms limited to {bound} elements, got {n}")
    size = 1 << n
    r = m.rank_table()
    pc = [_popcount(x) for x in range(size)]
    report = AxiomReport(checked_subsets=size)
    v = report.violations

    def flag(msg):
        if len(v) < max_reported:
            v.append(msg)

    fmt = m.labels
    if r[0] != 0:
        flag("rank of the empty set is not 0 (empty set not independent)")
    for x in range(size):
        if not 0 <= r[x] <= pc[x]:
            flag(f"rank out of range on {sorted(fmt(x))}: {r[x]}")
        rest = x
        while rest:
            low = rest & -rest
            rest ^= low
            sub = x ^ low
            if r[sub] > r[x]:
                flag(f"monotonicity fails: r({sorted(fmt(sub))}) > r({sorted(fmt(x))})")
            if r[x] - r[sub] > 1:
                flag(f"unit increase fails: r({sorted(fmt(x))}) - r({sorted(fmt(sub))}) > 1")
            if r[x] == pc[x] and r[sub] != pc[sub]:
                flag(f"subset of independent {sorted(fmt(x))} is dependent")
    indep = [x for x in range(size) if r[x] == pc[x]]
    for x in indep:
        for y in indep:
            if pc[x] < pc[y]:
                cand = y & ~x
                ok = False
                while cand:
                    low = cand & -cand
                    cand ^= low
                    if r[x | low] == pc[x] + 1:
                        ok = True
                        break
                if not ok:
                    flag(f"augmentation fails for {sorted(fmt(x))} from {sorted(fmt(y))}")
    for a in range(size):
        for b in range(a + 1, size):
            if r[a & b] + r[a | b] > r[a] + r[b]:
                flag(f"submodularity fails on {sorted(fmt(a))}, {sorted(fmt(b))}")
    return report


def rank(m: Matroid, x: Iterable[str]) -> int:
    return m.rank(x)


def is_independent(m: Matroid, x: Iterable[str]) -> bool:
    return m.is_independent(x)


def is_circuit(m: Matroid, x: Iterable[str]) -> bool:
    return m.is_circuit(x)


def dual(m: Matroid) -> Matroid:
    return m.dual()


def restrict(m: Matroid, x: Iterable[str]) -> Matroid:
    return m.restrict(x)


def graphic(vertices: Iterable[str], edges: Mapping[str, Tuple[str, str]]) -> GraphicMatroid:
    return GraphicMatroid(GraphRepr(tuple(vertices), dict(edges)))


def cographic(vertices: Iterable[str], edges: Mapping[str, Tuple[str, str]]) -> CographicMatroid:
    return CographicMatroid(GraphRepr(tuple(vertices), dict(edges)))
