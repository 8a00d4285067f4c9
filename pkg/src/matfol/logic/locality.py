"""Deciding basic local sentences through scattered sets and disjoint blocks."""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple, Union

from ..errors import MatfolError
from ..matroid import DEFAULT_BUDGET, Matroid
from ..metric import GaifmanGraph, distance_table
from .ast import And, Const, Formula, Not, Or, Scattered, Sentence
from .semantics import eval_bruteforce, eval_local, gaifman_for

log = logging.getLogger(__name__)


class PipelineInvariantError(MatfolError, AssertionError):
    """A structural claim the decision procedure relies on failed at runtime."""


@dataclass
class Block:
    center: str
    A: FrozenSet[str]
    B: FrozenSet[str]
    m: int


@dataclass
class BlsOutcome:
    verdict: bool
    k: int
    r: int
    d: int
    x_psi: Tuple[str, ...] = ()
    greedy: Tuple[str, ...] = ()
    xi: Optional[int] = None
    x_prime: Tuple[str, ...] = ()
    blocks: List[Block] = field(default_factory=list)
    decided_by: str = ""

    def stats(self) -> dict:
        return {
            "k": self.k,
            "r": self.r,
            "d": self.d,
            "x_psi": len(self.x_psi),
            "greedy": len(self.greedy),
            "xi": self.xi,
            "blocks": [b.m for b in self.blocks],
            "decided_by": self.decided_by,
        }


def greedy_scattered(candidates, g: GaifmanGraph, gap: int) -> List[str]:
    """Scan in order, keeping each element farther than ``gap`` from all kept ones."""
    out: List[str] = []
    for x in candidates:
        dist = g.distances_from(x)
        if all(dist.get(y, float("inf")) > gap for y in out):
            out.append(x)
    return out


def max_scattered_size(elements, g: GaifmanGraph, gap: int, cap: int) -> int:
    """Largest subset (size at most ``cap``) with pairwise distance above ``gap``."""
    elements = sorted(elements)
    best = 0
    for size in range(1, min(cap, len(elements)) + 1):
        found = False
        for combo in itertools.combinations(elements, size):
            if all(g.distance(a, b) > gap for a, b in itertools.combinations(combo, 2)):
                found = True
                break
        if not found:
            break
        best = size
    return best


def find_xi(x_psi, g: GaifmanGraph, r: int) -> int:
    """Smallest positive xi with no pair of ``x_psi`` at distance in [8^xi r + 1, 8^(xi+1) r]."""
    dists = set()
    for a, b in itertools.combinations(x_psi, 2):
        dv = g.distance(a, b)
        if dv != float("inf"):
            dists.add(dv)
    xi = 1
    while any(8**xi * r + 1 <= dv <= 8 ** (xi + 1) * r for dv in dists):
        xi += 1
    return xi


def bls_decision(
    b: Scattered,
    m: Matroid,
    d: int,
    *,
    g: Optional[GaifmanGraph] = None,
    budget: int = DEFAULT_BUDGET,
    check: bool = True,
    threads: int = 1,
) -> BlsOutcome:
    """Run the locality pipeline and return the verdict with its intermediate sets."""
    k, r = b.k, b.r
    if g is None:
        g = gaifman_for(m, d)
    out = BlsOutcome(False, k, r, d)

    def holds(x):
        return eval_local(b.psi, x, m, g, r, budget=budget)

    if threads > 1 and len(m) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            flags = list(pool.map(holds, m.elements))
    else:
        flags = [holds(x) for x in m.elements]
    x_psi = tuple(x for x, ok in zip(m.elements, flags) if ok)
    out.x_psi = x_psi

    if r == 0:
        # distance > 0 only asks for distinct elements
        out.verdict = len(x_psi) >= k
        out.decided_by = "r=0 count"
        return out

    greedy = greedy_scattered(x_psi, g, 2 * r)
    out.greedy = tuple(greedy)
    if check:
        for x in x_psi:
            if not any(g.distance(x, y) <= 2 * r for y in greedy):
                raise PipelineInvariantError(f"{x!r} is farther than 2r from every greedy pick")
    if len(greedy) >= k:
        out.verdict = True
        out.decided_by = "greedy"
        return out

    xi = find_xi(x_psi, g, r)
    out.xi = xi
    reach = 8**xi * r
    x_prime = greedy_scattered(greedy, g, reach)
    out.x_prime = tuple(x_prime)

    radius = reach + 2 * r
    blocks_a = [g.ball(x, radius) for x in x_prime]
    if check:
        for i, j in itertools.combinations(range(len(blocks_a)), 2):
            for a in blocks_a[i]:
                for c in blocks_a[j]:
                    if g.distance(a, c) <= 2 * r:
                        raise PipelineInvariantError(f"blocks {i} and {j} are within 2r via {a!r}, {c!r}")
        covered = set().union(*blocks_a) if blocks_a else set()
        if not set(x_psi) <= covered:
            raise PipelineInvariantError("some element satisfying psi lies outside every block")

    cap = 2 * d * r
    table = distance_table(m, min(cap, len(m)), budget=budget) if blocks_a else None
    total = 0
    for x, A in zip(x_prime, blocks_a):
        B = frozenset(
            e for e in m.elements if e in A or any(table(e, a) <= cap for a in A)
        )
        sub = m.restrict(B)
        gi = gaifman_for(sub, d)
        targets = sorted(A & set(x_psi))
        if check:
            for a, c in itertools.combinations(sorted(A), 2):
                if (g.distance(a, c) <= 2 * r) != (gi.distance(a, c) <= 2 * r):
                    raise PipelineInvariantError(
                        f"distance of {a!r} and {c!r} changes on the restriction to the buffer"
                    )
        mi = max_scattered_size(targets, gi, 2 * r, k)
        out.blocks.append(Block(x, A, B, mi))
        total += mi
        if mi >= k:
            out.verdict = True
            out.decided_by = "single block"
            return out
    out.verdict = total >= k
    out.decided_by = "block sum"
    return out


def decide_bls(b: Scattered, m: Matroid, d: int, **kw) -> bool:
    return bls_decision(b, m, d, **kw).verdict


def decide_sentence(
    s: Union[Sentence, Formula],
    m: Matroid,
    d: Optional[int] = None,
    *,
    budget: int = DEFAULT_BUDGET,
    trace: Optional[list] = None,
    **kw,
) -> bool:
    """Fold the Boolean structure; basic local sentences use the locality pipeline.

    Any other closed subformula is evaluated exhaustively (no parameterized
    running-time guarantee applies there).
    """
    f = s.formula if isinstance(s, Sentence) else s
    if d is None:
        d = s.depth if isinstance(s, Sentence) else None
    if d is None:
        from .ast import quantifier_depth

        d = quantifier_depth(f)
    g = gaifman_for(m, d)

    def fold(node: Formula) -> bool:
        if isinstance(node, Scattered):
            res = bls_decision(node, m, d, g=g, budget=budget, **kw)
            if trace is not None:
                trace.append(res)
            return res.verdict
        if isinstance(node, Const):
            return node.value
        if isinstance(node, Not):
            return not fold(node.body)
        if isinstance(node, And):
            return all(fold(p) for p in node.parts)
        if isinstance(node, Or):
            return any(fold(p) for p in node.parts)
        log.warning("evaluating a raw first-order subformula exhaustively")
        return eval_bruteforce(node, m, d, g=g, budget=budget)

    return fold(f)
