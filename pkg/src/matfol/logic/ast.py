"""Immutable formula trees for first-order logic over matroid elements."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import FrozenSet, Iterator, Tuple


class Formula:
    """Base class of all formula nodes."""

    pos: int

    def children(self) -> Tuple["Formula", ...]:
        return ()

    def __and__(self, other):
        return And((self, other))

    def __or__(self, other):
        return Or((self, other))

    def __invert__(self):
        return Not(self)


def _node(cls):
    return dataclass(frozen=True)(cls)


@_node
class Const(Formula):
    value: bool
    pos: int = field(default=-1, compare=False, repr=False)


TRUE = Const(True)
FALSE = Const(False)


@_node
class Indep(Formula):
    vars: Tuple[str, ...]
    pos: int = field(default=-1, compare=False, repr=False)


@_node
class Circ(Formula):
    """True iff the values are pairwise distinct and form a circuit of size ``len(vars)``."""

    vars: Tuple[str, ...]
    pos: int = field(default=-1, compare=False, repr=False)


@_node
class Eq(Formula):
    left: str
    right: str
    pos: int = field(default=-1, compare=False, repr=False)


@_node
class DistLe(Formula):
    """Gaifman-graph distance between two variables is at most ``bound``."""

    left: str
    right: str
    bound: int
    pos: int = field(default=-1, compare=False, repr=False)


@_node
class Not(Formula):
    body: Formula
    pos: int = field(default=-1, compare=False, repr=False)

    def children(self):
        return (self.body,)


@_node
class And(Formula):
    parts: Tuple[Formula, ...]
    pos: int = field(default=-1, compare=False, repr=False)

    def children(self):
        return self.parts


@_node
class Or(Formula):
    parts: Tuple[Formula, ...]
    pos: int = field(default=-1, compare=False, repr=False)

    def children(self):
        return self.parts


@_node
class Exists(Formula):
    var: str
    body: Formula
    pos: int = field(default=-1, compare=False, repr=False)

    def children(self):
        return (self.body,)


@_node
class Forall(Formula):
    var: str
    body: Formula
    pos: int = field(default=-1, compare=False, repr=False)

    def children(self):
        return (self.body,)


@_node
class BallExists(Formula):
    """``exists var in ball(center, radius) . body``."""

    var: str
    center: str
    radius: int
    body: Formula
    pos: int = field(default=-1, compare=False, repr=False)

    def children(self):
        return (self.body,)


@_node
class BallForall(Formula):
    var: str
    center: str
    radius: int
    body: Formula
    pos: int = field(default=-1, compare=False, repr=False)

    def children(self):
        return (self.body,)


LOCAL_VAR = "x"


@_node
class Scattered(Formula):
    """Basic local sentence: k elements pairwise farther than 2r apart, each satisfying psi."""

    k: int
    r: int
    psi: Formula
    pos: int = field(default=-1, compare=False, repr=False)

    def children(self):
        return (self.psi,)


Quantifier = (Exists, Forall, BallExists, BallForall)
BasicLocalSentence = Scattered


@dataclass(frozen=True)
class Sentence:
    formula: Formula
    depth: int
    source: str = field(default="", compare=False, repr=False)

    def leaves(self) -> Iterator[Scattered]:
        """Basic local sentences occurring at the Boolean top level."""
        stack = [self.formula]
        while stack:
            f = stack.pop()
            if isinstance(f, Scattered):
                yield f
            elif isinstance(f, (Not, And, Or)):
                stack.extend(reversed(f.children()))

    @property
    def is_raw(self) -> bool:
        return not any(True for _ in self.leaves())


def walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))


def free_vars(f: Formula) -> FrozenSet[str]:
    if isinstance(f, (Indep, Circ)):
        return frozenset(f.vars)
    if isinstance(f, (Eq, DistLe)):
        return frozenset((f.left, f.right))
    if isinstance(f, Const):
        return frozenset()
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    if isinstance(f, (BallExists, BallForall)):
        return (free_vars(f.body) - {f.var}) | {f.center}
    if isinstance(f, Scattered):
        return frozenset()
    out = frozenset()
    for c in f.children():
        out |= free_vars(c)
    return out


def quantifier_depth(f: Formula) -> int:
    if isinstance(f, Quantifier):
        return 1 + quantifier_depth(f.body)
    if isinstance(f, Scattered):
        return f.k + quantifier_depth(f.psi)
    return max((quantifier_depth(c) for c in f.children()), default=0)


def all_names(f: Formula) -> FrozenSet[str]:
    out = set()
    for node in walk(f):
        if isinstance(node, (Indep, Circ)):
            out.update(node.vars)
        elif isinstance(node, (Eq, DistLe)):
            out.update((node.left, node.right))
        elif isinstance(node, (Exists, Forall)):
            out.add(node.var)
        elif isinstance(node, (BallExists, BallForall)):
            out.update((node.var, node.center))
        elif isinstance(node, Scattered):
            out.add(LOCAL_VAR)
    return frozenset(out)


def fresh_name(avoid, stem: str = "_v") -> str:
    for i in itertools.count(1):
        name = f"{stem}{i}"
        if name not in avoid:
            return name


def substitute(f: Formula, var: str, new: str) -> Formula:
    """Replace free occurrences of ``var`` by ``new``, renaming binders that would capture it."""
    ren = lambda v: new if v == var else v  # noqa: E731
    if isinstance(f, (Indep, Circ)):
        return type(f)(tuple(ren(v) for v in f.vars), f.pos)
    if isinstance(f, Eq):
        return Eq(ren(f.left), ren(f.right), f.pos)
    if isinstance(f, DistLe):
        return DistLe(ren(f.left), ren(f.right), f.bound, f.pos)
    if isinstance(f, (Const, Scattered)):
        return f
    if isinstance(f, Not):
        return Not(substitute(f.body, var, new), f.pos)
    if isinstance(f, (And, Or)):
        return type(f)(tuple(substitute(p, var, new) for p in f.parts), f.pos)
    if isinstance(f, (Exists, Forall, BallExists, BallForall)):
        ball = isinstance(f, (BallExists, BallForall))
        center = ren(f.center) if ball else None
        if f.var == var:
            # var is rebound here: only the centre can still refer to the outer one
            return type(f)(f.var, center, f.radius, f.body, f.pos) if ball else f
        bound, body = f.var, f.body
        if bound == new and var in free_vars(body):
            bound = fresh_name(all_names(body) | {var, new})
            body = substitute(body, f.var, bound)
        body = substitute(body, var, new)
        if ball:
            return type(f)(bound, center, f.radius, body, f.pos)
        return type(f)(bound, body, f.pos)
    raise TypeError(f"unknown formula node {f!r}")


def expand_scattered(s: Scattered, names=None) -> Formula:
    """The raw form: exists x1..xk with pairwise distance above 2r and psi at each."""
    avoid = set(all_names(s.psi)) | {LOCAL_VAR}
    if names is None:
        names = []
        for _ in range(s.k):
            n = fresh_name(avoid, "_x")
            avoid.add(n)
            names.append(n)
    names = list(names)
    conj = [Not(DistLe(a, b, 2 * s.r)) for a, b in itertools.combinations(names, 2)]
    conj += [substitute(s.psi, LOCAL_VAR, n) for n in names]
    body = conj[0] if len(conj) == 1 else And(tuple(conj))
    for n in reversed(names):
        body = Exists(n, body)
    return body
