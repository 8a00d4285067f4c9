"""Brute-force semantics: circuit reduction, exhaustive evaluation, local evaluation."""

from __future__ import annotations

import itertools
from typing import Dict, Iterable, Optional, Union

from ..errors import BudgetExceeded, ScopeError
from ..matroid import DEFAULT_BUDGET, Matroid
from ..metric import GaifmanGraph, gaifman_graph
from .ast import (
    LOCAL_VAR,
    And,
    BallExists,
    BallForall,
    Circ,
    Const,
    DistLe,
    Eq,
    Exists,
    Forall,
    Formula,
    Indep,
    Not,
    Or,
    Scattered,
    Sentence,
    expand_scattered,
    free_vars,
    quantifier_depth,
)
from .parser import locality_radius


def circuit_reduce(s: Union[Sentence, Formula]) -> Union[Sentence, Formula]:
    """Replace every ``indep`` atom by the conjunction of negated circuit atoms."""
    if isinstance(s, Sentence):
        f = _reduce(s.formula)
        return Sentence(f, quantifier_depth(f), s.source)
    return _reduce(s)


def _reduce(f: Formula) -> Formula:
    if isinstance(f, Indep):
        conj = [
            Not(Circ(sub))
            for k in range(1, len(f.vars) + 1)
            for sub in itertools.combinations(f.vars, k)
        ]
        return conj[0] if len(conj) == 1 else And(tuple(conj), f.pos)
    if isinstance(f, (Circ, Eq, DistLe, Const)):
        return f
    if isinstance(f, Not):
        return Not(_reduce(f.body), f.pos)
    if isinstance(f, (And, Or)):
        return type(f)(tuple(_reduce(p) for p in f.parts), f.pos)
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.var, _reduce(f.body), f.pos)
    if isinstance(f, (BallExists, BallForall)):
        return type(f)(f.var, f.center, f.radius, _reduce(f.body), f.pos)
    if isinstance(f, Scattered):
        return Scattered(f.k, f.r, _reduce(f.psi), f.pos)
    raise TypeError(f"unknown formula node {f!r}")


def empty_gaifman(m: Matroid, d: int = 0) -> GaifmanGraph:
    return GaifmanGraph.from_edges(m.elements, (), d)


def gaifman_for(m: Matroid, d: int) -> GaifmanGraph:
    return gaifman_graph(m, d) if d >= 1 else empty_gaifman(m, d)


class Evaluator:
    """Exhaustive evaluation over one matroid and one Gaifman graph.

    Results are memoized per node on the values of that node's free variables,
    so subformulas that ignore outer variables are evaluated once per relevant
    assignment.
    """

    def __init__(self, m: Matroid, g: GaifmanGraph, *, budget: int = DEFAULT_BUDGET):
        self.m = m
        self.g = g
        self.budget = budget
        self.domain = m.elements
        self._memo: Dict[tuple, bool] = {}
        self._fv: Dict[int, tuple] = {}
        self._expanded: Dict[int, Formula] = {}
        self._keep = []  # nodes created here must outlive their ids

    def check_budget(self, depth: int):
        n = max(len(self.domain), 1)
        if n**depth > self.budget:
            raise BudgetExceeded(f"exhaustive evaluation needs {n}^{depth} assignments (budget {self.budget})")

    def free(self, f: Formula) -> tuple:
        key = id(f)
        fv = self._fv.get(key)
        if fv is None:
            fv = tuple(sorted(free_vars(f)))
            self._fv[key] = fv
        return fv

    def evaluate(self, f: Formula, env: Optional[Dict[str, str]] = None) -> bool:
        env = dict(env or {})
        missing = set(free_vars(f)) - set(env)
        if missing:
            raise ScopeError(f"no value for free variable {sorted(missing)[0]!r}")
        self.check_budget(quantifier_depth(f))
        return self._eval(f, env)

    def _eval(self, f: Formula, env: Dict[str, str]) -> bool:
        key = (id(f),) + tuple(env[v] for v in self.free(f))
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        val = self._compute(f, env)
        self._memo[key] = val
        return val

    def _compute(self, f: Formula, env: Dict[str, str]) -> bool:
        m = self.m
        if isinstance(f, Const):
            return f.value
        if isinstance(f, Circ):
            vals = [env[v] for v in f.vars]
            if len(set(vals)) != len(vals):
                return False
            return m.is_circuit_mask(m.mask(vals))
        if isinstance(f, Indep):
            return m.is_independent(set(env[v] for v in f.vars))
        if isinstance(f, Eq):
            return env[f.left] == env[f.right]
        if isinstance(f, DistLe):
            return self.g.distance(env[f.left], env[f.right]) <= f.bound
        if isinstance(f, Not):
            return not self._eval(f.body, env)
        if isinstance(f, And):
            return all(self._eval(p, env) for p in f.parts)
        if isinstance(f, Or):
            return any(self._eval(p, env) for p in f.parts)
        if isinstance(f, (Exists, Forall, BallExists, BallForall)):
            if isinstance(f, (BallExists, BallForall)):
                dom = sorted(self.g.ball(env[f.center], f.radius))
            else:
                dom = self.domain
            want = isinstance(f, (Exists, BallExists))
            saved = env.get(f.var)
            try:
                for v in dom:
                    env[f.var] = v
                    if self._eval(f.body, env) == want:
                        return want
                return not want
            finally:
                if saved is None:
                    env.pop(f.var, None)
                else:
                    env[f.var] = saved
        if isinstance(f, Scattered):
            ex = self._expanded.get(id(f))
            if ex is None:
                ex = expand_scattered(f)
                self._expanded[id(f)] = ex
                self._keep.append(ex)
            return self._eval(ex, {})
        raise TypeError(f"unknown formula node {f!r}")


def eval_bruteforce(
    s: Union[Sentence, Formula],
    m: Matroid,
    d: Optional[int] = None,
    *,
    g: Optional[GaifmanGraph] = None,
    budget: int = DEFAULT_BUDGET,
    env: Optional[Dict[str, str]] = None,
) -> bool:
    """Evaluate by trying every assignment; distances use the Gaifman graph for ``d``.

    ``d`` defaults to the quantifier depth of the sentence.
    """
    f = s.formula if isinstance(s, Sentence) else s
    if d is None:
        d = s.depth if isinstance(s, Sentence) else quantifier_depth(f)
    if g is None:
        g = gaifman_for(m, d)
    return Evaluator(m, g, budget=budget).evaluate(f, env)


def eval_local(
    psi: Formula,
    x: str,
    m: Matroid,
    g: GaifmanGraph,
    r: Optional[int] = None,
    *,
    budget: int = DEFAULT_BUDGET,
) -> bool:
    """Evaluate ``psi[x]`` on the restriction of ``m`` to the radius-r ball around ``x``.

    ``r`` defaults to the smallest radius for which ``psi`` is local.  Distance
    atoms and ball quantifiers use the ball's induced subgraph of ``g``.
    """
    if r is None:
        r = locality_radius(psi)
    ball = g.ball(x, r)
    sub = m.restrict(ball)
    return Evaluator(sub, g.induced(ball), budget=budget).evaluate(psi, {LOCAL_VAR: x})
