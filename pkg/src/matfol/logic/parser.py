"""Recursive-descent parser and printer for the sentence language.

Precedence from loosest to tightest: ``|``, ``&``, ``!``.  A quantifier body
extends as far to the right as possible.  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional

from ..errors import FormulaSyntaxError, LocalityViolation, ScopeError
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
    free_vars,
    quantifier_depth,
)

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><=|[(){},.&|!=])
    """,
    re.VERBOSE,
)

KEYWORDS = {"exists", "forall", "in", "ball", "scattered", "indep", "dist", "true", "false"}
_CIRC = re.compile(r"circ(\d*)$")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> List[Token]:
    out = []
    i = 0
    while i < len(text):
        mt = _TOKEN.match(text, i)
        if not mt:
            raise FormulaSyntaxError(f"unexpected character {text[i]!r}", i)
        kind = mt.lastgroup
        if kind != "ws":
            out.append(Token(kind, mt.group(), i))
        i = mt.end()
    out.append(Token("eof", "", len(text)))
    return out


class Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    # -- token helpers -------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "ident") and self.tok.text == text

    def take(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"unexpected {self.describe()}", [repr(text)])
        t = self.tok
        self.i += 1
        return t

    def take_int(self) -> int:
        if self.tok.kind != "int":
            self.fail(f"unexpected {self.describe()}", ["an integer"])
        t = self.tok
        self.i += 1
        return int(t.text)

    def take_var(self) -> str:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS or _CIRC.match(t.text):
            self.fail(f"unexpected {self.describe()}", ["a variable name"])
        self.i += 1
        return t.text

    def describe(self) -> str:
        return "end of input" if self.tok.kind == "eof" else repr(self.tok.text)

    def fail(self, msg, expected=()):
        raise FormulaSyntaxError(msg, self.tok.pos, expected)

    # -- grammar -------------------------------------------------------------

    def parse(self) -> Formula:
        f = self.formula()
        if self.tok.kind != "eof":
            self.fail(f"unexpected {self.describe()}", ["'&'", "'|'", "end of input"])
        return f

    def formula(self) -> Formula:
        pos = self.tok.pos
        parts = [self.conjunction()]
        while self.at("|"):
            self.i += 1
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts), pos)

    def conjunction(self) -> Formula:
        pos = self.tok.pos
        parts = [self.unary()]
        while self.at("&"):
            self.i += 1
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts), pos)

    def unary(self) -> Formula:
        pos = self.tok.pos
        if self.at("!"):
            self.i += 1
            return Not(self.unary(), pos)
        if self.at("exists") or self.at("forall"):
            return self.quantifier()
        return self.primary()

    def quantifier(self) -> Formula:
        pos = self.tok.pos
        existential = self.tok.text == "exists"
        self.i += 1
        var = self.take_var()
        if self.at("in"):
            self.i += 1
            self.take("ball")
            self.take("(")
            center = self.take_var()
            self.take(",")
            radius = self.take_int()
            self.take(")")
            self.take(".")
            body = self.formula()
            cls = BallExists if existential else BallForall
            return cls(var, center, radius, body, pos)
        self.take(".")
        body = self.formula()
        return (Exists if existential else Forall)(var, body, pos)

    def primary(self) -> Formula:
        t = self.tok
        if self.at("("):
            self.i += 1
            f = self.formula()
            self.take(")")
            return f
        if t.kind != "ident":
            self.fail(f"unexpected {self.describe()}", ["a formula"])
        if t.text in ("true", "false"):
            self.i += 1
            return Const(t.text == "true", t.pos)
        if t.text == "scattered":
            return self.scattered()
        if t.text == "indep":
            self.i += 1
            return Indep(self.var_list(), t.pos)
        mc = _CIRC.match(t.text)
        if mc:
            self.i += 1
            args_pos = self.tok.pos
            args = self.var_list()
            if mc.group(1):
                arity = int(mc.group(1))
                if arity != len(args):
                    raise FormulaSyntaxError(
                        f"{t.text} expects {arity} arguments, got {len(args)}", args_pos
                    )
            return Circ(args, t.pos)
        if t.text == "dist":
            self.i += 1
            self.take("(")
            a = self.take_var()
            self.take(",")
            b = self.take_var()
            self.take(")")
            self.take("<=")
            return DistLe(a, b, self.take_int(), t.pos)
        a = self.take_var()
        self.take("=")
        return Eq(a, self.take_var(), t.pos)

    def var_list(self):
        self.take("(")
        out = [self.take_var()]
        while self.at(","):
            self.i += 1
            out.append(self.take_var())
        self.take(")")
        return tuple(out)

    def scattered(self) -> Scattered:
        pos = self.take("scattered").pos
        self.take("(")
        self.take("k")
        self.take("=")
        k_pos = self.tok.pos
        k = self.take_int()
        if k < 1:
            raise FormulaSyntaxError("k must be positive", k_pos)
        self.take(",")
        self.take("r")
        self.take("=")
        r = self.take_int()
        self.take(")")
        self.take("{")
        psi = self.formula()
        self.take("}")
        return Scattered(k, r, psi, pos)


# ---------------------------------------------------------------------------
# Scope and locality checks
# ---------------------------------------------------------------------------


def check_scope(f: Formula, bound=frozenset()) -> None:
    """Every variable must be bound; ``scattered`` bodies may use ``x`` only."""
    if isinstance(f, (Indep, Circ, Eq, DistLe)):
        missing = free_vars(f) - bound
        if missing:
            raise ScopeError(f"unbound variable {sorted(missing)[0]!r} at offset {f.pos}")
        return
    if isinstance(f, (BallExists, BallForall)):
        if f.center not in bound:
            raise ScopeError(f"ball centre {f.center!r} is not bound at offset {f.pos}")
        check_scope(f.body, bound | {f.var})
        return
    if isinstance(f, (Exists, Forall)):
        check_scope(f.body, bound | {f.var})
        return
    if isinstance(f, Scattered):
        check_scope(f.psi, frozenset({LOCAL_VAR}))
        check_locality(f)
        return
    for c in f.children():
        check_scope(c, bound)


def check_locality(s: Scattered) -> None:
    """Raise :class:`LocalityViolation` unless ``psi`` only looks inside ball(x, r).

    Each variable carries a radius: 0 for ``x`` and ``rad(c) + q`` for a
    variable bound in ``ball(c, q)``; radii may not exceed ``r``.  A distance
    atom ``dist(a, b) <= q`` needs ``min(rad(a), rad(b)) + q <= r`` so that
    every witnessing path stays inside the ball.
    """
    r = s.r

    def visit(f: Formula, rad: Dict[str, int]):
        if isinstance(f, (Exists, Forall)):
            raise LocalityViolation(f"unbounded quantifier over {f.var!r} at offset {f.pos}")
        if isinstance(f, Scattered):
            raise LocalityViolation(f"nested scattered block at offset {f.pos}")
        if isinstance(f, (BallExists, BallForall)):
            reach = rad[f.center] + f.radius
            if reach > r:
                raise LocalityViolation(
                    f"ball({f.center},{f.radius}) at offset {f.pos} reaches distance {reach} > r = {r}"
                )
            visit(f.body, {**rad, f.var: reach})
            return
        if isinstance(f, DistLe):
            reach = min(rad[f.left], rad[f.right]) + f.bound
            if reach > r:
                raise LocalityViolation(
                    f"dist({f.left},{f.right}) <= {f.bound} at offset {f.pos} reaches {reach} > r = {r}"
                )
            return
        for c in f.children():
            visit(c, rad)

    visit(s.psi, {LOCAL_VAR: 0})


def locality_radius(psi: Formula) -> int:
    """Smallest r for which ``psi`` (free variable ``x``) passes the locality check."""
    need = 0

    def visit(f: Formula, rad: Dict[str, int]):
        nonlocal need
        if isinstance(f, (Exists, Forall, Scattered)):
            raise LocalityViolation(f"formula is not local at offset {f.pos}")
        if isinstance(f, (BallExists, BallForall)):
            reach = rad[f.center] + f.radius
            need = max(need, reach)
            visit(f.body, {**rad, f.var: reach})
            return
        if isinstance(f, DistLe):
            need = max(need, min(rad[f.left], rad[f.right]) + f.bound)
            return
        for c in f.children():
            visit(c, rad)

    visit(psi, {LOCAL_VAR: 0})
    return need


def parse_formula(text: str) -> Formula:
    return Parser(text).parse()


def parse(text: str) -> Sentence:
    """Parse a closed sentence and check scoping and locality."""
    f = parse_formula(text)
    check_scope(f)
    return Sentence(f, quantifier_depth(f), text)


def parse_local(text: str, r: Optional[int] = None) -> Formula:
    """Parse an r-local formula whose only free variable is ``x``."""
    f = parse_formula(text)
    check_scope(f, frozenset({LOCAL_VAR}))
    rad = locality_radius(f)
    if r is not None and rad > r:
        raise LocalityViolation(f"formula needs radius {rad} > r = {r}")
    return f


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_PREC = {Or: 1, And: 2}


def format_formula(f: Formula) -> str:
    """Concrete syntax that parses back to an equal tree."""
    return _fmt(f, 0)


def _fmt(f: Formula, ctx: int) -> str:
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Indep):
        return f"indep({','.join(f.vars)})"
    if isinstance(f, Circ):
        return f"circ{len(f.vars)}({','.join(f.vars)})"
    if isinstance(f, Eq):
        return f"{f.left} = {f.right}"
    if isinstance(f, DistLe):
        return f"dist({f.left},{f.right}) <= {f.bound}"
    if isinstance(f, Scattered):
        return f"scattered(k={f.k}, r={f.r}) {{ {_fmt(f.psi, 0)} }}"
    if isinstance(f, Not):
        return "!" + _fmt(f.body, 3)
    if isinstance(f, (And, Or)):
        p = _PREC[type(f)]
        sep = " & " if isinstance(f, And) else " | "
        # nested nodes of the same kind would be flattened by the parser
        text = sep.join(_fmt(c, p + 1 if type(c) is type(f) else p) for c in f.parts)
        return f"({text})" if ctx > p else text
    if isinstance(f, (Exists, Forall, BallExists, BallForall)):
        word = "exists" if isinstance(f, (Exists, BallExists)) else "forall"
        head = f"{word} {f.var}"
        if isinstance(f, (BallExists, BallForall)):
            head += f" in ball({f.center},{f.radius})"
        text = f"{head} . {_fmt(f.body, 0)}"
        return f"({text})" if ctx > 0 else text
    raise TypeError(f"unknown formula node {f!r}")


def format_sentence(s: Sentence) -> str:
    return format_formula(s.formula)
