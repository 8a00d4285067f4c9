"""First-order sentences over matroids: syntax, semantics and local decision."""

from .ast import (
    TRUE,
    FALSE,
    And,
    BallExists,
    BallForall,
    BasicLocalSentence,
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
    substitute,
)
from .locality import BlsOutcome, bls_decision, decide_bls, decide_sentence
from .parser import (
    check_locality,
    format_formula,
    format_sentence,
    locality_radius,
    parse,
    parse_formula,
    parse_local,
)
from .semantics import Evaluator, circuit_reduce, eval_bruteforce, eval_local

__all__ = [name for name in dir() if not name.startswith("_")]
