"""Matroid algorithms and first-order model checking via Gaifman locality."""

from .errors import *  # noqa: F401,F403
from .matroid import (
    BinaryMatroid,
    CographicMatroid,
    GraphicMatroid,
    GraphRepr,
    Matroid,
    R10Matroid,
    UniformMatroid,
    circuits_up_to,
    cographic,
    components,
    dual,
    graphic,
    is_circuit,
    is_connected,
    is_independent,
    rank,
    restrict,
    validate_axioms,
)
from .sums import (
    ChildLink,
    CycleSpace,
    DecompositionNode,
    DecompositionTree,
    SumKind,
    attach_f2_leaf,
    compose_tree,
    cycle_space,
    delta_sum,
    reroot,
    validate_tree,
)
from .mdwc import (
    ColoringMode,
    MdwcInstance,
    Triple,
    coloring_family,
    mdwc_bruteforce,
    mdwc_cographic,
    mdwc_graphic,
    solve_mdwc,
)
from .metric import (
    GaifmanGraph,
    branch_width_bruteforce,
    distance_table,
    element_distance,
    gaifman_ball,
    gaifman_graph,
    gaifman_graph_dp,
    min_circuit_length,
    neighborhood,
    shortest_circuit_dp,
)
from .logic import (
    Sentence,
    circuit_reduce,
    decide_bls,
    decide_sentence,
    eval_bruteforce,
    eval_local,
    parse,
)

__version__ = "0.1.0"
