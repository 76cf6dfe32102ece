"""Fixed points of monotone Gregus-Ciric contractions on weighted digraphs."""

from .contraction import (
    GCParams,
    check_quasi_dominance,
    rhs_gc,
    rhs_gregus,
    rhs_quasi,
    validate_params,
    verify_condition,
    verify_monotone,
)
from .graph import (
    Digraph,
    EdgeRelation,
    check_graph_axioms,
    check_interval_convexity,
    check_property_star,
    demo_g_complete_strip,
)
from .mapping import MappingHandle
from .oracles import (
    a_priori_iterations,
    find_reduction_index,
    lemma1_check,
    make_beta_schedule,
    max_reduction_index,
    orbit_profile,
)
from .report import ViolationReport
from .scenarios import Scenario, builtin, load_scenario
from .solver import Certificate, SolverConfig, solve, verify_uniqueness
from .space import ConvexSpace, check_segment_identities, check_takahashi

__version__ = "0.1.0"
