"""Max-plus matrix algebra: powers, Kleene stars, CSR expansions of
matrix powers, and orbit periodicity of reducible matrices."""

from .core import (NEG_INF, UNITY, ZERO, TropicalMatrix, as_vector, mat_eq,
                   mat_mul, mat_oplus, mat_power, mat_scalar_mul, soplus,
                   sotimes, vec_eq)
from .csr import (CsrProduct, CsrTriple, csr_build, csr_group_check,
                  csr_product, csr_product_literal, csr_rotate)
from .errors import (DimensionError, DivergentStarError, MaxplusError,
                     NoCyclesError, NotCriticalPartError, NotDefiniteError,
                     NotOrbitPeriodicError, OracleSizeError, ParseError,
                     RotationUnavailableError, ThresholdError,
                     TrivialColumnError, ZeroVectorError)
from .expansions import (DeflationStep, Expansion, ExpansionEvaluation, Term,
                         evaluate, fast_terms, nachtigall_expand,
                         ultimate_expand, ultimate_threshold)
from .graphs import (CRIT_TOL, CriticalStructure, CritSubgraph, Digraph,
                     SccDecomposition, critical_structure, cyclic_class_shift,
                     gamma_u, max_cycle_mean, scc_decompose, strong_access,
                     strong_access_matrix, wielandt)
from .kleene import (Scaling, apply_scaling, kleene_star,
                     total_visualizing_scaling, visualizing_scaling)
from .oracle import (PathClassQuery, best_path_weight, boolean_power_reach,
                     enumerate_small)
from .orbit import (OrbitReport, OrbitTrace, column_periodicity,
                    is_orbit_periodic, orbit_growth_rate, pair_periodicity,
                    simulate_orbit)

__version__ = "0.1.0"

__all__ = [
    "NEG_INF", "UNITY", "ZERO", "TropicalMatrix", "as_vector", "mat_eq",
    "mat_mul", "mat_oplus", "mat_power", "mat_scalar_mul", "soplus",
    "sotimes", "vec_eq",
    "CsrProduct", "CsrTriple", "csr_build", "csr_group_check", "csr_product",
    "csr_product_literal", "csr_rotate",
    "DimensionError", "DivergentStarError", "MaxplusError", "NoCyclesError",
    "NotCriticalPartError", "NotDefiniteError", "NotOrbitPeriodicError",
    "OracleSizeError", "ParseError", "RotationUnavailableError",
    "ThresholdError", "TrivialColumnError", "ZeroVectorError",
    "DeflationStep", "Expansion", "ExpansionEvaluation", "Term", "evaluate",
    "fast_terms", "nachtigall_expand", "ultimate_expand", "ultimate_threshold",
    "CRIT_TOL", "CriticalStructure", "CritSubgraph", "Digraph",
    "SccDecomposition", "critical_structure", "cyclic_class_shift", "gamma_u",
    "max_cycle_mean", "scc_decompose", "strong_access", "strong_access_matrix",
    "wielandt",
    "Scaling", "apply_scaling", "kleene_star", "total_visualizing_scaling",
    "visualizing_scaling",
    "PathClassQuery", "best_path_weight", "boolean_power_reach",
    "enumerate_small",
    "OrbitReport", "OrbitTrace", "column_periodicity", "is_orbit_periodic",
    "orbit_growth_rate", "pair_periodicity", "simulate_orbit",
]
