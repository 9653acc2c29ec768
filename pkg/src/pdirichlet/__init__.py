"""P-Dirichlet priors for families of moral DAGs on a decomposable graph."""
from .dag import ParentMap, find_p_perfect_orders, non_descendants, numbering, validate_dag
from .errors import *  # noqa: F401,F403
from .family import (
    EMPTY,
    DagFamily,
    Slot,
    analyse,
    compute_chains,
    compute_structure_sets,
    derive_constraints,
    is_hyper_dirichlet_sufficient,
    is_separating,
)
from .graph import (
    UndirectedGraph,
    canonical_perfect_order,
    check_decomposable,
    find_cliques,
    perfect_orders,
    validate_perfect_order,
)
from .hyper import HyperDirichlet, hyper_dirichlet_normalizer
from .inference import (
    ContingencyTable,
    log_evidence,
    marginal_counts,
    posterior_update,
    predictive_cell,
    predictive_table,
    score_configurations,
)
from .prior import (
    PDirichlet,
    build_prior,
    dimension_formula,
    dimension_rank,
    equals_hyper_dirichlet,
    extract_local_dirichlets,
    log_moment,
    moment,
    p_moment_crosscheck,
    uniform_template,
)
from .sampling import sample
from .verification import enumerate_small, exact_rank, mc_check_moments, random_prior

__version__ = "0.1.0"
