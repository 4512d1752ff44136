"""Optimal actuarially fair linear risk sharing between friends on a network."""

from .equal_share import EqualShareReport, c_hat, c_hat_uncorrelated, solve_equal_share
from .friends import assemble_gamma_system, feng_complete, solve_friends, solve_gamma
from .graph import (
    Graph,
    adjacency,
    from_edges,
    is_connected,
    laplacian,
    make_barbell,
    make_complete,
    make_path,
    make_star,
    no_edge_indicator,
    off_edge_pairs,
)
from .kkt import build_qp, extract_sharing, solve_kkt, solve_oracle
from .loss_model import LossModel, apply_rule, fairness_scalar, objective, validate
from .nonneg import (
    NonnegVerdict,
    check_complete_general,
    check_complete_scaled_identity,
    check_covariance_threshold,
    check_entrywise,
    check_equal_share,
    check_two_agent,
)
from .sharing import SharingMatrix, SolveReport
from .simulate import SimConfig, SimReport, sample_losses, simulate_rule

__version__ = "0.1.0"
