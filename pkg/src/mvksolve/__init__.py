"""mvksolve: operator-valued kernel learning with manifold regularization.

Exact linear solve for the least-squares loss and multistart damped
Newton for the exponential loss, over heterogeneous per-point label
spaces with graph-Laplacian within-view / between-view regularization.
"""

from ._core import HAVE_COMPILED
from .exceptions import ConfigError, MvkError, NumericsError
from .kernels import (
    BlockGram,
    InputPoint,
    KernelConfig,
    KolmogorovFactor,
    assemble_gram,
    check_psd,
    evaluate_section,
    kernel_block,
    kolmogorov_factor,
    rkhs_norm_sq,
)
from .losses import loss_gradient, loss_hessian, loss_value
from .objective import (
    ProblemSpec,
    gradient_I,
    hessian_I,
    jacobian_H,
    jacobian_R,
    learning_functional,
    project_onto_span,
    residual_H,
)
from .regularizer import (
    RegularizerConfig,
    between_view_operator,
    combine_regularizer,
    gaussian_weights,
    graph_laplacian,
    within_view_embed,
)
from .solver import (
    SolveConfig,
    SolveReport,
    delta_bound,
    lhs_sample,
    local_minimize,
    multistart_solve,
    solve_ls,
)
from .spaces import SpaceDims

__version__ = "0.1.0"

__all__ = [
    "HAVE_COMPILED",
    "ConfigError",
    "MvkError",
    "NumericsError",
    "BlockGram",
    "InputPoint",
    "KernelConfig",
    "KolmogorovFactor",
    "assemble_gram",
    "check_psd",
    "evaluate_section",
    "kernel_block",
    "kolmogorov_factor",
    "rkhs_norm_sq",
    "loss_gradient",
    "loss_hessian",
    "loss_value",
    "ProblemSpec",
    "gradient_I",
    "hessian_I",
    "jacobian_H",
    "jacobian_R",
    "learning_functional",
    "project_onto_span",
    "residual_H",
    "RegularizerConfig",
    "between_view_operator",
    "combine_regularizer",
    "gaussian_weights",
    "graph_laplacian",
    "within_view_embed",
    "SolveConfig",
    "SolveReport",
    "delta_bound",
    "lhs_sample",
    "local_minimize",
    "multistart_solve",
    "solve_ls",
    "SpaceDims",
]
