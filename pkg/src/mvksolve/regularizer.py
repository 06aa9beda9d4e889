"""Graph-based regularization operators.

Builds Gaussian graph weights, graph Laplacians, and the within-view /
between-view operators whose combination forms the manifold
regularizer M acting on the flat block layout.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError, NumericsError
from .kernels import check_psd
from .spaces import SpaceDims


@dataclass(frozen=True)
class GraphWeights:
    W: np.ndarray


@dataclass(frozen=True)
class LaplacianMatrix:
    L: np.ndarray
    normalized: bool


@dataclass(frozen=True)
class RegularizerOperator:
    M: np.ndarray
    layout: SpaceDims


@dataclass(frozen=True)
class RegularizerConfig:
    gamma_I: float = 0.0
    gamma_B: float = 0.0
    gamma_W: float = 0.0
    sigma_graph: float = 1.0
    epsilon_neighbor: float = None
    normalized: bool = False

    def __post_init__(self):
        if self.gamma_I < 0 or self.gamma_B < 0 or self.gamma_W < 0:
            raise ConfigError("regularization coefficients must be >= 0")
        if self.sigma_graph <= 0:
            raise ConfigError("sigma_graph must be > 0")
        if self.epsilon_neighbor is not None and self.epsilon_neighbor <= 0:
            raise ConfigError("epsilon_neighbor must be > 0 when given")


def gaussian_weights(points, sigma_graph, epsilon_neighbor=None):
    """Gaussian similarity weights w_jk = exp(-||x_j-x_k||^2 / (2 sigma^2)).

    With ``epsilon_neighbor`` set, weights beyond that distance are
    truncated to zero (epsilon-neighborhood graph).
    """
    if sigma_graph <= 0:
        raise ConfigError("sigma_graph must be > 0")
    if epsilon_neighbor is not None and epsilon_neighbor <= 0:
        raise ConfigError("epsilon_neighbor must be > 0 when given")
    X = np.asarray([p.array for p in points])
    d2 = np.sum((X[:, None, :] - X[None, :, :]) ** 2, axis=-1)
    W = np.exp(-d2 / (2.0 * sigma_graph**2))
    if epsilon_neighbor is not None:
        W[np.sqrt(d2) > epsilon_neighbor] = 0.0
    return GraphWeights(W=W)


def graph_laplacian(w, normalized=False):
    """L = V - W with V the degree matrix; optionally V^-1/2 L V^-1/2."""
    W = np.asarray(w.W, dtype=float)
    deg = W.sum(axis=1)
    bad = np.nonzero(deg <= 0)[0]
    if bad.size:
        raise NumericsError(f"vertex {bad[0]} is isolated (zero degree)")
    L = np.diag(deg) - W
    if normalized:
        dinv = 1.0 / np.sqrt(deg)
        L = dinv[:, None] * L * dinv[None, :]
    L = 0.5 * (L + L.T)
    return LaplacianMatrix(L=L, normalized=normalized)


def between_view_operator(m, dimY, n):
    """Cross-view disagreement penalty for m homogeneous views.

    Returns M_B = I_n kron (M_m kron I_dimY) with M_m = m*I - 1 1^T, whose
    quadratic form sums ||f^j(x_i) - f^k(x_i)||^2 over views j < k and
    points i.
    """
    if m < 1 or dimY < 1 or n < 1:
        raise ConfigError("between_view_operator needs m, dimY, n >= 1")
    Mm = m * np.eye(m) - np.ones((m, m))
    MB = np.kron(np.eye(n), np.kron(Mm, np.eye(dimY)))
    dims = SpaceDims(d=(m * dimY,) * n)
    return RegularizerOperator(M=MB, layout=dims)


def within_view_embed(lap, dims):
    """Embed an n x n Laplacian into the flat N x N block layout.

    Homogeneous dimensions give the Kronecker product L kron I_d.  With
    heterogeneous dimensions the first components of every point couple
    through L while each extra component k > 1 of point i only receives
    the diagonal entry l_ii in its own row and column.
    """
    L = lap.L
    n = L.shape[0]
    if len(dims) != n:
        raise ConfigError("Laplacian size and dims length disagree")
    if len(set(dims.d)) == 1:
        M = np.kron(L, np.eye(dims.d[0]))
        return RegularizerOperator(M=M, layout=dims)
    M = np.zeros((dims.N, dims.N))
    first = np.asarray([dims.offsets[i] for i in range(n)])
    M[np.ix_(first, first)] = L
    for i in range(n):
        for k in range(1, dims.d[i]):
            idx = dims.offsets[i] + k
            M[idx, idx] = L[i, i]
    return RegularizerOperator(M=M, layout=dims)


def combine_regularizer(cfg, M_B=None, M_W=None, layout=None):
    """Combine view penalties into the operator M scaled by 1/gamma_I.

    gamma_I * M then reproduces gamma_B * M_B + gamma_W * M_W.  With
    gamma_I = 0 the zero operator is returned and every downstream M
    term vanishes.
    """
    if M_B is None and M_W is None:
        raise ConfigError("at least one of M_B, M_W is required")
    if M_B is not None and M_W is not None and M_B.M.shape != M_W.M.shape:
        raise ConfigError("between-view and within-view layouts disagree")
    ref = M_W if M_W is not None else M_B
    if layout is None:
        layout = ref.layout
    if cfg.gamma_I == 0:
        return RegularizerOperator(M=np.zeros_like(ref.M), layout=layout)
    M = np.zeros_like(ref.M)
    if M_B is not None:
        M += cfg.gamma_B * M_B.M
    if M_W is not None:
        M += cfg.gamma_W * M_W.M
    M /= cfg.gamma_I
    psd = check_psd(M, 1e-10)
    if not psd["is_psd"]:
        raise NumericsError(
            f"combined regularizer is not PSD (min eigenvalue {psd['min_eig']:.3e})"
        )
    return RegularizerOperator(M=M, layout=layout)
