"""Operator-valued kernels, Gram assembly and factorization.

Two kernel families are provided:

* ``scalar-gaussian`` — a Gaussian scalar kernel g = exp(-||xi-xj||^2/sigma^2)
  placed on the rectangular identity pattern of a di x dj block (entry
  (r, c) = g when r == c, else 0).
* ``two-region`` — the heterogeneous two-region kernel: region-1 points carry
  a 1-dimensional space, region-2 points a 2-dimensional one.  Within
  region 2 the second components interact through exp(-alpha*||xi-xj||)
  while the first components interact through the Gaussian everywhere;
  cross-region blocks only couple the first components.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import ConfigError, NumericsError
from .spaces import SpaceDims

KERNEL_KINDS = ("scalar-gaussian", "two-region")


@dataclass(frozen=True)
class InputPoint:
    """An input location with an optional region tag."""

    coords: tuple
    region: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(float(c) for c in self.coords))
        if self.region is not None:
            object.__setattr__(self, "region", int(self.region))

    @property
    def array(self):
        return np.asarray(self.coords)


@dataclass(frozen=True)
class KernelConfig:
    kind: str = "scalar-gaussian"
    sigma: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ConfigError(f"unknown kernel kind {self.kind!r}")
        if self.sigma <= 0:
            raise ConfigError("kernel sigma must be > 0")
        if self.alpha <= 0:
            raise ConfigError("kernel alpha must be > 0")


def region_dim(region):
    """Hypothesis-space dimension implied by a two-region tag."""
    if region not in (1, 2):
        raise ConfigError(f"two-region kernel needs region in {{1,2}}, got {region}")
    return 1 if region == 1 else 2


def kernel_block(cfg, xi, di, xj, dj):
    """The di x dj block K(xi, xj) of the operator-valued kernel."""
    dist = float(np.linalg.norm(xi.array - xj.array))
    g = np.exp(-(dist**2) / cfg.sigma**2)
    if cfg.kind == "scalar-gaussian":
        blk = np.zeros((di, dj))
        np.fill_diagonal(blk, g)
        return blk
    # two-region kernel
    ri, rj = xi.region, xj.region
    if region_dim(ri) != di or region_dim(rj) != dj:
        raise ConfigError(
            f"dimension/region mismatch for pair {xi.coords} (region {ri}, "
            f"dim {di}) / {xj.coords} (region {rj}, dim {dj})"
        )
    if ri == 1 and rj == 1:
        return np.array([[g]])
    if ri == 2 and rj == 2:
        return np.array([[g, 0.0], [0.0, np.exp(-cfg.alpha * dist)]])
    if ri == 1:
        return np.array([[g, 0.0]])
    return np.array([[g], [0.0]])


@dataclass(frozen=True)
class BlockGram:
    """Dense flattened N x N Gram matrix with its block layout."""

    data: np.ndarray
    layout: SpaceDims

    def block(self, i, j):
        return self.data[self.layout.block(i), self.layout.block(j)]


def assemble_gram(points, dims, cfg):
    """Assemble the block Gram matrix K[x] over the given points.

    Upper-triangular blocks are computed and mirrored (transposed) below
    the diagonal, so symmetry holds exactly.
    """
    n = len(points)
    if len(dims) != n:
        raise ConfigError("dims and points disagree in length")
    for i in range(n):
        for j in range(i + 1, n):
            if points[i].coords == points[j].coords:
                raise ConfigError(
                    f"duplicate input points at indices {i} and {j}: "
                    f"{points[i].coords}"
                )
    K = np.zeros((dims.N, dims.N))
    for i in range(n):
        for j in range(i, n):
            blk = kernel_block(cfg, points[i], dims.d[i], points[j], dims.d[j])
            K[dims.block(i), dims.block(j)] = blk
            if j > i:
                K[dims.block(j), dims.block(i)] = blk.T
    gram = BlockGram(K, dims)
    psd = check_psd(K, 1e-10)
    if not psd["is_psd"]:
        raise NumericsError(
            f"assembled Gram is not PSD (min eigenvalue {psd['min_eig']:.3e})"
        )
    return gram


def check_psd(m, tol=1e-10):
    """Smallest eigenvalue and a PSD verdict relative to the largest one."""
    m = np.asarray(m, dtype=float)
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    if np.max(np.abs(m - m.T)) > 1e-12 * scale:
        raise NumericsError("check_psd requires a symmetric matrix")
    eigs = np.linalg.eigvalsh(m)
    min_eig = float(eigs[0])
    max_eig = float(eigs[-1])
    return {
        "min_eig": min_eig,
        "max_eig": max_eig,
        "is_psd": min_eig >= -tol * max(1.0, max_eig),
    }


@dataclass(frozen=True)
class KolmogorovFactor:
    """Rank-r factor V with V.T @ V reconstructing the Gram matrix."""

    V: np.ndarray
    rank: int


def kolmogorov_factor(gram, tol=1e-12):
    """Minimal factorization V.T V = K via symmetric eigendecomposition.

    Eigenvalues below tol * lambda_max are treated as zero, so
    rank-deficient Gram matrices factor cleanly.
    """
    K = gram.data if isinstance(gram, BlockGram) else np.asarray(gram, dtype=float)
    psd = check_psd(K, 1e-10)
    if not psd["is_psd"]:
        raise NumericsError(
            f"cannot factor a non-PSD matrix (min eigenvalue {psd['min_eig']:.3e})"
        )
    w, U = np.linalg.eigh(K)
    cut = tol * max(psd["max_eig"], 0.0)
    keep = w > cut
    V = (np.sqrt(w[keep])[:, None]) * U[:, keep].T
    return KolmogorovFactor(V=V, rank=int(keep.sum()))


def evaluate_section(a, points, dims, cfg, x, dx):
    """Value of the representer-form section f = sum_j K_{x_j} a_j at x."""
    a = np.asarray(a, dtype=float)
    if a.shape != (dims.N,):
        raise ConfigError(f"coefficient vector must have length {dims.N}")
    out = np.zeros(dx)
    for j in range(len(points)):
        blk = kernel_block(cfg, x, dx, points[j], dims.d[j])
        out += blk @ a[dims.block(j)]
    return out


def rkhs_norm_sq(a, gram):
    """Squared RKHS norm a^T K a of the representer-form section."""
    a = np.asarray(a, dtype=float)
    return float(a @ gram.data @ a)
