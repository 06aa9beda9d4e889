"""Problem assembly: the learning functional, its gradient, the
coefficient-space residual map H and its Jacobian, and projection onto
the span of the data-point kernel sections.

Two residual variants are available:

* ``paper-faithful`` — the published stationarity system verbatim: on a
  labeled block i the coupling sum runs over labeled j with weight
  w_j = exp(-||y_j - C_j f_j||^2) and an unweighted right-hand side
  C_i^T y_i / (l gamma_A); unlabeled blocks are linear.
* ``gradient-consistent`` — gradient_I / (2 gamma_A), i.e. the exact
  first-order condition of the functional being minimized.

The two systems have the same roots for the least-squares loss (up to a
multiplication by the Gram matrix) but genuinely different roots for the
exponential loss; both are exposed so callers can choose.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from . import _core
from .exceptions import ConfigError
from .kernels import (
    BlockGram,
    KernelConfig,
    assemble_gram,
    region_dim,
)
from .losses import (
    DIFFERENTIABLE_LOSSES,
    loss_gradient,
    loss_hessian,
    loss_value,
)
from .spaces import SpaceDims

RESIDUAL_VARIANTS = ("paper-faithful", "gradient-consistent")


@dataclass(frozen=True)
class ProblemSpec:
    """A complete learning-problem instance over l labeled and u
    unlabeled points."""

    points: tuple
    labels: tuple
    dims: SpaceDims
    M: np.ndarray
    gamma_A: float
    gamma_I: float
    kernel: KernelConfig
    loss: str
    l: int
    u: int
    C: Optional[tuple] = None

    def __post_init__(self):
        if self.gamma_A <= 0:
            raise ConfigError("gamma_A must be > 0")
        if self.gamma_I < 0:
            raise ConfigError("gamma_I must be >= 0")
        if self.l < 1 or self.u < 0:
            raise ConfigError("need l >= 1 labeled and u >= 0 unlabeled points")
        if len(self.points) != self.l + self.u:
            raise ConfigError("points length must equal l + u")
        if len(self.dims) != self.l + self.u:
            raise ConfigError("dims length must equal l + u")
        if len(self.labels) != self.l:
            raise ConfigError("labels length must equal l (labeled points first)")
        labels = tuple(np.atleast_1d(np.asarray(y, dtype=float)) for y in self.labels)
        object.__setattr__(self, "labels", labels)
        for j, y in enumerate(labels):
            if y.shape != (self.dims.e[j],):
                raise ConfigError(
                    f"label {j} has length {y.size}, expected e_{j}={self.dims.e[j]}"
                )
        if self.C is not None:
            C = tuple(np.asarray(c, dtype=float) for c in self.C)
            if len(C) != self.l + self.u:
                raise ConfigError("C must give one combination operator per point")
            for i, c in enumerate(C):
                if c.shape != (self.dims.e[i], self.dims.d[i]):
                    raise ConfigError(
                        f"C[{i}] has shape {c.shape}, expected "
                        f"({self.dims.e[i]}, {self.dims.d[i]})"
                    )
            object.__setattr__(self, "C", C)
        M = np.asarray(self.M, dtype=float)
        if M.shape != (self.dims.N, self.dims.N):
            raise ConfigError(f"M must be {self.dims.N} x {self.dims.N}")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "points", tuple(self.points))

    @property
    def N(self):
        return self.dims.N

    @cached_property
    def gram(self) -> BlockGram:
        return assemble_gram(self.points, self.dims, self.kernel)

    @cached_property
    def MK(self):
        """M @ K, shared by residual and Jacobian evaluations."""
        return self.M @ self.gram.data

    @property
    def identity_C(self):
        """True when every combination operator is the identity."""
        if self.C is None:
            return all(e == d for e, d in zip(self.dims.e, self.dims.d))
        return all(
            c.shape[0] == c.shape[1] and np.array_equal(c, np.eye(c.shape[0]))
            for c in self.C
        )

    def C_op(self, i):
        if self.C is not None:
            return self.C[i]
        if self.dims.e[i] != self.dims.d[i]:
            raise ConfigError(
                f"point {i} has e != d but no combination operator was given"
            )
        return np.eye(self.dims.d[i])

    @cached_property
    def _labels_flat(self):
        y = np.concatenate(self.labels) if self.labels else np.zeros(0)
        offs = np.zeros(self.l + 1, dtype=np.intp)
        offs[1:] = np.cumsum([lab.size for lab in self.labels])
        return y, offs

    def _check_a(self, a):
        a = np.asarray(a, dtype=float)
        if a.shape != (self.N,):
            raise ConfigError(f"coefficient vector must have length {self.N}")
        return a


def labeled_outputs(spec, f):
    """z_j = C_j f_j for the labeled points, from flat evaluations f."""
    return [
        spec.C_op(j) @ f[spec.dims.block(j)] for j in range(spec.l)
    ]


def learning_functional(spec, a):
    """I(a) = (1/l) sum_j V(y_j, C_j f_j) + gamma_A a^T K a + gamma_I f^T M f."""
    a = spec._check_a(a)
    K = spec.gram.data
    f = K @ a
    data = sum(
        loss_value(spec.loss, spec.labels[j], z)
        for j, z in enumerate(labeled_outputs(spec, f))
    )
    reg = spec.gamma_A * float(a @ K @ a)
    if spec.gamma_I > 0:
        reg += spec.gamma_I * float(f @ spec.M @ f)
    return data / spec.l + reg


def gradient_I(spec, a):
    """Analytic gradient of the learning functional in coefficient space."""
    if spec.loss not in DIFFERENTIABLE_LOSSES:
        raise ConfigError(f"loss {spec.loss!r} is not differentiable")
    a = spec._check_a(a)
    K = spec.gram.data
    f = K @ a
    g = 2.0 * spec.gamma_A * f.copy()
    if spec.gamma_I > 0:
        g += 2.0 * spec.gamma_I * (spec.MK.T @ f)
    gz = np.zeros(spec.N)
    for j, z in enumerate(labeled_outputs(spec, f)):
        gz[spec.dims.block(j)] = spec.C_op(j).T @ loss_gradient(
            spec.loss, spec.labels[j], z
        )
    return g + (K @ gz) / spec.l


def hessian_I(spec, a):
    """Analytic Hessian of the learning functional in coefficient space."""
    if spec.loss not in DIFFERENTIABLE_LOSSES:
        raise ConfigError(f"loss {spec.loss!r} is not twice differentiable")
    a = spec._check_a(a)
    K = spec.gram.data
    f = K @ a
    H = 2.0 * spec.gamma_A * K.copy()
    if spec.gamma_I > 0:
        H += 2.0 * spec.gamma_I * (K @ spec.MK)
    for j, z in enumerate(labeled_outputs(spec, f)):
        Cj = spec.C_op(j)
        CKj = Cj @ K[spec.dims.block(j), :]
        H += (CKj.T @ loss_hessian(spec.loss, spec.labels[j], z) @ CKj) / spec.l
    return H


def _paper_residual_general(spec, a):
    K = spec.gram.data
    f = K @ a
    H = a + (spec.gamma_I / spec.gamma_A) * (spec.M @ f)
    zs = labeled_outputs(spec, f)
    w = [
        np.exp(-np.sum((spec.labels[j] - zs[j]) ** 2)) for j in range(spec.l)
    ]
    c = 1.0 / (spec.l * spec.gamma_A)
    for i in range(spec.l):
        Ci = spec.C_op(i)
        CtC = Ci.T @ Ci
        s = np.zeros(spec.dims.d[i])
        for j in range(spec.l):
            s += w[j] * (
                K[spec.dims.block(i), spec.dims.block(j)] @ a[spec.dims.block(j)]
            )
        H[spec.dims.block(i)] += c * (CtC @ s - Ci.T @ spec.labels[i])
    return H


def _ls_paper_residual(spec, a):
    K = spec.gram.data
    H = a + (spec.gamma_I / spec.gamma_A) * (spec.MK @ a)
    f = K @ a
    c = 1.0 / (spec.l * spec.gamma_A)
    for i in range(spec.l):
        Ci = spec.C_op(i)
        H[spec.dims.block(i)] += c * (
            Ci.T @ Ci @ f[spec.dims.block(i)] - Ci.T @ spec.labels[i]
        )
    return H


def residual_H(spec, a, variant="paper-faithful"):
    """The coefficient-space residual whose roots are solution candidates."""
    if variant not in RESIDUAL_VARIANTS:
        raise ConfigError(f"unknown residual variant {variant!r}")
    if spec.loss not in ("least-squares", "exponential-least-squares"):
        raise ConfigError(f"residual map is defined for LS/ELS losses, not {spec.loss!r}")
    a = spec._check_a(a)
    if variant == "gradient-consistent":
        return gradient_I(spec, a) / (2.0 * spec.gamma_A)
    if spec.loss == "least-squares":
        return _ls_paper_residual(spec, a)
    if spec.identity_C:
        y_flat, y_offs = spec._labels_flat
        return _core.els_residual(
            a,
            spec.gram.data,
            spec.M,
            y_flat,
            y_offs,
            np.asarray(spec.dims.offsets, dtype=np.intp),
            spec.l,
            spec.gamma_A,
            spec.gamma_I,
        )
    return _paper_residual_general(spec, a)


def jacobian_R(spec, a, variant="paper-faithful"):
    """The non-identity part R with jacobian_H = I + R / gamma_A."""
    if variant not in RESIDUAL_VARIANTS:
        raise ConfigError(f"unknown residual variant {variant!r}")
    a = spec._check_a(a)
    if variant == "gradient-consistent":
        return 0.5 * hessian_I(spec, a) - spec.gamma_A * np.eye(spec.N)
    K = spec.gram.data
    if spec.loss == "least-squares":
        R = spec.gamma_I * spec.MK.copy()
        for i in range(spec.l):
            Ci = spec.C_op(i)
            R[spec.dims.block(i), :] += (
                Ci.T @ Ci @ K[spec.dims.block(i), :]
            ) / spec.l
        return R
    if spec.loss != "exponential-least-squares":
        raise ConfigError(f"no residual Jacobian for loss {spec.loss!r}")
    if spec.identity_C:
        y_flat, y_offs = spec._labels_flat
        return _core.els_jacobian_R(
            a,
            K,
            spec.MK,
            y_flat,
            y_offs,
            np.asarray(spec.dims.offsets, dtype=np.intp),
            spec.l,
            spec.gamma_A,
            spec.gamma_I,
        )
    # general combination operators
    f = K @ a
    zs = labeled_outputs(spec, f)
    w = [np.exp(-np.sum((spec.labels[j] - zs[j]) ** 2)) for j in range(spec.l)]
    R = spec.gamma_I * spec.MK.copy()
    for j in range(spec.l):
        Cj = spec.C_op(j)
        t = np.zeros(spec.N)
        for i in range(spec.l):
            Ci = spec.C_op(i)
            blk = K[spec.dims.block(i), spec.dims.block(j)] @ a[spec.dims.block(j)]
            R[spec.dims.block(i), spec.dims.block(j)] += (
                w[j] * (Ci.T @ Ci @ K[spec.dims.block(i), spec.dims.block(j)])
            ) / spec.l
            t[spec.dims.block(i)] = Ci.T @ Ci @ blk
        s = -2.0 * w[j] * (K[:, spec.dims.block(j)] @ (Cj.T @ (zs[j] - spec.labels[j])))
        R += np.outer(t, s) / spec.l
    return R


def jacobian_H(spec, a, variant="paper-faithful"):
    """Jacobian of residual_H at a; equals I + R / gamma_A exactly."""
    return np.eye(spec.N) + jacobian_R(spec, a, variant) / spec.gamma_A


def _point_dim(spec, pt):
    if spec.kernel.kind == "two-region":
        return region_dim(pt.region)
    d = set(spec.dims.d)
    if len(d) != 1:
        raise ConfigError(
            "cannot infer output dimension for extra points with "
            "heterogeneous dims; pass extra_dims"
        )
    return d.pop()


def extended_gram(spec, extra_points, extra_dims=None):
    """Gram over the data points followed by the extra points."""
    if extra_dims is None:
        extra_dims = [_point_dim(spec, p) for p in extra_points]
    all_points = list(spec.points) + list(extra_points)
    all_dims = SpaceDims(d=tuple(spec.dims.d) + tuple(extra_dims))
    return assemble_gram(all_points, all_dims, spec.kernel), all_dims


def project_onto_span(spec, extra_points, b, extra_dims=None):
    """Coefficients of the orthogonal projection of f = sum_z K_z b_z
    onto span{K_{x_i}} of the data points.

    Solves Gram(x, x) c = Gram(x, extended) b; a rank-tolerant
    least-squares solve is used when the base Gram is numerically
    singular.
    """
    gram_ext, _ = extended_gram(spec, extra_points, extra_dims)
    b = np.asarray(b, dtype=float)
    if b.shape != (gram_ext.data.shape[0],):
        raise ConfigError(
            f"b must have length {gram_ext.data.shape[0]} (extended layout)"
        )
    G_xx = spec.gram.data
    G_xe = gram_ext.data[: spec.N, :]
    rhs = G_xe @ b
    eigs = np.linalg.eigvalsh(G_xx)
    if eigs[0] > 1e-10 * max(1.0, eigs[-1]):
        return np.linalg.solve(G_xx, rhs)
    c, *_ = np.linalg.lstsq(G_xx, rhs, rcond=1e-10)
    return c


def learning_functional_extended(spec, extra_points, b, extra_dims=None):
    """I evaluated on the section f = sum_z K_z b_z over the extended
    point set (used to verify that projection never increases I)."""
    gram_ext, _ = extended_gram(spec, extra_points, extra_dims)
    b = np.asarray(b, dtype=float)
    f_data = gram_ext.data[: spec.N, :] @ b
    data = sum(
        loss_value(spec.loss, spec.labels[j], z)
        for j, z in enumerate(labeled_outputs(spec, f_data))
    )
    reg = spec.gamma_A * float(b @ gram_ext.data @ b)
    if spec.gamma_I > 0:
        reg += spec.gamma_I * float(f_data @ spec.M @ f_data)
    return data / spec.l + reg
