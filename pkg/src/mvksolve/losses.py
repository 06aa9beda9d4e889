"""Loss functions V(y, z) and their derivatives in z.

The two least-squares variants accept vector arguments through the
squared norm ||y - z||^2; sigmoid, hinge and leaky-hockey-stick are
scalar classification losses.  Hinge is nondifferentiable and
leaky-hockey-stick has a kink at y*z = 1, so gradients are refused
there.
"""

import numpy as np

from .exceptions import ConfigError

LOSS_KINDS = (
    "least-squares",
    "exponential-least-squares",
    "sigmoid",
    "hinge",
    "leaky-hockey-stick",
)
VECTOR_LOSSES = ("least-squares", "exponential-least-squares")
DIFFERENTIABLE_LOSSES = ("least-squares", "exponential-least-squares", "sigmoid")


def _check_args(kind, y, z):
    if kind not in LOSS_KINDS:
        raise ConfigError(f"unknown loss kind {kind!r}")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if y.shape != z.shape:
        raise ConfigError(f"loss arguments disagree in shape: {y.shape} vs {z.shape}")
    if kind not in VECTOR_LOSSES and y.size != 1:
        raise ConfigError(f"loss {kind!r} only accepts scalar arguments")
    return y, z


def loss_value(kind, y, z):
    y, z = _check_args(kind, y, z)
    if kind == "least-squares":
        return float(np.sum((y - z) ** 2))
    if kind == "exponential-least-squares":
        return float(1.0 - np.exp(-np.sum((y - z) ** 2)))
    ys, zs = y[0], z[0]
    if kind == "sigmoid":
        return float(1.0 / (1.0 + np.exp(zs - ys)))
    if kind == "hinge":
        return float(max(0.0, 1.0 - ys * zs))
    # leaky-hockey-stick
    if ys * zs > 1.0:
        return float(-np.log(ys * zs))
    return float(1.0 - ys * zs)


def loss_gradient(kind, y, z):
    """d V(y, z) / d z.  Errors out at nondifferentiable points."""
    y, z = _check_args(kind, y, z)
    if kind == "hinge":
        raise ConfigError("hinge loss has no gradient (nonsmooth)")
    if kind == "least-squares":
        return 2.0 * (z - y)
    if kind == "exponential-least-squares":
        return 2.0 * (z - y) * np.exp(-np.sum((y - z) ** 2))
    ys, zs = y[0], z[0]
    if kind == "sigmoid":
        e = np.exp(zs - ys)
        return np.array([-e / (1.0 + e) ** 2])
    # leaky-hockey-stick
    if ys * zs == 1.0:
        raise ConfigError(
            f"leaky-hockey-stick is nondifferentiable at y*z=1 (y={ys}, z={zs})"
        )
    if ys * zs > 1.0:
        return np.array([-1.0 / zs])
    return np.array([-ys])


def loss_hessian(kind, y, z):
    """d^2 V(y, z) / d z^2 as a dense matrix (differentiable losses only)."""
    y, z = _check_args(kind, y, z)
    n = y.size
    if kind == "least-squares":
        return 2.0 * np.eye(n)
    if kind == "exponential-least-squares":
        d = z - y
        w = np.exp(-np.sum(d**2))
        return w * (2.0 * np.eye(n) - 4.0 * np.outer(d, d))
    if kind == "sigmoid":
        e = np.exp(z[0] - y[0])
        return np.array([[e * (e - 1.0) / (1.0 + e) ** 3]])
    raise ConfigError(f"loss {kind!r} has no second derivative here")
