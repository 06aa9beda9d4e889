"""Solvers for the representer systems.

Least squares reduces to one dense linear solve.  The exponential loss
gives a nonlinear residual system H(a) = 0, attacked by multistart
damped Newton: the search region is the cube [-delta, delta]^N that
provably contains every minimizer, starting points come from Latin
hypercube sampling, each start runs a Levenberg-damped Newton iteration
on H with Armijo backtracking on the squared residual, and candidates
are admissible when the residual norm meets the optimality tolerance.
The learning functional I and its gradient are tracked diagnostically
for every iterate.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigError, NumericsError
from .objective import (
    gradient_I,
    jacobian_H,
    learning_functional,
    residual_H,
)

_LAMBDA_MAX = 1e12


@dataclass(frozen=True)
class SolveConfig:
    mode: str = "els"
    lhs_count: int = 100
    seed: int = 0
    max_iters: int = 500
    tol_opt: float = 1e-6
    tol_step: float = 1e-12
    damping_init: float = 1e-3
    armijo_c: float = 1e-4
    backtrack: float = 0.5

    def __post_init__(self):
        if self.mode not in ("ls", "els"):
            raise ConfigError(f"solve mode must be 'ls' or 'els', got {self.mode!r}")
        if self.lhs_count < 1:
            raise ConfigError("lhs_count must be >= 1")
        if not (0 < self.armijo_c < 1) or not (0 < self.backtrack < 1):
            raise ConfigError("armijo_c and backtrack must lie in (0, 1)")


@dataclass
class SolveReport:
    best_a: np.ndarray
    objective: float
    resid_paper_inf: float
    grad_inf: float
    delta: float
    starts_run: int
    admissible_count: int
    per_start: list
    seed: int
    best_start: int
    trivial: bool = False
    traces: list = field(default_factory=list)


@dataclass(frozen=True)
class DeltaBound:
    delta: float
    lambda_min: float
    i_zero: float
    trivial: bool


def solve_ls(spec):
    """Exact minimizer for the least-squares loss via one linear solve.

    Assembles (l gamma_A I + J_C K + l gamma_I M K) a = y_tilde with J_C
    block-diagonal (C_i^T C_i on labeled blocks, zero elsewhere) and
    y_tilde_i = C_i^T y_i on labeled blocks.
    """
    if spec.loss != "least-squares":
        raise ConfigError("solve_ls requires the least-squares loss")
    K = spec.gram.data
    N = spec.N
    A = spec.l * spec.gamma_A * np.eye(N)
    if spec.gamma_I > 0:
        A += spec.l * spec.gamma_I * spec.MK
    rhs = np.zeros(N)
    for i in range(spec.l):
        Ci = spec.C_op(i)
        A[spec.dims.block(i), :] += Ci.T @ Ci @ K[spec.dims.block(i), :]
        rhs[spec.dims.block(i)] = Ci.T @ spec.labels[i]
    try:
        a = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericsError(
            "least-squares system is singular", condition=float(np.linalg.cond(A))
        ) from exc
    resid = np.linalg.norm(A @ a - rhs) / max(1.0, np.linalg.norm(rhs))
    if not np.isfinite(resid) or resid > 1e-10:
        raise NumericsError(
            f"least-squares solve failed (relative residual {resid:.3e})",
            condition=float(np.linalg.cond(A)),
        )
    return a


def delta_bound(spec, tol=1e-10):
    """Half-width of the cube guaranteed to contain every minimizer.

    delta = sqrt(I(0) / (gamma_A * lambda_min(K))): outside the cube the
    RKHS penalty alone already exceeds the value I(0) of the zero
    section.
    """
    if spec.loss != "exponential-least-squares":
        raise ConfigError("delta_bound applies to the exponential loss")
    eigs = np.linalg.eigvalsh(spec.gram.data)
    lam, lam_max = float(eigs[0]), float(eigs[-1])
    i_zero = 1.0 - sum(
        np.exp(-np.sum(y**2)) for y in spec.labels
    ) / spec.l
    if all(np.all(y == 0) for y in spec.labels):
        return DeltaBound(delta=0.0, lambda_min=lam, i_zero=i_zero, trivial=True)
    if lam <= tol * max(1.0, lam_max):
        raise NumericsError(
            f"Gram matrix is numerically singular (lambda_min {lam:.3e}); "
            "the search-cube bound needs lambda_min > 0"
        )
    delta = float(np.sqrt(i_zero / (spec.gamma_A * lam)))
    return DeltaBound(delta=delta, lambda_min=lam, i_zero=i_zero, trivial=False)


def lhs_sample(count, dim, delta, seed):
    """Latin hypercube sample of `count` points in [-delta, delta]^dim.

    Every axis is split into `count` equal strata, each holding exactly
    one point; permutations and intra-cell offsets come from a seeded
    generator, so identical arguments give identical samples.
    """
    if count < 1:
        raise ConfigError("lhs_sample needs count >= 1")
    rng = np.random.default_rng(seed)
    samples = np.empty((count, dim))
    for ax in range(dim):
        perm = rng.permutation(count)
        offs = rng.uniform(size=count)
        samples[:, ax] = -delta + 2.0 * delta * (perm + offs) / count
    return [samples[i] for i in range(count)]


def _clamp(a, delta):
    return np.clip(a, -delta, delta)


def local_minimize(spec, a0, delta, cfg):
    """One damped-Newton run on the residual system from a0.

    Levenberg-regularized Gauss-Newton steps on H with Armijo
    backtracking on the squared-residual merit; iterates are clamped to
    the search cube.  Convergence means the residual infinity norm meets
    tol_opt or the step shrinks below tol_step.
    """
    a = _clamp(np.asarray(a0, dtype=float), delta)
    r = residual_H(spec, a, "paper-faithful")
    merit = 0.5 * float(r @ r)
    lam = cfg.damping_init
    trace = []

    def record(it):
        trace.append(
            {
                "iter": it,
                "objective": learning_functional(spec, a),
                "grad_inf": float(np.max(np.abs(gradient_I(spec, a)))),
                "resid_inf": float(np.max(np.abs(r))),
                "merit": merit,
            }
        )

    record(0)
    converged = float(np.max(np.abs(r))) <= cfg.tol_opt
    iters = 0
    while not converged and iters < cfg.max_iters:
        J = jacobian_H(spec, a, "paper-faithful")
        g = J.T @ r
        accepted = False
        while lam <= _LAMBDA_MAX:
            try:
                p = np.linalg.solve(J.T @ J + lam * np.eye(spec.N), -g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            alpha = 1.0
            while alpha >= 1e-14:
                a_new = _clamp(a + alpha * p, delta)
                step = a_new - a
                pred = float(g @ step)
                if pred >= 0:
                    break
                r_new = residual_H(spec, a_new, "paper-faithful")
                merit_new = 0.5 * float(r_new @ r_new)
                if merit_new <= merit + cfg.armijo_c * pred:
                    accepted = True
                    break
                alpha *= cfg.backtrack
            if accepted:
                lam = max(cfg.damping_init, 0.5 * lam)
                break
            lam *= 10.0
        if not accepted:
            break
        step_inf = float(np.max(np.abs(a_new - a)))
        a, r, merit = a_new, r_new, merit_new
        iters += 1
        record(iters)
        if float(np.max(np.abs(r))) <= cfg.tol_opt or step_inf <= cfg.tol_step:
            converged = True
    return {
        "a": a,
        "objective": learning_functional(spec, a),
        "grad_inf": float(np.max(np.abs(gradient_I(spec, a)))),
        "resid_inf": float(np.max(np.abs(r))),
        "iters": iters,
        "converged": converged,
        "trace": trace,
    }


def _better(cand, incumbent):
    """Deterministic candidate ordering: objective, then gradient norm,
    then start index (an associative reduction)."""
    return (cand["objective"], cand["grad_inf"], cand["start_index"]) < (
        incumbent["objective"],
        incumbent["grad_inf"],
        incumbent["start_index"],
    )


def multistart_solve(spec, cfg):
    """LHS multistart over the search cube; see the module docstring."""
    if cfg.mode != "els":
        raise ConfigError("multistart_solve handles the 'els' mode")
    if spec.loss != "exponential-least-squares":
        raise ConfigError("multistart_solve requires the exponential loss")
    db = delta_bound(spec)
    if db.trivial:
        a0 = np.zeros(spec.N)
        return SolveReport(
            best_a=a0,
            objective=learning_functional(spec, a0),
            resid_paper_inf=0.0,
            grad_inf=0.0,
            delta=0.0,
            starts_run=0,
            admissible_count=0,
            per_start=[],
            seed=cfg.seed,
            best_start=-1,
            trivial=True,
        )
    starts = lhs_sample(cfg.lhs_count, spec.N, db.delta, cfg.seed)
    per_start = []
    traces = []
    best = None
    admissible = 0
    fallback = None
    for idx, a0 in enumerate(starts):
        res = local_minimize(spec, a0, db.delta, cfg)
        res["start_index"] = idx
        res["a0"] = np.asarray(a0)
        traces.append(res.pop("trace"))
        per_start.append(res)
        if fallback is None or _better(res, fallback):
            fallback = res
        if res["converged"] and res["resid_inf"] <= cfg.tol_opt:
            admissible += 1
            if best is None or _better(res, best):
                best = res
    chosen = best if best is not None else fallback
    return SolveReport(
        best_a=chosen["a"],
        objective=chosen["objective"],
        resid_paper_inf=chosen["resid_inf"],
        grad_inf=chosen["grad_inf"],
        delta=db.delta,
        starts_run=len(starts),
        admissible_count=admissible,
        per_start=per_start,
        seed=cfg.seed,
        best_start=chosen["start_index"],
        traces=traces,
    )
