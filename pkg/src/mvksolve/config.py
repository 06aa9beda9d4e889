"""Run-configuration parsing and validation.

A run configuration is a YAML file with three sections:

``problem``
    points (inline or CSV), optional region tags and region boxes,
    labels, per-point dimensions, loss, gamma_A / gamma_I, the kernel,
    and the regularizer recipe (graph weights -> Laplacian -> embedding
    -> combination).
``solve``
    solver knobs (mode, lhs_count, seed, tolerances, damping).
``outputs``
    report / trace file names and mesh requests.

The CSV point format is one row per point: coordinate columns first,
then label components; unlabeled rows leave the label cells empty.
Labeled rows must come first.
"""

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .exceptions import ConfigError
from .kernels import InputPoint, KernelConfig, region_dim
from .objective import ProblemSpec
from .regularizer import (
    RegularizerConfig,
    between_view_operator,
    combine_regularizer,
    gaussian_weights,
    graph_laplacian,
    within_view_embed,
)
from .solver import SolveConfig
from .spaces import SpaceDims

_LOSS_ALIASES = {
    "ls": "least-squares",
    "els": "exponential-least-squares",
}


@dataclass(frozen=True)
class MeshRequest:
    region: int
    grid: int = 50
    component: int = 0
    path: str = None

    def filename(self):
        return self.path or f"mesh_region{self.region}_component{self.component}.csv"


@dataclass(frozen=True)
class Outputs:
    report: str = "report.txt"
    trace: str = "trace.csv"
    meshes: tuple = ()


@dataclass(frozen=True)
class RunConfig:
    spec: ProblemSpec
    solve: SolveConfig
    outputs: Outputs
    region_boxes: dict = field(default_factory=dict)


def _get(mapping, key, path, default=None, required=False):
    if key not in mapping or mapping[key] is None:
        if required:
            raise ConfigError("missing required field", field=f"{path}.{key}")
        return default
    return mapping[key]


def _read_points_csv(path, ambient_dim):
    points = []
    labels = []
    with open(path, newline="") as fh:
        for row_idx, row in enumerate(csv.reader(fh)):
            if not row or all(not c.strip() for c in row):
                continue
            cells = [c.strip() for c in row]
            if len(cells) < ambient_dim:
                raise ConfigError(
                    f"row {row_idx} has fewer than {ambient_dim} coordinates",
                    field="problem.points_csv",
                )
            coords = [float(c) for c in cells[:ambient_dim]]
            label_cells = [c for c in cells[ambient_dim:] if c != ""]
            points.append(coords)
            labels.append([float(c) for c in label_cells] or None)
    return points, labels


def _build_regularizer(reg_raw, gamma_I, points, dims, path="problem.regularizer"):
    cfg = RegularizerConfig(
        gamma_I=gamma_I,
        gamma_B=float(_get(reg_raw, "gamma_B", path, 0.0)),
        gamma_W=float(_get(reg_raw, "gamma_W", path, 0.0)),
        sigma_graph=float(_get(reg_raw, "sigma_graph", path, 1.0)),
        epsilon_neighbor=_get(reg_raw, "epsilon_neighbor", path),
        normalized=bool(_get(reg_raw, "normalized", path, False)),
    )
    M_W = None
    if _get(reg_raw, "within_view", path, True):
        w = gaussian_weights(points, cfg.sigma_graph, cfg.epsilon_neighbor)
        lap = graph_laplacian(w, cfg.normalized)
        M_W = within_view_embed(lap, dims)
    M_B = None
    bv = _get(reg_raw, "between_view", path)
    if bv is not None:
        M_B = between_view_operator(
            int(_get(bv, "m", f"{path}.between_view", required=True)),
            int(_get(bv, "dimY", f"{path}.between_view", required=True)),
            len(points),
        )
        if M_B.M.shape[0] != dims.N:
            raise ConfigError(
                "between-view operator size disagrees with dims",
                field=f"{path}.between_view",
            )
    if M_W is None and M_B is None:
        return np.zeros((dims.N, dims.N))
    return combine_regularizer(cfg, M_B=M_B, M_W=M_W, layout=dims).M


def load_config(path):
    """Parse and validate a run-configuration file into a RunConfig."""
    path = Path(path)
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except yaml.YAMLError as exc:
        raise ConfigError(f"config parse error: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")

    prob = _get(raw, "problem", "", required=True)

    # points and labels
    inline_points = _get(prob, "points", "problem")
    csv_path = _get(prob, "points_csv", "problem")
    if (inline_points is None) == (csv_path is None):
        raise ConfigError(
            "exactly one of points / points_csv is required", field="problem"
        )
    if csv_path is not None:
        ambient_dim = _get(prob, "ambient_dim", "problem", required=True)
        csv_file = Path(csv_path)
        if not csv_file.is_absolute():
            csv_file = path.parent / csv_file
        coords, row_labels = _read_points_csv(csv_file, int(ambient_dim))
        labels = [y for y in row_labels if y is not None]
        n_lab = len(labels)
        if any(y is not None for y in row_labels[n_lab:]):
            raise ConfigError(
                "labeled rows must precede unlabeled rows", field="problem.points_csv"
            )
    else:
        coords = [list(map(float, p)) for p in inline_points]
        labels = [
            list(np.atleast_1d(np.asarray(y, dtype=float)))
            for y in _get(prob, "labels", "problem", required=True)
        ]
    n = len(coords)
    if n == 0:
        raise ConfigError("at least one point is required", field="problem.points")
    p_dim = len(coords[0])
    if any(len(c) != p_dim for c in coords):
        raise ConfigError("points must share one ambient dimension", field="problem.points")

    regions = _get(prob, "regions", "problem")
    if regions is not None:
        regions = [int(r) for r in regions]
        if len(regions) != n:
            raise ConfigError("regions length must match points", field="problem.regions")
    points = tuple(
        InputPoint(coords=c, region=(regions[i] if regions else None))
        for i, c in enumerate(coords)
    )

    region_boxes = {}
    boxes_raw = _get(prob, "region_boxes", "problem")
    if boxes_raw:
        for key, box in boxes_raw.items():
            box = [[float(v) for v in axis] for axis in box]
            if len(box) != p_dim or any(len(axis) != 2 for axis in box):
                raise ConfigError(
                    f"region box {key} must give [lo, hi] per coordinate",
                    field="problem.region_boxes",
                )
            region_boxes[int(key)] = box
        for i, pt in enumerate(points):
            if pt.region in region_boxes:
                box = region_boxes[pt.region]
                ok = all(lo <= c <= hi for c, (lo, hi) in zip(pt.coords, box))
                if not ok:
                    raise ConfigError(
                        f"point {i} {pt.coords} lies outside the declared box "
                        f"of region {pt.region}",
                        field="problem.points",
                    )

    # kernel
    kern_raw = _get(prob, "kernel", "problem", {})
    kernel = KernelConfig(
        kind=_get(kern_raw, "kind", "problem.kernel", "scalar-gaussian"),
        sigma=float(_get(kern_raw, "sigma", "problem.kernel", 1.0)),
        alpha=float(_get(kern_raw, "alpha", "problem.kernel", 1.0)),
    )
    if kernel.kind == "two-region" and regions is None:
        raise ConfigError(
            "the two-region kernel needs region tags", field="problem.regions"
        )

    # dims
    dims_raw = _get(prob, "dims", "problem", {})
    d = _get(dims_raw, "d", "problem.dims")
    if d is None:
        if kernel.kind == "two-region":
            d = [region_dim(r) for r in regions]
        else:
            d = [1] * n
    e = _get(dims_raw, "e", "problem.dims")
    dims = SpaceDims(d=tuple(int(v) for v in d), e=None if e is None else tuple(e))

    l = len(labels)
    if l < 1:
        raise ConfigError("at least one labeled point is required", field="problem.labels")
    if l > n:
        raise ConfigError("more labels than points", field="problem.labels")

    loss = _get(prob, "loss", "problem", required=True)
    loss = _LOSS_ALIASES.get(loss, loss)
    gamma_A = float(_get(prob, "gamma_A", "problem", required=True))
    if gamma_A <= 0:
        raise ConfigError("gamma_A must be > 0", field="problem.gamma_A")
    gamma_I = float(_get(prob, "gamma_I", "problem", 0.0))

    C = _get(prob, "combination", "problem")
    if C is not None:
        C = tuple(np.asarray(c, dtype=float) for c in C)

    M = _build_regularizer(
        _get(prob, "regularizer", "problem", {}), gamma_I, points, dims
    )

    try:
        spec = ProblemSpec(
            points=points,
            labels=tuple(labels),
            dims=dims,
            M=M,
            gamma_A=gamma_A,
            gamma_I=gamma_I,
            kernel=kernel,
            loss=loss,
            l=l,
            u=n - l,
            C=C,
        )
    except ConfigError as exc:
        raise ConfigError(str(exc), field="problem")

    solve_raw = _get(raw, "solve", "", {})
    try:
        solve = SolveConfig(
            mode=_get(solve_raw, "mode", "solve", "els"),
            lhs_count=int(_get(solve_raw, "lhs_count", "solve", 100)),
            seed=int(_get(solve_raw, "seed", "solve", 0)),
            max_iters=int(_get(solve_raw, "max_iters", "solve", 500)),
            tol_opt=float(_get(solve_raw, "tol_opt", "solve", 1e-6)),
            tol_step=float(_get(solve_raw, "tol_step", "solve", 1e-12)),
            damping_init=float(_get(solve_raw, "damping_init", "solve", 1e-3)),
            armijo_c=float(_get(solve_raw, "armijo_c", "solve", 1e-4)),
            backtrack=float(_get(solve_raw, "backtrack", "solve", 0.5)),
        )
    except ConfigError as exc:
        raise ConfigError(str(exc), field="solve")
    mode_loss = {"ls": "least-squares", "els": "exponential-least-squares"}
    if mode_loss[solve.mode] != spec.loss:
        raise ConfigError(
            f"solve mode {solve.mode!r} does not match loss {spec.loss!r}",
            field="solve.mode",
        )

    out_raw = _get(raw, "outputs", "", {})
    meshes = []
    for m_raw in _get(out_raw, "meshes", "outputs", []) or []:
        req = MeshRequest(
            region=int(_get(m_raw, "region", "outputs.meshes", required=True)),
            grid=int(_get(m_raw, "grid", "outputs.meshes", 50)),
            component=int(_get(m_raw, "component", "outputs.meshes", 0)),
            path=_get(m_raw, "path", "outputs.meshes"),
        )
        if req.region not in region_boxes:
            raise ConfigError(
                f"mesh region {req.region} has no declared box",
                field="outputs.meshes",
            )
        max_dim = max(
            dims.e[i] for i, pt in enumerate(points) if pt.region == req.region
        )
        if not (0 <= req.component < max_dim):
            raise ConfigError(
                f"mesh component {req.component} out of range for region "
                f"{req.region}",
                field="outputs.meshes",
            )
        meshes.append(req)
    outputs = Outputs(
        report=_get(out_raw, "report", "outputs", "report.txt"),
        trace=_get(out_raw, "trace", "outputs", "trace.csv"),
        meshes=tuple(meshes),
    )
    return RunConfig(spec=spec, solve=solve, outputs=outputs, region_boxes=region_boxes)
