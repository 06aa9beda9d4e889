"""Benchmark: compiled residual/Jacobian kernels vs the numpy fallback.

Builds a family of random identity-operator instances with the
exponential loss and times ``els_residual`` / ``els_jacobian_R`` for
both implementations.

Usage: python benchmarks/bench_core.py [repeats]
"""

import sys
import time

import numpy as np

from mvksolve import _core
from mvksolve._core import _ref
from mvksolve import (
    InputPoint,
    KernelConfig,
    ProblemSpec,
    SpaceDims,
    gaussian_weights,
    graph_laplacian,
    within_view_embed,
)


def build_instance(n, l, seed):
    rng = np.random.default_rng(seed)
    d = tuple(int(v) for v in rng.integers(1, 3, size=n))
    dims = SpaceDims(d=d)
    points = tuple(
        InputPoint(coords=tuple(p)) for p in rng.uniform(-1, 1, size=(n, 2))
    )
    M = within_view_embed(
        graph_laplacian(gaussian_weights(points, 0.8)), dims
    ).M
    return ProblemSpec(
        points=points,
        labels=tuple(rng.normal(size=d[j]) for j in range(l)),
        dims=dims,
        M=M,
        gamma_A=0.5,
        gamma_I=1.0,
        kernel=KernelConfig(kind="scalar-gaussian", sigma=0.9),
        loss="exponential-least-squares",
        l=l,
        u=n - l,
    )


def time_fn(fn, args, repeats):
    fn(*args)  # warm up
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    repeats = int(sys.argv[1]) if len(sys.argv) > 1 else 50
    if not _core.HAVE_COMPILED:
        print("compiled extension not available; nothing to compare")
        return
    from mvksolve._core import _els

    print(f"{'n':>5} {'N':>5} {'l':>3} | "
          f"{'resid ref':>11} {'resid cy':>11} {'speedup':>8} | "
          f"{'jac ref':>11} {'jac cy':>11} {'speedup':>8}")
    for n, l in [(20, 6), (60, 20), (120, 40), (240, 80)]:
        spec = build_instance(n, l, seed=n)
        rng = np.random.default_rng(0)
        a = rng.normal(size=spec.N)
        y_flat, y_offs = spec._labels_flat
        offs = np.asarray(spec.dims.offsets, dtype=np.intp)
        r_args = (a, spec.gram.data, spec.M, y_flat, y_offs, offs,
                  spec.l, spec.gamma_A, spec.gamma_I)
        j_args = (a, spec.gram.data, spec.MK, y_flat, y_offs, offs,
                  spec.l, spec.gamma_A, spec.gamma_I)
        assert np.allclose(_els.els_residual(*r_args), _ref.els_residual(*r_args))
        assert np.allclose(
            _els.els_jacobian_R(*j_args), _ref.els_jacobian_R(*j_args)
        )
        t_rr = time_fn(_ref.els_residual, r_args, repeats)
        t_rc = time_fn(_els.els_residual, r_args, repeats)
        t_jr = time_fn(_ref.els_jacobian_R, j_args, repeats)
        t_jc = time_fn(_els.els_jacobian_R, j_args, repeats)
        print(f"{n:>5} {spec.N:>5} {l:>3} | "
              f"{t_rr*1e6:>9.1f}us {t_rc*1e6:>9.1f}us {t_rr/t_rc:>7.2f}x | "
              f"{t_jr*1e6:>9.1f}us {t_jc*1e6:>9.1f}us {t_jr/t_jc:>7.2f}x")


if __name__ == "__main__":
    main()
