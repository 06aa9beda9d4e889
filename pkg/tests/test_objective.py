import numpy as np
import pytest

from mvksolve import (
    ConfigError,
    InputPoint,
    KernelConfig,
    ProblemSpec,
    SpaceDims,
    gradient_I,
    hessian_I,
    jacobian_H,
    jacobian_R,
    learning_functional,
    project_onto_span,
    residual_H,
    solve_ls,
)
from mvksolve.objective import learning_functional_extended
from conftest import (
    ORACLE,
    REFERENCE_COEFFS,
    fd_gradient,
    fd_jacobian,
    make_random_spec,
    rel_err,
)


def _single_point_spec(loss, y, gamma_A):
    return ProblemSpec(
        points=(InputPoint(coords=(0.0, 0.0)),),
        labels=([y],),
        dims=SpaceDims(d=(1,)),
        M=np.zeros((1, 1)),
        gamma_A=gamma_A,
        gamma_I=0.0,
        kernel=KernelConfig(kind="scalar-gaussian", sigma=1.0),
        loss=loss,
        l=1,
        u=0,
    )


def test_functional_at_zero_els(two_region_spec):
    val = learning_functional(two_region_spec, np.zeros(9))
    assert val == pytest.approx(ORACLE["i_zero"], abs=1e-12)


def test_functional_at_zero_ls():
    rng = np.random.default_rng(0)
    spec = make_random_spec(rng, loss="least-squares")
    expect = sum(float(np.sum(y**2)) for y in spec.labels) / spec.l
    assert learning_functional(spec, np.zeros(spec.N)) == pytest.approx(expect)


def test_functional_golden_value_at_reference(two_region_spec):
    val = learning_functional(two_region_spec, REFERENCE_COEFFS)
    assert val == pytest.approx(ORACLE["objective_at_reference"], abs=1e-12)


def test_els_data_term_bounded(two_region_spec):
    spec = two_region_spec
    rng = np.random.default_rng(1)
    K = spec.gram.data
    for _ in range(50):
        a = rng.normal(size=spec.N) * 3
        f = K @ a
        reg = spec.gamma_A * float(a @ K @ a) + spec.gamma_I * float(
            f @ spec.M @ f
        )
        data = learning_functional(spec, a) - reg
        assert -1e-10 <= data <= 1.0 + 1e-10


def test_gradient_single_point_ls_closed_form():
    y, gamma_A = 1.7, 0.4
    spec = _single_point_spec("least-squares", y, gamma_A)
    a_star = np.array([y / (1.0 + gamma_A)])
    assert np.max(np.abs(gradient_I(spec, a_star))) < 1e-12


def test_gradient_matches_fd_random_specs():
    rng = np.random.default_rng(2)
    for loss in ("least-squares", "exponential-least-squares", "sigmoid"):
        for _ in range(5):
            spec = make_random_spec(
                rng, loss=loss, scalar_only=(loss == "sigmoid")
            )
            a = rng.normal(size=spec.N)
            g = gradient_I(spec, a)
            fd = fd_gradient(lambda v: learning_functional(spec, v), a)
            assert rel_err(g, fd) <= 1e-5


def test_gradient_with_combination_operators():
    rng = np.random.default_rng(3)
    spec = make_random_spec(rng, loss="exponential-least-squares", with_C=True)
    a = rng.normal(size=spec.N)
    fd = fd_gradient(lambda v: learning_functional(spec, v), a)
    assert rel_err(gradient_I(spec, a), fd) <= 1e-5


def test_gradient_rejects_nondifferentiable():
    spec = _single_point_spec("hinge", 1.0, 0.5)
    with pytest.raises(ConfigError):
        gradient_I(spec, np.zeros(1))


def test_gradient_zero_at_ls_solution():
    rng = np.random.default_rng(4)
    for _ in range(5):
        spec = make_random_spec(rng, loss="least-squares")
        a = solve_ls(spec)
        assert np.max(np.abs(gradient_I(spec, a))) <= 1e-8


def test_hessian_matches_fd():
    rng = np.random.default_rng(5)
    for loss in ("least-squares", "exponential-least-squares"):
        spec = make_random_spec(rng, loss=loss)
        a = rng.normal(size=spec.N)
        H = hessian_I(spec, a)
        fd = fd_jacobian(lambda v: gradient_I(spec, v), a)
        assert rel_err(H, fd) <= 1e-5


def test_residual_unlabeled_blocks_zero_at_origin(two_region_spec):
    spec = two_region_spec
    H = residual_H(spec, np.zeros(spec.N), "paper-faithful")
    lab = spec.dims.offsets[spec.l]
    assert np.array_equal(H[lab:], np.zeros(spec.N - lab))


def test_residual_value_at_reference(two_region_spec):
    H = residual_H(two_region_spec, REFERENCE_COEFFS, "paper-faithful")
    assert np.max(np.abs(H)) == pytest.approx(
        ORACLE["resid_at_reference"], abs=1e-12
    )


def test_both_variants_vanish_at_ls_solution():
    rng = np.random.default_rng(6)
    for _ in range(5):
        spec = make_random_spec(rng, loss="least-squares")
        a = solve_ls(spec)
        for variant in ("paper-faithful", "gradient-consistent"):
            assert np.max(np.abs(residual_H(spec, a, variant))) <= 1e-10


def test_gradient_consistent_is_scaled_gradient():
    rng = np.random.default_rng(7)
    spec = make_random_spec(rng, loss="exponential-least-squares")
    a = rng.normal(size=spec.N)
    assert np.allclose(
        residual_H(spec, a, "gradient-consistent"),
        gradient_I(spec, a) / (2 * spec.gamma_A),
        atol=1e-14,
    )


def test_residual_rejects_unknown_variant(two_region_spec):
    with pytest.raises(ConfigError):
        residual_H(two_region_spec, np.zeros(9), "bogus")


def test_jacobian_matches_fd_paper_faithful():
    rng = np.random.default_rng(8)
    for _ in range(5):
        spec = make_random_spec(rng, loss="exponential-least-squares")
        a = rng.normal(size=spec.N)
        J = jacobian_H(spec, a, "paper-faithful")
        fd = fd_jacobian(lambda v: residual_H(spec, v, "paper-faithful"), a)
        assert rel_err(J, fd) <= 1e-5


def test_jacobian_matches_fd_with_combination():
    rng = np.random.default_rng(9)
    spec = make_random_spec(rng, loss="exponential-least-squares", with_C=True)
    a = rng.normal(size=spec.N)
    J = jacobian_H(spec, a, "paper-faithful")
    fd = fd_jacobian(lambda v: residual_H(spec, v, "paper-faithful"), a)
    assert rel_err(J, fd) <= 1e-5


def test_jacobian_structure_identity_plus_R(two_region_spec):
    spec = two_region_spec
    rng = np.random.default_rng(10)
    a = rng.normal(size=spec.N)
    R = jacobian_R(spec, a, "paper-faithful")
    J = jacobian_H(spec, a, "paper-faithful")
    assert np.array_equal(J, np.eye(spec.N) + R / spec.gamma_A)


def test_unlabeled_jacobian_rows_constant(two_region_spec):
    spec = two_region_spec
    rng = np.random.default_rng(11)
    lab = spec.dims.offsets[spec.l]
    J1 = jacobian_H(spec, rng.normal(size=spec.N), "paper-faithful")
    J2 = jacobian_H(spec, rng.normal(size=spec.N), "paper-faithful")
    assert np.allclose(J1[lab:, :], J2[lab:, :], atol=1e-12)
    expect = np.eye(spec.N)[lab:, :] + (
        spec.gamma_I / spec.gamma_A
    ) * (spec.M @ spec.gram.data)[lab:, :]
    assert np.allclose(J1[lab:, :], expect, atol=1e-12)


def test_projection_no_extra_points_is_identity():
    rng = np.random.default_rng(12)
    spec = make_random_spec(rng, loss="least-squares")
    b = rng.normal(size=spec.N)
    c = project_onto_span(spec, [], b)
    assert np.allclose(c, b, atol=1e-8)


def test_projection_zero_is_zero():
    rng = np.random.default_rng(13)
    spec = make_random_spec(rng, loss="least-squares", scalar_only=True)
    extra = [InputPoint(coords=tuple(p)) for p in rng.uniform(-1, 1, size=(2, 2))]
    c = project_onto_span(spec, extra, np.zeros(spec.N + 2))
    assert np.allclose(c, np.zeros(spec.N), atol=1e-12)


def test_projection_matches_normal_equations():
    rng = np.random.default_rng(14)
    spec = make_random_spec(rng, loss="least-squares", scalar_only=True)
    extra = [InputPoint(coords=tuple(p)) for p in rng.uniform(-1, 1, size=(3, 2))]
    from mvksolve.objective import extended_gram

    gram_ext, _ = extended_gram(spec, extra)
    b = rng.normal(size=gram_ext.data.shape[0])
    c = project_onto_span(spec, extra, b)
    # minimize ||f - sum K_{x_i} c_i||_H^2 by dense normal equations
    G_xx = spec.gram.data
    G_xe = gram_ext.data[: spec.N, :]
    c_oracle = np.linalg.lstsq(G_xx, G_xe @ b, rcond=None)[0]
    assert np.allclose(c, c_oracle, atol=1e-8)


def test_projection_never_increases_functional():
    rng = np.random.default_rng(15)
    for loss in ("least-squares", "exponential-least-squares"):
        spec = make_random_spec(rng, loss=loss, scalar_only=True)
        for _ in range(20):
            extra = [
                InputPoint(coords=tuple(p))
                for p in rng.uniform(-1, 1, size=(2, 2))
            ]
            b = rng.normal(size=spec.N + 2) * 0.5
            c = project_onto_span(spec, extra, b)
            i_proj = learning_functional(spec, c)
            i_orig = learning_functional_extended(spec, extra, b)
            assert i_proj <= i_orig + 1e-12


def test_spec_validation_errors():
    with pytest.raises(ConfigError):
        _single_point_spec("least-squares", 1.0, 0.0)  # gamma_A must be > 0
    with pytest.raises(ConfigError):
        ProblemSpec(
            points=(InputPoint(coords=(0.0, 0.0)),),
            labels=([1.0, 2.0],),  # label longer than e_1
            dims=SpaceDims(d=(1,)),
            M=np.zeros((1, 1)),
            gamma_A=1.0,
            gamma_I=0.0,
            kernel=KernelConfig(),
            loss="least-squares",
            l=1,
            u=0,
        )
