# tests/core/gronwall/test_gronwall.py
"""
Testes dos envelopes de Grönwall discretos contra trajetórias L1.

Este módulo valida:
- o sanduíche E_α(-λt^α) ≤ u_n ≤ E_α(-λt^α/ρ) para f = -λu
- o envelope do caso crescente (f = +λu + c) sob a restrição de passo
- a cota uniforme e o caso λ = 0
- a checagem de hipóteses na construção (HYPOTHESIS_VIOLATION)
- diagnósticos: comparação côncava e ajuste da taxa de decaimento

Limites explícitos:
    - O envelope crescente com μ1 estimado na grade padrão é `slow`
"""

import math

import numpy as np
import pytest
from scipy.special import gamma

try:
    from fracgrid.core.exceptions import (
        HypothesisViolationError,
        InsufficientDataError,
        InvalidParameterError,
    )
    from fracgrid.gronwall import (
        EnvelopeVariant,
        GronwallEnvelope,
        affine_envelopes,
        concave_comparison_defect,
        dalpha_of_power,
        decay_rate_fit,
        decay_rho,
        default_sigma,
        envelope_value,
        ml_relaxation_caputo,
        power_caputo,
        verify_trajectory,
    )
    from fracgrid.mesh import Mesh, graded_mesh, max_step_restriction, random_mesh, uniform_mesh
    from fracgrid.ml_func import MLParams, ml, mu1_lower_bound
    from fracgrid.schemes import l1_kernel
    from fracgrid.solver import AffineRhs, FodeProblem, solve
except Exception as e:  # noqa: BLE001
    GronwallEnvelope = None
    _IMPORT_ERR = e
else:
    _IMPORT_ERR = None


def _require_imports():
    if _IMPORT_ERR is not None:
        pytest.fail(
            "Missing gronwall module. Implement:\n"
            "- src/fracgrid/gronwall.py (GronwallEnvelope, verify_trajectory, affine_envelopes, decay_rate_fit)\n"
            f"Import error: {_IMPORT_ERR}"
        )


def _restricted_random_mesh(lam: float, alpha: float, seed: int):
    """Primeira malha aleatória (N = 48, R = 4) com max λτ_n^α ≤ 1."""
    for s in range(seed, seed + 200):
        mesh = random_mesh(1.0, 48, 4.0, s)
        if max_step_restriction(mesh, lam, alpha) <= 1.0:
            return mesh
    raise AssertionError("nenhuma malha aleatória satisfaz a restrição de passo")


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_decay_sandwich(lam, alpha):
    """
    L1 implícito, f = -λu, u0 = 1, malhas graduada e aleatória com
    λτ_n^α ≤ 1: zero violações a 1e-9 relativo.
    """
    _require_imports()
    meshes = [graded_mesh(1.0, 32, 2.0), _restricted_random_mesh(lam, alpha, seed=int(100 * lam + 10 * alpha))]
    sigma = default_sigma()
    for mesh in meshes:
        assert max_step_restriction(mesh, lam, alpha) <= 1.0
        traj = solve(l1_kernel(alpha, mesh), FodeProblem(f=AffineRhs(-lam), u0=1.0))
        lower, upper, notes = affine_envelopes(alpha, -lam, 0.0, 1.0, mesh)
        assert notes == []
        assert lower.variant == EnvelopeVariant.DECAY_LOWER
        assert upper.variant == EnvelopeVariant.DECAY_UPPER_BASIC
        assert upper.rho == pytest.approx(min(1.0 / (1.0 - alpha), sigma), rel=1e-15)
        lo = verify_trajectory(lower, traj, direction="lower")
        hi = verify_trajectory(upper, traj, direction="upper")
        assert lo.passed, lo
        assert hi.passed, hi
        assert lo.checked == mesh.N + 1
        exact = np.array([ml(MLParams(alpha), -lam * t ** alpha) for t in mesh.points])
        np.testing.assert_allclose(lower.values(), exact, rtol=1e-15)


def test_step_restricted_upper_envelope(graded_mesh_32):
    _require_imports()
    alpha, lam = 0.5, 1.0
    env = GronwallEnvelope(
        EnvelopeVariant.DECAY_UPPER_STEP_RESTRICTED, alpha=alpha, lam=lam, c=0.0, v0=1.0, mesh=graded_mesh_32
    )
    assert env.sigma == default_sigma()
    assert env.rho == pytest.approx(env.sigma, rel=1e-15)
    traj = solve(l1_kernel(alpha, graded_mesh_32), FodeProblem(f=AffineRhs(-lam), u0=1.0))
    assert verify_trajectory(env, traj).passed
    basic = GronwallEnvelope(EnvelopeVariant.DECAY_UPPER_BASIC, alpha=alpha, lam=lam, c=0.0, v0=1.0, mesh=graded_mesh_32)
    lower = GronwallEnvelope(EnvelopeVariant.DECAY_LOWER, alpha=alpha, lam=lam, c=0.0, v0=1.0, mesh=graded_mesh_32)
    assert np.all(lower.values() <= basic.values() + 1e-15)


def test_decay_rho_without_restriction():
    _require_imports()
    assert decay_rho(0.5, 1.0, 1.7, restricted=False) == 2.0
    assert decay_rho(0.5, 1.0, 1.7, restricted=True) == 1.7
    assert decay_rho(0.2, 2.0, 10.0, restricted=True) == 2.5
    coarse = uniform_mesh(20.0, 4)
    env = GronwallEnvelope(EnvelopeVariant.DECAY_UPPER_BASIC, alpha=0.5, lam=1.0, c=0.0, v0=1.0, mesh=coarse)
    assert env.sigma is None and env.rho == 2.0
    traj = solve(l1_kernel(0.5, coarse), FodeProblem(f=AffineRhs(-1.0), u0=1.0))
    assert verify_trajectory(env, traj).passed


def test_affine_decay_with_forcing(random_mesh_24):
    """f = -λv + c com v0 > c/λ: os dois lados do envelope valem."""
    _require_imports()
    alpha, lam, c, v0 = 0.6, 1.5, 0.3, 2.0
    mesh = random_mesh_24
    assert max_step_restriction(mesh, lam, alpha) <= 1.0
    traj = solve(l1_kernel(alpha, mesh), FodeProblem(f=AffineRhs(-lam, c), u0=v0))
    lower, upper, _ = affine_envelopes(alpha, -lam, c, v0, mesh)
    assert verify_trajectory(lower, traj, "lower").passed
    assert verify_trajectory(upper, traj, "upper").passed


def test_uniform_bound(graded_mesh_32):
    """v0 ≤ c/λ: v_n ≤ (v0 - c/λ) E_α(-λt_n^α) + c/λ."""
    _require_imports()
    alpha, lam, c = 0.4, 2.0, 1.0
    traj = solve(l1_kernel(alpha, graded_mesh_32), FodeProblem(f=AffineRhs(-lam, c), u0=0.0))
    lower, upper, _ = affine_envelopes(alpha, -lam, c, 0.0, graded_mesh_32)
    assert lower is None
    assert upper.variant == EnvelopeVariant.UNIFORM_BOUND
    report = verify_trajectory(upper, traj)
    assert report.passed and report.max_violation <= 0.0
    assert envelope_value(upper, 0) == pytest.approx(0.0, abs=1e-15)


def test_lambda_zero_envelope(graded_mesh_32):
    _require_imports()
    alpha, c = 0.5, 0.7
    traj = solve(l1_kernel(alpha, graded_mesh_32), FodeProblem(f=AffineRhs(0.0, c), u0=1.0))
    lower, upper, _ = affine_envelopes(alpha, 0.0, c, 1.0, graded_mesh_32)
    assert lower is None and upper.variant == EnvelopeVariant.LAMBDA_ZERO
    assert verify_trajectory(upper, traj).passed
    assert envelope_value(upper, graded_mesh_32.N) == pytest.approx(1.0 + c / gamma(1.5), rel=1e-14)
    lower, upper, _ = affine_envelopes(alpha, 0.0, -c, 1.0, graded_mesh_32)
    assert upper is None and lower.variant == EnvelopeVariant.LAMBDA_ZERO


def _growing_mesh(lam: float, alpha: float, mu: float, N: int = 64) -> Mesh:
    """Malha uniforme com λτ^α = 0.9·min(μ, 1/Γ(2-α))."""
    bound = 0.9 * min(mu, 1.0 / gamma(2.0 - alpha))
    tau = (bound / lam) ** (1.0 / alpha)
    return uniform_mesh(N * tau, N)


@pytest.mark.parametrize("alpha,lam", [(0.5, 1.0), (0.8, 0.5)])
def test_growing_envelope_with_closed_mu1_bound(alpha, lam):
    """
    f = +λu + c com λτ^α < min(μ, ν/Γ(2-α)) e μ = ν·(cota fechada de μ1):
    a trajetória fica abaixo de (u0 + c/λ) E_α(λt^α/μ) - c/λ.
    """
    _require_imports()
    mu = mu1_lower_bound()
    c, u0 = 0.5, 1.0
    mesh = _growing_mesh(lam, alpha, mu)
    traj = solve(l1_kernel(alpha, mesh), FodeProblem(f=AffineRhs(lam, c), u0=u0))
    env = GronwallEnvelope(EnvelopeVariant.GROWING_LINEAR, alpha=alpha, lam=lam, c=c, v0=u0, mesh=mesh, mu=mu)
    report = verify_trajectory(env, traj)
    assert report.passed, report
    lower, upper, notes = affine_envelopes(alpha, lam, c, u0, mesh, mu=mu)
    assert lower is None and upper.variant == EnvelopeVariant.GROWING_LINEAR and notes == []


def test_growing_envelope_rejects_large_steps(uniform_mesh_16):
    _require_imports()
    with pytest.raises(HypothesisViolationError) as info:
        GronwallEnvelope(EnvelopeVariant.GROWING_LINEAR, alpha=0.5, lam=1.0, c=0.0, v0=1.0, mesh=uniform_mesh_16, mu=0.1)
    assert info.value.decision_required is True
    lower, upper, notes = affine_envelopes(0.5, 1.0, 0.0, 1.0, uniform_mesh_16, mu=0.1)
    assert lower is None and upper is None
    assert len(notes) == 1


@pytest.mark.slow
def test_growing_envelope_with_estimated_mu1():
    _require_imports()
    alpha, lam, c, u0 = 0.6, 1.0, 0.2, 1.0
    from fracgrid.gronwall import default_mu1

    mu = default_mu1()
    assert mu >= mu1_lower_bound()
    mesh = _growing_mesh(lam, alpha, mu)
    traj = solve(l1_kernel(alpha, mesh), FodeProblem(f=AffineRhs(lam, c), u0=u0))
    env = GronwallEnvelope(EnvelopeVariant.GROWING_LINEAR, alpha=alpha, lam=lam, c=c, v0=u0, mesh=mesh)
    assert env.mu == pytest.approx(mu)
    assert verify_trajectory(env, traj).passed


@pytest.mark.parametrize(
    "variant,lam,c,v0",
    [
        (EnvelopeVariant.DECAY_LOWER, 1.0, 2.0, 1.0),
        (EnvelopeVariant.DECAY_UPPER_BASIC, 1.0, 1.0, 1.0),
        (EnvelopeVariant.UNIFORM_BOUND, 1.0, 0.0, 1.0),
        (EnvelopeVariant.LAMBDA_ZERO, 1.0, 0.0, 1.0),
        (EnvelopeVariant.DECAY_LOWER, 0.0, 0.0, 1.0),
    ],
)
def test_hypothesis_violations(variant, lam, c, v0, uniform_mesh_16):
    _require_imports()
    with pytest.raises(HypothesisViolationError) as info:
        GronwallEnvelope(variant, alpha=0.5, lam=lam, c=c, v0=v0, mesh=uniform_mesh_16)
    assert info.value.decision_required is True
    assert info.value.details["variant"] == variant.value


def test_step_restriction_violation():
    _require_imports()
    coarse = uniform_mesh(10.0, 2)
    with pytest.raises(HypothesisViolationError) as info:
        GronwallEnvelope(
            EnvelopeVariant.DECAY_UPPER_STEP_RESTRICTED, alpha=0.5, lam=1.0, c=0.0, v0=1.0, mesh=coarse, sigma=1.5
        )
    assert info.value.details["lhs"] == pytest.approx(math.sqrt(5.0))


def test_invalid_parameters(uniform_mesh_16):
    _require_imports()
    with pytest.raises(InvalidParameterError):
        GronwallEnvelope(EnvelopeVariant.DECAY_LOWER, alpha=1.0, lam=1.0, c=0.0, v0=1.0, mesh=uniform_mesh_16)
    with pytest.raises(InvalidParameterError):
        GronwallEnvelope(EnvelopeVariant.DECAY_LOWER, alpha=0.5, lam=-1.0, c=0.0, v0=1.0, mesh=uniform_mesh_16)


def test_verify_reports_worst_violation(uniform_mesh_16):
    _require_imports()
    env = GronwallEnvelope(EnvelopeVariant.DECAY_LOWER, alpha=0.5, lam=1.0, c=0.0, v0=1.0, mesh=uniform_mesh_16)
    values = env.values().copy()
    values[7] += 1e-3
    report = verify_trajectory(env, values, direction="upper")
    assert not report.passed
    assert report.worst_index == 7
    assert report.max_violation == pytest.approx(1e-3, rel=1e-9)
    assert verify_trajectory(env, env.values(), direction="lower").passed
    with pytest.raises(InvalidParameterError):
        verify_trajectory(env, values, direction="sideways")
    with pytest.raises(InvalidParameterError):
        verify_trajectory(env, values[:-1])
    with pytest.raises(IndexError):
        envelope_value(env, 17)


def test_concave_comparison_is_nonnegative(random_mesh_24):
    """Funções côncavas: 𝒟_τ^α v(t_n) ≥ D^α v(t_n) para L1."""
    _require_imports()
    for alpha in (0.3, 0.7):
        kernel = l1_kernel(alpha, random_mesh_24)
        power = concave_comparison_defect(
            kernel,
            lambda t, a=alpha: t ** a / gamma(1 + a),
            lambda t, a=alpha: power_caputo(a, t, a),
        )
        assert power >= -1e-12
        relax = concave_comparison_defect(
            kernel,
            lambda t, a=alpha: 1.0 - np.array([ml(MLParams(a), -(x ** a)) for x in t]),
            lambda t, a=alpha: ml_relaxation_caputo(a, t),
        )
        assert relax >= -1e-10
        for n in (1, kernel.N):
            assert dalpha_of_power(kernel, n) >= 1.0 - 1e-12
    with pytest.raises(IndexError):
        dalpha_of_power(kernel, 0)


def test_power_caputo_closed_form():
    _require_imports()
    t = np.array([0.5, 1.0, 2.0])
    np.testing.assert_allclose(power_caputo(0.5, t, 1.0), t ** 0.5 / gamma(1.5), rtol=1e-15)
    np.testing.assert_allclose(power_caputo(0.3, t, 0.3), 1.0, rtol=1e-15)


def test_decay_rate_fit():
    _require_imports()
    mesh = graded_mesh(1000.0, 200, 2.0)
    alpha = 0.4
    v = np.concatenate([[1.0], 3.0 * mesh.points[1:] ** (-alpha)])
    assert decay_rate_fit(v, mesh, alpha) == pytest.approx(-alpha, abs=1e-12)
    with pytest.raises(InsufficientDataError):
        decay_rate_fit(np.ones(3), uniform_mesh(1.0, 2), alpha)
    with pytest.raises(InvalidParameterError):
        decay_rate_fit(v, mesh, 0.0)
