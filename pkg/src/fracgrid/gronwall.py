"""
Envelopes de Grönwall discretos e sua verificação contra trajetórias.

Responsabilidades:
    - Avaliar os envelopes (cota uniforme, decaimento inferior/superior,
      caso crescente e λ = 0) via ml_func
    - Checar as hipóteses de cada variante ao construir o envelope
    - Verificar trajetórias (violação máxima com sinal)
    - Diagnósticos auxiliares: 𝒟 de potências, comparação côncava e ajuste
      da taxa de decaimento na cauda

Decisões arquiteturais:
    - ν, ρ1 vêm de schemes.estimate_nu_rho1; σ de ml_func.estimate_sigma_constants;
      μ = ν·μ1 com μ1 de ml_func.estimate_mu1 (calculados sob demanda e
      memorizados)
    - ρ do decaimento básico é min(ρ1/(1-α), ρ1σ) quando max λτ_n^α ≤ 1,
      senão ρ1/(1-α)
    - A tolerância de verificação é relativa ao envelope: 1e-9·(1 + |env|)

Limites explícitos:
    - Só a restrição de passo λτ_n^α ≤ 1 (γ = 1) é implementada
    - Violações são dados (VerificationReport), não exceções
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
from scipy.special import rgamma

from fracgrid.core import errors as E
from fracgrid.core.exceptions import (
    HypothesisViolationError,
    InsufficientDataError,
    InvalidParameterError,
)
from fracgrid.mesh import Mesh, max_step_restriction
from fracgrid.ml_func import MLParams, estimate_mu1, estimate_sigma_constants, ml
from fracgrid.schemes import SchemeKernel, discrete_caputo
from fracgrid.solver import Trajectory

VERIFY_TOL = 1e-9


class EnvelopeVariant(str, Enum):
    UNIFORM_BOUND = "uniform"
    DECAY_LOWER = "decay_lower"
    DECAY_UPPER_BASIC = "decay_upper"
    DECAY_UPPER_STEP_RESTRICTED = "decay_upper_restricted"
    GROWING_LINEAR = "growing"
    LAMBDA_ZERO = "lambda_zero"


@lru_cache(maxsize=1)
def default_sigma() -> float:
    return estimate_sigma_constants()[2]


@lru_cache(maxsize=1)
def default_mu1() -> float:
    return estimate_mu1()


def decay_rho(alpha: float, rho1: float, sigma: Optional[float], restricted: bool) -> float:
    """ρ = min(ρ1/(1-α), ρ1σ) sob a restrição de passo, senão ρ1/(1-α)."""
    basic = rho1 / (1.0 - alpha)
    if restricted and sigma is not None:
        return min(basic, rho1 * sigma)
    return basic


def _violation(variant: "EnvelopeVariant", inequality: str, lhs: float, rhs: float) -> HypothesisViolationError:
    return HypothesisViolationError.from_payload(
        E.hypothesis_violation(variant=variant.value, inequality=inequality, lhs=float(lhs), rhs=float(rhs))
    )


@dataclass(frozen=True)
class GronwallEnvelope:
    """
    Envelope n ↦ bound(t_n) de uma variante com suas constantes.

    As hipóteses da variante são verificadas na construção; σ e μ ausentes
    são preenchidos pelos estimadores numéricos quando a variante precisa.
    """

    variant: EnvelopeVariant
    alpha: float
    lam: float
    c: float
    v0: float
    mesh: Mesh
    nu: float = 1.0
    rho1: float = 1.0
    sigma: Optional[float] = None
    mu: Optional[float] = None

    def __post_init__(self) -> None:
        v = self.variant
        if not 0.0 < self.alpha < 1.0:
            raise InvalidParameterError.from_payload(
                E.invalid_parameter(name="alpha", value=self.alpha, expected="0 < alpha < 1")
            )
        if self.lam < 0.0:
            raise InvalidParameterError.from_payload(E.invalid_parameter(name="lam", value=self.lam, expected="lam >= 0"))
        if v == EnvelopeVariant.LAMBDA_ZERO:
            if self.lam != 0.0:
                raise _violation(v, "lambda == 0", self.lam, 0.0)
            return
        if self.lam == 0.0:
            raise _violation(v, "lambda > 0", self.lam, 0.0)

        ratio = self.c / self.lam
        step = max_step_restriction(self.mesh, self.lam, self.alpha)
        if v == EnvelopeVariant.UNIFORM_BOUND and not self.v0 <= ratio:
            raise _violation(v, "v0 <= c/lambda", self.v0, ratio)
        if v in (
            EnvelopeVariant.DECAY_LOWER,
            EnvelopeVariant.DECAY_UPPER_BASIC,
            EnvelopeVariant.DECAY_UPPER_STEP_RESTRICTED,
        ) and not self.v0 > ratio:
            raise _violation(v, "v0 > c/lambda", self.v0, ratio)
        if v == EnvelopeVariant.DECAY_UPPER_STEP_RESTRICTED:
            if not step <= 1.0:
                raise _violation(v, "max lambda*tau_n^alpha <= 1", step, 1.0)
            if self.sigma is None:
                object.__setattr__(self, "sigma", default_sigma())
        if v == EnvelopeVariant.DECAY_UPPER_BASIC and step <= 1.0 and self.sigma is None:
            object.__setattr__(self, "sigma", default_sigma())
        if v == EnvelopeVariant.GROWING_LINEAR:
            if self.mu is None:
                object.__setattr__(self, "mu", self.nu * default_mu1())
            bound = min(self.mu, self.nu * float(rgamma(2.0 - self.alpha)))
            if not step < bound:
                raise _violation(v, "max lambda*tau_n^alpha < min(mu, nu/Gamma(2-alpha))", step, bound)

    @property
    def rho(self) -> Optional[float]:
        if self.variant == EnvelopeVariant.DECAY_UPPER_BASIC:
            restricted = max_step_restriction(self.mesh, self.lam, self.alpha) <= 1.0
            return decay_rho(self.alpha, self.rho1, self.sigma, restricted)
        if self.variant == EnvelopeVariant.DECAY_UPPER_STEP_RESTRICTED:
            return self.sigma * self.rho1
        return None

    def at_time(self, t: float) -> float:
        a, lam, c, v0 = self.alpha, self.lam, self.c, self.v0
        ta = t ** a
        v = self.variant
        if v == EnvelopeVariant.LAMBDA_ZERO:
            return v0 + c * ta * float(rgamma(1.0 + a)) / self.nu
        E_a = MLParams(a)
        if v in (EnvelopeVariant.UNIFORM_BOUND, EnvelopeVariant.DECAY_LOWER):
            return (v0 - c / lam) * ml(E_a, -lam * ta / self.nu) + c / lam
        if v in (EnvelopeVariant.DECAY_UPPER_BASIC, EnvelopeVariant.DECAY_UPPER_STEP_RESTRICTED):
            return (v0 - c / lam) * ml(E_a, -lam * ta / self.rho) + c / lam
        return (v0 + c / lam) * ml(E_a, lam * ta / self.mu) - c / lam

    def values(self) -> np.ndarray:
        return np.array([self.at_time(float(t)) for t in self.mesh.points])


def envelope_value(env: GronwallEnvelope, n: int) -> float:
    """Envelope em t_n."""
    if not 0 <= n <= env.mesh.N:
        raise IndexError(f"index {n} outside 0..{env.mesh.N}")
    return env.at_time(float(env.mesh.points[n]))


@dataclass(frozen=True)
class VerificationReport:
    """passed ⇔ max_n violação_n ≤ 1e-9·(1 + |env_n|) em todos os pontos."""

    passed: bool
    max_violation: float
    worst_index: int
    checked: int
    direction: str = "upper"


def _trajectory_values(trajectory: Union[Trajectory, np.ndarray]) -> np.ndarray:
    values = trajectory.values if isinstance(trajectory, Trajectory) else trajectory
    return np.asarray(values, dtype=float).reshape(-1)


def verify_trajectory(
    env: GronwallEnvelope,
    trajectory: Union[Trajectory, np.ndarray],
    direction: str = "upper",
) -> VerificationReport:
    """Violação com sinal v_n - env_n (upper) ou env_n - v_n (lower)."""
    if direction not in ("upper", "lower"):
        raise InvalidParameterError.from_payload(
            E.invalid_parameter(name="direction", value=direction, expected="'upper' ou 'lower'")
        )
    v = _trajectory_values(trajectory)
    if v.size != env.mesh.N + 1:
        raise InvalidParameterError.from_payload(
            E.invalid_parameter(name="trajectory", value=int(v.size), expected=f"{env.mesh.N + 1} valores")
        )
    bound = env.values()
    viol = v - bound if direction == "upper" else bound - v
    excess = viol - VERIFY_TOL * (1.0 + np.abs(bound))
    worst = int(np.argmax(excess))
    return VerificationReport(
        passed=bool(np.all(excess <= 0.0)),
        max_violation=float(np.max(viol)),
        worst_index=worst,
        checked=int(v.size),
        direction=direction,
    )


def affine_envelopes(
    alpha: float,
    beta: float,
    c: float,
    v0: float,
    mesh: Mesh,
    *,
    nu: float = 1.0,
    rho1: float = 1.0,
    sigma: Optional[float] = None,
    mu: Optional[float] = None,
) -> Tuple[Optional[GronwallEnvelope], Optional[GronwallEnvelope], List[str]]:
    """
    (inferior, superior, notas) aplicáveis a D^α v = βv + c.

    β < 0 e v0 > c/λ: DecayLower e DecayUpperBasic; β < 0 e v0 ≤ c/λ:
    UniformBound; β = 0: LambdaZero (superior se c ≥ 0, inferior se c < 0);
    β > 0: GrowingLinear quando a hipótese de passo vale.
    """
    notes: List[str] = []
    common = dict(alpha=alpha, c=c, v0=v0, mesh=mesh, nu=nu, rho1=rho1)
    if beta < 0.0:
        lam = -beta
        if v0 > c / lam:
            lower = GronwallEnvelope(EnvelopeVariant.DECAY_LOWER, lam=lam, **common)
            upper = GronwallEnvelope(EnvelopeVariant.DECAY_UPPER_BASIC, lam=lam, sigma=sigma, **common)
            return lower, upper, notes
        return None, GronwallEnvelope(EnvelopeVariant.UNIFORM_BOUND, lam=lam, **common), notes
    if beta == 0.0:
        env = GronwallEnvelope(EnvelopeVariant.LAMBDA_ZERO, lam=0.0, **common)
        return (None, env, notes) if c >= 0.0 else (env, None, notes)
    try:
        upper = GronwallEnvelope(EnvelopeVariant.GROWING_LINEAR, lam=beta, mu=mu, **common)
    except HypothesisViolationError as exc:
        notes.append(exc.message)
        return None, None, notes
    return None, upper, notes


# ---------------------------------------------------------------------------
# Diagnósticos
# ---------------------------------------------------------------------------

def dalpha_of_power(kernel: SchemeKernel, n: int) -> float:
    """𝒟_τ^α aplicado a t_j^α/Γ(1+α), avaliado em n."""
    if not 1 <= n <= kernel.N:
        raise IndexError(f"index {n} outside 1..{kernel.N}")
    seq = kernel.mesh.points ** kernel.alpha * float(rgamma(1.0 + kernel.alpha))
    return float(discrete_caputo(kernel, seq)[n - 1])


def concave_comparison_defect(
    scheme: SchemeKernel,
    v: Callable[[np.ndarray], np.ndarray],
    dv: Callable[[np.ndarray], np.ndarray],
    nu: float = 1.0,
) -> float:
    """min_n (𝒟v(t_n) - ν D^α v(t_n)); não negativo quando a comparação côncava vale."""
    t = scheme.mesh.points
    discrete = discrete_caputo(scheme, v(t))
    exact = np.asarray(dv(t[1:]), dtype=float)
    return float(np.min(discrete - nu * exact))


def decay_rate_fit(
    trajectory: Union[Trajectory, np.ndarray],
    mesh: Mesh,
    alpha: float,
    *,
    min_points: int = 3,
) -> float:
    """
    Inclinação de mínimos quadrados de log v_n contra log t_n na última
    década de t (t_n ≥ t_N/10); decaimento tipo Mittag-Leffler dá ≈ -α.
    """
    if not 0.0 < alpha <= 1.0:
        raise InvalidParameterError.from_payload(E.invalid_parameter(name="alpha", value=alpha, expected="0 < alpha <= 1"))
    v = _trajectory_values(trajectory)
    t = mesh.points
    sel = (t >= t[-1] / 10.0) & (t > 0.0) & (v > 0.0)
    count = int(np.count_nonzero(sel))
    if count < min_points:
        raise InsufficientDataError.from_payload(
            E.insufficient_data(what="ajuste da taxa de decaimento", required=min_points, available=count)
        )
    slope, _ = np.polyfit(np.log(t[sel]), np.log(v[sel]), 1)
    return float(slope)


def power_caputo(alpha: float, t: np.ndarray, gamma_power: float) -> np.ndarray:
    """D^α de t^p/Γ(1+p) em forma fechada: t^{p-α}/Γ(1+p-α)."""
    return np.asarray(t, dtype=float) ** (gamma_power - alpha) * rgamma(1.0 + gamma_power - alpha)


def ml_relaxation_caputo(alpha: float, t: np.ndarray) -> np.ndarray:
    """D^α [1 - E_α(-t^α)] = E_α(-t^α)."""
    p = MLParams(alpha)
    return np.array([ml(p, -(float(x) ** alpha)) for x in np.asarray(t, dtype=float)])

