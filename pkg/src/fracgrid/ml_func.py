"""
Funções de Mittag-Leffler E_{α,β}(z) para argumento real.

Este módulo é o oráculo de todos os envelopes de Grönwall e da solução
exata da FODE linear de Caputo.

Responsabilidades:
    - Avaliar E_{α,β}(z), 0 < α ≤ 1, β > 0, z real, com erro relativo ≤ 1e-10
      em z ∈ [-1e6, 50]
    - Solução exata de D^α v = λ v + c
    - Estimar as constantes c1, c2, σ = 2 c2 / c1 e μ1

Estratégia de avaliação (por ramo):
    - α = β = 1: exp
    - série de potências (float para |z|^{1/α} ≤ 10, mpmath com precisão
      adaptativa até |z|^{1/α} ≤ 40) para |z| ≤ Z_SWITCH
    - expansão assintótica para z < -Z_ASYMPTOTIC
    - representação integral em reta real (densidade espectral) no resto;
      para z > 0 soma-se o termo exponencial (1/α) z^{(1-β)/α} e^{z^{1/α}}
    - β ≥ 1 + α é reduzido por E_{α,β}(z) = (E_{α,β-α}(z) - 1/Γ(β-α)) / z

Invariantes:
    - Os três ramos concordam a 1e-9 relativo nas faixas de sobreposição
    - Nenhum ramo devolve valor silenciosamente impreciso: falhas viram
      MLConvergenceError

Limites explícitos:
    - Argumentos complexos, α > 1 e β ≤ 0 não são suportados
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Tuple

import mpmath
import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar
from scipy.special import rgamma

from fracgrid.core import errors as E
from fracgrid.core.exceptions import (
    GridTooCoarseError,
    InvalidParameterError,
    MLConvergenceError,
    MLDomainError,
)

Z_SWITCH = 5.0
Z_ASYMPTOTIC = 100.0
SERIES_TOL = 1e-18
SERIES_MAX_TERMS = 400
ASYMPTOTIC_MAX_TERMS = 60

_FLOAT_SERIES_MAG = 10.0
_MP_SERIES_MAG = 40.0
_INTEGRAL_CUTOFF = 60.0
_INTEGRAL_ACCEPT = 1e-7


@dataclass(frozen=True)
class MLParams:
    """Par (α, β) com 0 < α ≤ 1 e β > 0."""

    alpha: float
    beta: float = 1.0

    def __post_init__(self) -> None:
        a, b = self.alpha, self.beta
        if not (isinstance(a, (int, float)) and math.isfinite(a) and 0.0 < a <= 1.0):
            raise MLDomainError.from_payload(E.ml_domain_error(alpha=a, beta=b, reason="alpha fora de (0, 1]"))
        if not (isinstance(b, (int, float)) and math.isfinite(b) and b > 0.0):
            raise MLDomainError.from_payload(E.ml_domain_error(alpha=a, beta=b, reason="beta deve ser > 0"))
        object.__setattr__(self, "alpha", float(a))
        object.__setattr__(self, "beta", float(b))


# ---------------------------------------------------------------------------
# Ramos
# ---------------------------------------------------------------------------

def _series_magnitude(alpha: float, z: float) -> float:
    return abs(z) ** (1.0 / alpha) if z != 0.0 else 0.0


def _ml_series(alpha: float, beta: float, z: float, *, max_terms: int = SERIES_MAX_TERMS) -> float:
    """
    Série Σ z^k / Γ(αk + β) truncada quando |termo| < 1e-18·(|soma| + 1e-300).

    O cancelamento para z < 0 é da ordem de e^{|z|^{1/α}}; acima de
    _FLOAT_SERIES_MAG a soma é feita em mpmath com dígitos extras.
    """
    mag = _series_magnitude(alpha, z)
    if mag <= _FLOAT_SERIES_MAG:
        s = 0.0
        p = 1.0
        for k in range(max_terms):
            term = p * float(rgamma(alpha * k + beta))
            s += term
            if k > 0 and abs(term) < SERIES_TOL * (abs(s) + 1e-300):
                return s
            p *= z
        raise MLConvergenceError.from_payload(E.ml_convergence_error(alpha=alpha, beta=beta, z=z, branch="series"))

    dps = 25 + int(math.ceil(mag / math.log(10.0)))
    with mpmath.workdps(dps):
        zz = mpmath.mpf(z)
        a = mpmath.mpf(alpha)
        b = mpmath.mpf(beta)
        s = mpmath.mpf(0)
        p = mpmath.mpf(1)
        for k in range(max_terms):
            term = p * mpmath.rgamma(a * k + b)
            s += term
            if k > 0 and abs(term) < SERIES_TOL * (abs(s) + mpmath.mpf("1e-300")):
                return float(s)
            p *= zz
    raise MLConvergenceError.from_payload(E.ml_convergence_error(alpha=alpha, beta=beta, z=z, branch="series"))


def _ml_asymptotic(alpha: float, beta: float, z: float, *, max_terms: int = ASYMPTOTIC_MAX_TERMS) -> float:
    """
    E_{α,β}(z) ≈ -Σ_{k≥1} z^{-k} / Γ(β - αk) para z → -∞.

    Polos de Γ (β - αk inteiro não positivo) anulam o termo (rgamma = 0).
    A soma para no primeiro termo desprezível ou quando os termos voltam a
    crescer (truncamento ótimo).
    """
    if z >= 0.0:
        raise MLDomainError.from_payload(
            E.ml_domain_error(alpha=alpha, beta=beta, reason="expansão assintótica exige z < 0")
        )
    s = 0.0
    inv = 1.0 / z
    p = 1.0
    prev = math.inf
    for k in range(1, max_terms + 1):
        p *= inv
        term = -p * float(rgamma(beta - alpha * k))
        if term == 0.0:
            continue
        if abs(term) > prev:
            break
        s += term
        prev = abs(term)
        if abs(term) < 1e-17 * abs(s):
            break
    return s


def _ml_integral(alpha: float, beta: float, z: float) -> float:
    """
    Representação integral para 0 < α < 1, z ≠ 0:

        E_{α,β}(z) = ∫_0^∞ K(r) dr  [+ (1/α) z^{(1-β)/α} e^{z^{1/α}} se z > 0]

    com K(r) = (1/(πα)) r^{(1-β)/α} e^{-r^{1/α}}
               [r sin(π(1-β)) - z sin(π(1-β+α))] / (r² - 2rz cos(πα) + z²),
    válida para β < 1 + α.
    """
    if not 0.0 < alpha < 1.0 or z == 0.0:
        raise MLDomainError.from_payload(
            E.ml_domain_error(alpha=alpha, beta=beta, reason="ramo integral exige 0 < alpha < 1 e z != 0")
        )
    if beta >= 1.0 + alpha:
        return (_ml_integral(alpha, beta - alpha, z) - float(rgamma(beta - alpha))) / z

    p = (1.0 - beta) / alpha
    s1 = math.sin(math.pi * (1.0 - beta))
    s2 = math.sin(math.pi * (1.0 - beta + alpha))
    ca = math.cos(math.pi * alpha)
    inv_a = 1.0 / alpha

    def smooth(r: float) -> float:
        return math.exp(-(r ** inv_a)) * (r * s1 - z * s2) / (r * r - 2.0 * r * z * ca + z * z)

    upper = _INTEGRAL_CUTOFF ** alpha
    split = min(0.5, 0.5 * upper, 0.5 * abs(z))

    head = quad(smooth, 0.0, split, weight="alg", wvar=(p, 0.0), epsabs=0.0, epsrel=1e-13, limit=200, full_output=1)
    breaks = sorted({b for b in (z * ca, abs(z)) if split < b < upper})
    tail = quad(
        lambda r: (r ** p) * smooth(r),
        split,
        upper,
        points=breaks or None,
        epsabs=0.0,
        epsrel=1e-13,
        limit=500,
        full_output=1,
    )
    value = (head[0] + tail[0]) / (math.pi * alpha)
    abserr = (head[1] + tail[1]) / (math.pi * alpha)

    if z > 0.0:
        expo = z ** inv_a
        if expo > 700.0:
            return math.inf
        value += inv_a * z ** p * math.exp(expo)

    if not math.isfinite(value) or abserr > _INTEGRAL_ACCEPT * abs(value) + 1e-300:
        raise MLConvergenceError.from_payload(E.ml_convergence_error(alpha=alpha, beta=beta, z=z, branch="integral"))
    return value


# ---------------------------------------------------------------------------
# API pública
# ---------------------------------------------------------------------------

def ml(params: MLParams, z: float) -> float:
    """E_{α,β}(z) com o ramo escolhido por (α, z)."""
    alpha, beta = params.alpha, params.beta
    z = float(z)
    if not math.isfinite(z):
        raise MLDomainError.from_payload(E.ml_domain_error(alpha=alpha, beta=beta, reason="argumento não finito"))

    if alpha == 1.0 and beta == 1.0:
        try:
            return math.exp(z)
        except OverflowError:
            return math.inf
    if z == 0.0:
        return float(rgamma(beta))

    if alpha == 1.0:
        if z < -Z_ASYMPTOTIC:
            return _ml_asymptotic(alpha, beta, z)
        return _ml_series(alpha, beta, z)

    if abs(z) <= Z_SWITCH and _series_magnitude(alpha, z) <= _MP_SERIES_MAG:
        try:
            return _ml_series(alpha, beta, z)
        except MLConvergenceError:
            pass
    if z < -Z_ASYMPTOTIC:
        return _ml_asymptotic(alpha, beta, z)
    return _ml_integral(alpha, beta, z)


def ml_array(params: MLParams, zs: Iterable[float]) -> np.ndarray:
    zs = np.asarray(list(zs) if not isinstance(zs, np.ndarray) else zs, dtype=float)
    out = np.empty(zs.shape)
    for idx, z in np.ndenumerate(zs):
        out[idx] = ml(params, float(z))
    return out


def ml_branch(params: MLParams, z: float) -> str:
    """Nome do ramo que `ml` usa para (params, z)."""
    alpha = params.alpha
    if alpha == 1.0 and params.beta == 1.0:
        return "exp"
    if z == 0.0:
        return "constant"
    if alpha == 1.0:
        return "asymptotic" if z < -Z_ASYMPTOTIC else "series"
    if abs(z) <= Z_SWITCH and _series_magnitude(alpha, z) <= _MP_SERIES_MAG:
        try:
            _ml_series(alpha, params.beta, z)
            return "series"
        except MLConvergenceError:
            pass
    return "asymptotic" if z < -Z_ASYMPTOTIC else "integral"


def ml_derivative(alpha: float, z: float) -> float:
    """d/dz E_α(z) = α^{-1} E_{α,α}(z)."""
    return ml(MLParams(alpha, alpha), z) / alpha


def linear_fode_exact(alpha: float, lam_signed: float, c: float, v0: float, t: float) -> float:
    """
    Solução exata de D^α v = λ v + c, v(0) = v0.

    λ ≠ 0: (v0 + c/λ) E_α(λ t^α) - c/λ.
    λ = 0: v0 + c t^α / Γ(1 + α).
    """
    if t < 0.0:
        raise InvalidParameterError.from_payload(E.invalid_parameter(name="t", value=t, expected="t >= 0"))
    if lam_signed == 0.0:
        return v0 + c * t ** alpha * float(rgamma(1.0 + alpha))
    e = ml(MLParams(alpha), lam_signed * t ** alpha)
    return (v0 + c / lam_signed) * e - c / lam_signed


def w_growth(alpha: float, lam: float, t: float) -> float:
    """w(t) = d/dt E_α(λ t^α) = λ t^{α-1} E_{α,α}(λ t^α), t > 0."""
    if t <= 0.0:
        raise InvalidParameterError.from_payload(E.invalid_parameter(name="t", value=t, expected="t > 0"))
    return lam * t ** (alpha - 1.0) * ml(MLParams(alpha, alpha), lam * t ** alpha)


def locate_transition(alpha: float, lam: float, ts: Iterable[float]) -> float:
    """
    Ponto t_* onde w' troca de sinal (mínimo de w) para λ > 0.

    A grade `ts` precisa delimitar t_*: o mínimo discreto deve ser interior.
    O valor é refinado por busca limitada entre os vizinhos do mínimo.
    """
    ts = np.asarray(list(ts), dtype=float)
    if ts.size < 3:
        raise GridTooCoarseError.from_payload(E.grid_too_coarse(alpha=alpha, reason="menos de 3 pontos"))
    w = np.array([w_growth(alpha, lam, float(t)) for t in ts])
    i = int(np.argmin(w))
    if i == 0 or i == ts.size - 1:
        raise GridTooCoarseError.from_payload(
            E.grid_too_coarse(alpha=alpha, reason=f"mínimo de w na borda da grade (t={ts[i]:.6g})")
        )
    res = minimize_scalar(
        lambda t: w_growth(alpha, lam, t),
        bounds=(float(ts[i - 1]), float(ts[i + 1])),
        method="bounded",
        options={"xatol": 1e-10},
    )
    return float(res.x)


# ---------------------------------------------------------------------------
# Constantes universais
# ---------------------------------------------------------------------------

def _scaled_ml_alpha_alpha_neg(alphas: np.ndarray, zs: np.ndarray, *, terms: int = 160) -> np.ndarray:
    """α^{-1} E_{α,α}(-z) sobre a grade (α × z), série em float vetorizada (|z|^{1/α} ≤ 9)."""
    a = alphas[:, None, None]
    z = zs[None, :, None]
    k = np.arange(terms)[None, None, :]
    terms_ = ((-z) ** k) * rgamma(a * k + a)
    return terms_.sum(axis=-1) / alphas[:, None]


@lru_cache(maxsize=8)
def estimate_sigma_constants(
    alpha_step: float = 1e-3,
    z_step: float = 1e-3,
    eps: float = 1e-3,
) -> Tuple[float, float, float]:
    """
    (c1, c2, σ) com c1 = min e c2 = max de α^{-1} E_{α,α}(-z) para
    α ∈ [1/2, 1-ε], z ∈ [0, 3]; σ = 2 c2 / c1.
    """
    alphas = np.arange(0.5, 1.0 - eps + 0.5 * alpha_step, alpha_step)
    alphas = alphas[alphas <= 1.0 - eps + 1e-15]
    zs = np.linspace(0.0, 3.0, int(round(3.0 / z_step)) + 1)
    c1 = math.inf
    c2 = -math.inf
    for chunk in np.array_split(alphas, max(1, alphas.size // 10)):
        values = _scaled_ml_alpha_alpha_neg(chunk, zs)
        c1 = min(c1, float(values.min()))
        c2 = max(c2, float(values.max()))
    if not c1 > 0.0:
        raise MLConvergenceError.from_payload(
            E.ml_convergence_error(alpha=0.5, beta=0.5, z=3.0, branch="sigma-grid")
        )
    sigma = 2.0 * c2 / c1
    if not (math.isfinite(sigma) and sigma > 1.0):
        raise MLConvergenceError.from_payload(
            E.ml_convergence_error(alpha=0.5, beta=0.5, z=3.0, branch="sigma-grid")
        )
    return c1, c2, sigma


@dataclass(frozen=True)
class Mu1GridSpec:
    """Grade de estimação de μ1 (λ = 1, τ' ∈ (0, 1])."""

    alpha_min: float = 0.05
    alpha_max: float = 0.95
    n_alpha: int = 19
    n_s: int = 40
    n_tau: int = 4
    s_max: float = 25.0
    t_search: Tuple[float, float, int] = (1e-4, 20.0, 200)

    def alphas(self) -> np.ndarray:
        return np.linspace(self.alpha_min, self.alpha_max, self.n_alpha)

    def taus(self) -> np.ndarray:
        return np.linspace(1.0 / self.n_tau, 1.0, self.n_tau)


def _mu1_for_alpha(alpha: float, spec: Mu1GridSpec) -> float:
    lo, hi, n = spec.t_search
    t_star = locate_transition(alpha, 1.0, np.geomspace(lo, hi, n))
    if t_star >= spec.s_max:
        raise GridTooCoarseError.from_payload(
            E.grid_too_coarse(alpha=alpha, reason=f"t_*={t_star:.6g} além de s_max={spec.s_max}")
        )
    ss = np.linspace(t_star, spec.s_max, spec.n_s)
    best = math.inf
    for tau in spec.taus():
        ratios = np.array([w_growth(alpha, 1.0, s) / w_growth(alpha, 1.0, s + tau) for s in ss])
        i = int(np.argmin(ratios))
        lo_s = float(ss[max(i - 1, 0)])
        hi_s = float(ss[min(i + 1, ss.size - 1)])
        if hi_s > lo_s:
            res = minimize_scalar(
                lambda s: w_growth(alpha, 1.0, s) / w_growth(alpha, 1.0, s + tau),
                bounds=(lo_s, hi_s),
                method="bounded",
                options={"xatol": 1e-8},
            )
            best = min(best, float(ratios[i]), float(res.fun))
        else:
            best = min(best, float(ratios[i]))
    return best


def estimate_mu1(grid_spec: Optional[Mu1GridSpec] = None) -> float:
    """
    μ1 = inf w(s) / w(s + τ') sobre s ≥ t_*, λτ'^α ≤ 1 e α na grade.

    A razão depende apenas de λ^{1/α}s e λ^{1/α}τ', então basta λ = 1 com
    τ' ∈ (0, 1].
    """
    spec = grid_spec or Mu1GridSpec()
    mu1 = min(_mu1_for_alpha(float(a), spec) for a in spec.alphas())
    if not 0.0 < mu1 < 1.0:
        raise GridTooCoarseError.from_payload(
            E.grid_too_coarse(alpha=spec.alpha_min, reason=f"estimativa fora de (0, 1): {mu1}")
        )
    return mu1


def mu1_lower_bound() -> float:
    """Cota inferior fechada e^{-1} / (c'(1 + π/(√2 e²))), c' = 2 E_{1/2,1/2}(1)."""
    c_prime = 2.0 * ml(MLParams(0.5, 0.5), 1.0)
    return math.exp(-1.0) / (c_prime * (1.0 + math.pi / (math.sqrt(2.0) * math.e ** 2)))

