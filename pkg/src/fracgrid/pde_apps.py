"""
Aplicações dissipativas em 1D: subdifusão e Allen–Cahn fracionário.

Responsabilidades:
    - Subdifusão D^α u = Δu + f em [0, X] com Dirichlet homogêneo,
      diferenças centradas e L1 no tempo (solve tridiagonal por passo)
    - Allen–Cahn D^α u = κ²u_xx + u - u³ no toro [0, 2π) com derivada
      espectral (FFT) e Newton-GMRES por passo
    - Estudos de convergência (tempo ou espaço), relatório de decaimento e
      defeitos das desigualdades de norma

Decisões arquiteturais:
    - Trajetórias guardam a grade completa (bordas de Dirichlet inclusas)
    - Norma ℓ² discreta: ‖v‖ = sqrt(h Σ v_i²)
    - O precondicionador de Newton é diagonal em Fourier, com o termo de
      reação linearizado substituído pela sua média espacial
    - Níveis de refinamento independentes rodam em ThreadPoolExecutor
      limitado por `thread_limit()`

Limites explícitos:
    - Apenas 1D
    - O envelope de decaimento só é verificado quando λτ_n^α ≤ 1
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy.linalg import eigvalsh_tridiagonal, solve_banded
from scipy.sparse.linalg import LinearOperator, gmres

from fracgrid.core import errors as E
from fracgrid.core.config import thread_limit
from fracgrid.core.exceptions import (
    HypothesisViolationError,
    InvalidParameterError,
    NewtonNonConvergenceError,
)
from fracgrid.gronwall import (
    EnvelopeVariant,
    GronwallEnvelope,
    decay_rate_fit,
    verify_trajectory,
)
from fracgrid.mesh import Mesh, graded_mesh, max_step_restriction
from fracgrid.ml_func import MLParams, ml_array
from fracgrid.schemes import SchemeKernel, discrete_caputo, l1_kernel
from fracgrid.solver import AffineRhs, FodeProblem, solve

NEWTON_MAX_ITER = 50
NEWTON_TOL = 1e-13
GMRES_RTOL = 1e-12
NORM_FLOOR = 1e-8
ODD_TOL = 1e-12


# ---------------------------------------------------------------------------
# Perfis pré-definidos (x já normalizado para [0, 1] ou [0, 2π))
# ---------------------------------------------------------------------------

def _bump(s: np.ndarray) -> np.ndarray:
    return 16.0 * s**2 * (1.0 - s) ** 2


SUBDIFFUSION_PROFILES: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "zero": np.zeros_like,
    "sine": lambda s: np.sin(np.pi * s),
    "bump": _bump,
}

ALLEN_CAHN_PROFILES: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "zero": np.zeros_like,
    "sine": np.sin,
    "sine3": lambda x: np.sin(3.0 * x),
}


def _check_profile(name: str, table: Dict[str, Callable], key: str) -> None:
    if name not in table:
        raise InvalidParameterError.from_payload(
            E.invalid_parameter(name=key, value=name, expected=f"um de {sorted(table)}")
        )


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise InvalidParameterError.from_payload(E.invalid_parameter(name="alpha", value=alpha, expected="0 < alpha < 1"))


@dataclass(frozen=True)
class PdeTrajectory:
    """Valores (N+1, pontos da grade) sobre `x`, com norma ℓ² de passo h."""

    mesh: Mesh
    x: np.ndarray
    values: np.ndarray
    h: float
    warnings: List[str] = field(default_factory=list)

    @property
    def t(self) -> np.ndarray:
        return self.mesh.points

    def norms(self, shift: Optional[np.ndarray] = None) -> np.ndarray:
        v = self.values if shift is None else self.values - shift[None, :]
        return np.sqrt(self.h * np.sum(v * v, axis=1))


# ---------------------------------------------------------------------------
# Subdifusão
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubdiffusionConfig:
    """
    Problema de subdifusão em [0, X] com malha espacial uniforme de passo h.

    `rhs` e `u0` são nomes de perfis (zero, sine, bump); `amplitude` escala
    apenas u0. h precisa dividir X.
    """

    alpha: float
    mesh: Mesh
    X: float = 1.0
    h: float = 0.05
    rhs: str = "zero"
    u0: str = "sine"
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        _check_alpha(self.alpha)
        if not (self.X > 0.0 and self.h > 0.0):
            raise InvalidParameterError.from_payload(E.invalid_parameter(name="h", value=self.h, expected="X > 0 e h > 0"))
        K = self.X / self.h
        if abs(K - round(K)) > 1e-9 * K or round(K) < 2:
            raise InvalidParameterError.from_payload(
                E.invalid_parameter(name="h", value=self.h, expected=f"h divide X = {self.X} em pelo menos 2 intervalos")
            )
        _check_profile(self.rhs, SUBDIFFUSION_PROFILES, "rhs")
        _check_profile(self.u0, SUBDIFFUSION_PROFILES, "u0")

    @property
    def intervals(self) -> int:
        return int(round(self.X / self.h))

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.X, self.intervals + 1)

    def source(self) -> np.ndarray:
        f = SUBDIFFUSION_PROFILES[self.rhs](self.grid() / self.X)
        f[[0, -1]] = 0.0
        return f

    def initial(self) -> np.ndarray:
        u = self.amplitude * SUBDIFFUSION_PROFILES[self.u0](self.grid() / self.X)
        u[[0, -1]] = 0.0
        return u

    @property
    def kappa(self) -> float:
        """Menor autovalor de -Δ_h: 4/h² sin²(πh/(2X))."""
        return 4.0 / self.h**2 * np.sin(np.pi * self.h / (2.0 * self.X)) ** 2

    def with_mesh(self, mesh: Mesh) -> "SubdiffusionConfig":
        return SubdiffusionConfig(self.alpha, mesh, self.X, self.h, self.rhs, self.u0, self.amplitude)

    def with_h(self, h: float) -> "SubdiffusionConfig":
        return SubdiffusionConfig(self.alpha, self.mesh, self.X, h, self.rhs, self.u0, self.amplitude)


def _laplacian_bands(m: int, h: float, shift: float) -> np.ndarray:
    """Bandas de shift·I - Δ_h nos m pontos interiores, formato solve_banded((1, 1))."""
    ab = np.empty((3, m))
    ab[0, :] = -1.0 / h**2
    ab[1, :] = shift + 2.0 / h**2
    ab[2, :] = -1.0 / h**2
    ab[0, 0] = 0.0
    ab[2, -1] = 0.0
    return ab


def solve_subdiffusion(cfg: SubdiffusionConfig, scheme: Optional[SchemeKernel] = None) -> PdeTrajectory:
    """
    𝒟_τ^α u_n = Δ_h u_n + f.

    Cada passo resolve (c_0^n I - Δ_h) u_n = c_0^n u_{n-1} - Σ_{j<n} c_{n-j}^n ∇u_j + f.
    """
    kernel = scheme if scheme is not None else l1_kernel(cfg.alpha, cfg.mesh)
    C = kernel.C.matrix
    N = cfg.mesh.N
    x = cfg.grid()
    m = x.size - 2
    f = cfg.source()[1:-1]
    values = np.zeros((N + 1, x.size))
    values[0] = cfg.initial()
    diffs = np.zeros((N, m))
    for n in range(1, N + 1):
        lead = C[n - 1, n - 1]
        rhs = lead * values[n - 1, 1:-1] - C[n - 1, : n - 1] @ diffs[: n - 1] + f
        values[n, 1:-1] = solve_banded((1, 1), _laplacian_bands(m, cfg.h, lead), rhs)
        diffs[n - 1] = values[n, 1:-1] - values[n - 1, 1:-1]
    return PdeTrajectory(mesh=cfg.mesh, x=x, values=values, h=cfg.h)


def steady_state(cfg: SubdiffusionConfig) -> np.ndarray:
    """u_∞^h = -Δ_h⁻¹ f na grade completa."""
    x = cfg.grid()
    out = np.zeros_like(x)
    out[1:-1] = solve_banded((1, 1), _laplacian_bands(x.size - 2, cfg.h, 0.0), cfg.source()[1:-1])
    return out


@dataclass(frozen=True)
class CoercivityCheck:
    kappa: float
    min_eigenvalue: float

    @property
    def relative_gap(self) -> float:
        return abs(self.kappa - self.min_eigenvalue) / self.min_eigenvalue


def discrete_coercivity(cfg: SubdiffusionConfig) -> CoercivityCheck:
    """κ da fórmula fechada contra o menor autovalor de -Δ_h."""
    m = cfg.intervals - 1
    d = np.full(m, 2.0 / cfg.h**2)
    e = np.full(m - 1, -1.0 / cfg.h**2)
    lo = eigvalsh_tridiagonal(d, e, select="i", select_range=(0, 0))
    return CoercivityCheck(kappa=float(cfg.kappa), min_eigenvalue=float(lo[0]))


# ---------------------------------------------------------------------------
# Allen–Cahn
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AllenCahnConfig:
    """Allen–Cahn no toro [0, 2π) com `modes` pontos (par); u0 ímpar e de média zero."""

    alpha: float
    mesh: Mesh
    kappa2: float = 2.0
    modes: int = 32
    u0: str = "sine"
    amplitude: float = 0.1

    def __post_init__(self) -> None:
        _check_alpha(self.alpha)
        if not self.kappa2 > 1.0:
            raise InvalidParameterError.from_payload(
                E.invalid_parameter(name="kappa2", value=self.kappa2, expected="kappa2 > 1")
            )
        if self.modes < 4 or self.modes % 2:
            raise InvalidParameterError.from_payload(
                E.invalid_parameter(name="modes", value=self.modes, expected="inteiro par >= 4")
            )
        _check_profile(self.u0, ALLEN_CAHN_PROFILES, "u0")
        u = self.initial()
        mirror = -np.roll(u[::-1], 1)
        if np.max(np.abs(u - mirror)) > ODD_TOL or abs(float(np.mean(u))) > ODD_TOL:
            raise InvalidParameterError.from_payload(
                E.invalid_parameter(name="u0", value=self.u0, expected="perfil ímpar de média zero")
            )

    @property
    def h(self) -> float:
        return 2.0 * np.pi / self.modes

    def grid(self) -> np.ndarray:
        return self.h * np.arange(self.modes)

    def initial(self) -> np.ndarray:
        return self.amplitude * ALLEN_CAHN_PROFILES[self.u0](self.grid())

    def wavenumbers(self) -> np.ndarray:
        return np.arange(self.modes // 2 + 1, dtype=float)


def _spectral_d2(u: np.ndarray, k2: np.ndarray) -> np.ndarray:
    return np.fft.irfft(-k2 * np.fft.rfft(u), n=u.size)


def zero_mode(u: np.ndarray) -> float:
    """|û_0|/M: média da amostra."""
    return float(abs(np.fft.rfft(u)[0]) / u.size)


def _allen_cahn_step(lead: float, hist: np.ndarray, guess: np.ndarray, cfg: AllenCahnConfig, k2: np.ndarray, n: int) -> np.ndarray:
    """Newton para lead·u - κ²D²u - (u - u³) = hist, GMRES precondicionado no passo linear."""
    M = guess.size
    kap = cfg.kappa2
    u = guess.copy()
    scale = max(lead, 1.0)
    res = np.inf
    for it in range(1, NEWTON_MAX_ITER + 1):
        G = lead * u - kap * _spectral_d2(u, k2) - (u - u**3) - hist
        res = float(np.max(np.abs(G))) / scale
        if res <= NEWTON_TOL:
            return u
        react = 1.0 - 3.0 * u**2
        J = LinearOperator((M, M), matvec=lambda v, r=react: lead * v - kap * _spectral_d2(v, k2) - r * v, dtype=float)
        symbol = lead + kap * k2 - float(np.mean(react))
        symbol = np.where(symbol > 0.5 * lead, symbol, lead + kap * k2)
        P = LinearOperator((M, M), matvec=lambda v, s=symbol: np.fft.irfft(np.fft.rfft(v) / s, n=M), dtype=float)
        delta, info = gmres(J, -G, rtol=GMRES_RTOL, atol=0.0, M=P)
        if info < 0:
            break
        u = u + delta
    raise NewtonNonConvergenceError.from_payload(
        E.newton_non_convergence(iterations=NEWTON_MAX_ITER, residual=res, step=n)
    )


def solve_allen_cahn(cfg: AllenCahnConfig, scheme: Optional[SchemeKernel] = None) -> PdeTrajectory:
    """𝒟_τ^α u_n = κ²D²u_n + (u_n - u_n³) com Newton-GMRES por passo."""
    kernel = scheme if scheme is not None else l1_kernel(cfg.alpha, cfg.mesh)
    C = kernel.C.matrix
    N = cfg.mesh.N
    k2 = cfg.wavenumbers() ** 2
    values = np.zeros((N + 1, cfg.modes))
    values[0] = cfg.initial()
    diffs = np.zeros((N, cfg.modes))
    for n in range(1, N + 1):
        lead = C[n - 1, n - 1]
        hist = lead * values[n - 1] - C[n - 1, : n - 1] @ diffs[: n - 1]
        values[n] = _allen_cahn_step(lead, hist, values[n - 1], cfg, k2, n)
        diffs[n - 1] = values[n] - values[n - 1]
    return PdeTrajectory(mesh=cfg.mesh, x=cfg.grid(), values=values, h=cfg.h)


# ---------------------------------------------------------------------------
# Desigualdades de norma
# ---------------------------------------------------------------------------

def dissipation_defect(traj: PdeTrajectory, cfg: AllenCahnConfig) -> float:
    """max_n (𝒟‖u_n‖ + (κ²-1)‖u_n‖); ≤ 0 quando a dissipação discreta vale."""
    kernel = l1_kernel(cfg.alpha, traj.mesh)
    norms = traj.norms()
    return float(np.max(discrete_caputo(kernel, norms) + (cfg.kappa2 - 1.0) * norms[1:]))


def norm_inequality_defect(traj: PdeTrajectory, cfg: SubdiffusionConfig) -> float:
    """
    max_n 𝒟‖e_n‖ - ⟨e_n/‖e_n‖, 𝒟e_n⟩ com e_n = u_n - u_∞^h, nos passos com
    ‖e_n‖ > 1e-8. Retorna -inf se nenhum passo qualifica.
    """
    kernel = l1_kernel(cfg.alpha, traj.mesh)
    e = traj.values - steady_state(cfg)[None, :]
    norms = np.sqrt(traj.h * np.sum(e * e, axis=1))
    d_norm = discrete_caputo(kernel, norms)
    d_vec = discrete_caputo(kernel, e)
    sel = norms[1:] > NORM_FLOOR
    if not np.any(sel):
        return float("-inf")
    pairing = traj.h * np.sum(e[1:][sel] * d_vec[sel], axis=1) / norms[1:][sel]
    return float(np.max(d_norm[sel] - pairing))


# ---------------------------------------------------------------------------
# Estudos de convergência
# ---------------------------------------------------------------------------

def _mode_error(traj: PdeTrajectory, amplitudes: np.ndarray, mode: np.ndarray) -> float:
    exact = amplitudes[:, None] * mode[None, :]
    diff = traj.values - exact
    return float(np.max(np.sqrt(traj.h * np.sum(diff * diff, axis=1))))


def _time_level(cfg: SubdiffusionConfig, N: int, r: float) -> Dict[str, float]:
    mesh = graded_mesh(cfg.mesh.T, N, r)
    run = cfg.with_mesh(mesh)
    traj = solve_subdiffusion(run)
    mode = np.sin(np.pi * run.grid() / run.X)
    amp = cfg.amplitude * ml_array(MLParams(cfg.alpha), -run.kappa * mesh.points**cfg.alpha)
    return {"N": N, "h": run.h, "tau_max": float(np.max(mesh.steps)), "error": _mode_error(traj, amp, mode)}


def _space_level(cfg: SubdiffusionConfig, K: int) -> Dict[str, float]:
    run = cfg.with_h(cfg.X / K)
    traj = solve_subdiffusion(run)
    mode = np.sin(np.pi * run.grid() / run.X)
    lam = (np.pi / run.X) ** 2
    scalar = solve(l1_kernel(cfg.alpha, cfg.mesh), FodeProblem(f=AffineRhs(beta=-lam), u0=cfg.amplitude))
    return {
        "N": cfg.mesh.N,
        "h": run.h,
        "tau_max": float(np.max(cfg.mesh.steps)),
        "error": _mode_error(traj, np.asarray(scalar.values), mode),
    }


def truncation_and_error_study(
    cfg: SubdiffusionConfig,
    levels: Sequence[int],
    *,
    refine: str = "time",
    grading_r: Optional[float] = None,
) -> pd.DataFrame:
    """
    Tabela (level, N, h, tau_max, error, order) de sup_n ‖u_n - u(t_n)‖.

    refine="time": `levels` são valores de N numa malha graduada (r = 1
    uniforme), comparados com o modo exato E_α(-κ_h t^α) sin(πx/X).
    refine="space": `levels` são números de intervalos espaciais; a
    referência é o modo contínuo (λ = (π/X)²) avançado pelo mesmo esquema
    temporal, o que isola o erro espacial.
    """
    if cfg.u0 != "sine" or cfg.rhs != "zero":
        raise InvalidParameterError.from_payload(
            E.invalid_parameter(name="u0/rhs", value=f"{cfg.u0}/{cfg.rhs}", expected="u0=sine e rhs=zero (modo exato)")
        )
    if refine not in ("time", "space"):
        raise InvalidParameterError.from_payload(
            E.invalid_parameter(name="refine", value=refine, expected="'time' ou 'space'")
        )
    levels = list(levels)
    if len(levels) < 1 or any(int(v) < 2 for v in levels):
        raise InvalidParameterError.from_payload(
            E.invalid_parameter(name="levels", value=levels, expected="inteiros >= 2")
        )
    r = 1.0 if grading_r is None else float(grading_r)
    if refine == "time":
        task = lambda N: _time_level(cfg, int(N), r)
    else:
        task = lambda K: _space_level(cfg, int(K))

    with ThreadPoolExecutor(max_workers=min(thread_limit(), len(levels))) as pool:
        rows = list(pool.map(task, levels))

    table = pd.DataFrame(rows, columns=["N", "h", "tau_max", "error"])
    table.insert(0, "level", np.arange(len(rows)))
    size = table["N"].astype(float) if refine == "time" else 1.0 / table["h"]
    err = table["error"].to_numpy()
    order = np.full(len(rows), np.nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        order[1:] = np.log(err[:-1] / err[1:]) / np.log(size.to_numpy()[1:] / size.to_numpy()[:-1])
    table["order"] = order
    return table


# ---------------------------------------------------------------------------
# Decaimento
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayReport:
    """Inclinação ajustada na cauda e, quando aplicável, verificação do envelope σ."""

    slope: float
    expected_slope: float
    condition_value: float
    condition_met: bool
    envelope_checked: bool
    envelope_passed: Optional[bool]
    max_violation: Optional[float]
    notes: List[str] = field(default_factory=list)
    envelope: Optional[np.ndarray] = None


def decay_report(
    traj: PdeTrajectory,
    cfg: Union[SubdiffusionConfig, AllenCahnConfig],
    *,
    sigma: Optional[float] = None,
) -> DecayReport:
    """
    Subdifusão: e_n = ‖u_n - u_∞^h‖ com λ = κ; Allen–Cahn: e_n = ‖u_n‖ com
    λ = κ² - 1. O envelope e_0·E_α(-λt^α/σ) é checado apenas se
    max λτ_n^α ≤ 1.
    """
    if isinstance(cfg, SubdiffusionConfig):
        errs = traj.norms(shift=steady_state(cfg))
        lam = float(cfg.kappa)
    else:
        errs = traj.norms()
        lam = cfg.kappa2 - 1.0
    slope = decay_rate_fit(errs, traj.mesh, cfg.alpha)
    cond = max_step_restriction(traj.mesh, lam, cfg.alpha)
    notes: List[str] = []
    checked, passed, viol, bound = False, None, None, None
    if cond <= 1.0 and errs[0] > 0.0:
        try:
            env = GronwallEnvelope(
                EnvelopeVariant.DECAY_UPPER_STEP_RESTRICTED,
                alpha=cfg.alpha, lam=lam, c=0.0, v0=float(errs[0]), mesh=traj.mesh, sigma=sigma,
            )
        except HypothesisViolationError as exc:
            notes.append(exc.message)
        else:
            report = verify_trajectory(env, errs, "upper")
            checked, passed, viol = True, report.passed, report.max_violation
            bound = env.values()
    else:
        notes.append(f"condição de passo max λτ_n^α = {cond:.6g} > 1; envelope não verificado")
    return DecayReport(
        slope=slope,
        expected_slope=-cfg.alpha,
        condition_value=float(cond),
        condition_met=bool(cond <= 1.0),
        envelope_checked=checked,
        envelope_passed=passed,
        max_violation=viol,
        notes=notes,
        envelope=bound,
    )
