"""
Avanço temporal de FODEs de Caputo com qualquer SchemeKernel.

Responsabilidades:
    - Passo implícito (θ = 1) e θ-ponderado na forma diferencial
    - Passo Crank–Nicolson L1+ na forma dividida (kernel χ, θ = 1/2)
    - Solver na forma integral u_n = u_0 + Σ a_{n-j}^n f_j^θ
    - Soluções escalares ou vetoriais (arrays numpy)

Princípios fundamentais:
    - Cada passo resolve  lead·u_n - hist = f_n^θ(u_n), com lead = c_0^n
      (forma diferencial) ou 1/a_0^n (forma integral)
    - f afim (AffineRhs) é resolvida por divisão exata
    - f geral: Newton amortecido com jacobiano por diferença central e
      fallback de ponto fixo quando o passo de Newton não reduz o resíduo
    - Histórico recalculado a cada passo sobre a trajetória armazenada (O(N²))

Decisões arquiteturais:
    - θ pondera o valor novo: f^θ = θ f(t_n, u_n) + (1-θ) f(t_{n-1}, u_{n-1})
      (CONVEX_COMBO_OF_F) ou f(t^θ, u^θ) (F_AT_COMBO_POINT)
    - Solvabilidade: θM < lead·(1 - 1e-12); a menos de 1e-6 relativo vira warning

Limites explícitos:
    - Sem compressão de histórico (soma de exponenciais)
    - Sem controle adaptativo de passo
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, List, Optional, Tuple

import numpy as np

from fracgrid.core import errors as E
from fracgrid.core.exceptions import (
    FracgridException,
    InvalidParameterError,
    NewtonNonConvergenceError,
    SolvabilityError,
)
from fracgrid.kernel_algebra import TriKernel
from fracgrid.mesh import Mesh
from fracgrid.schemes import SchemeFamily, SchemeKernel

NEWTON_MAX_ITER = 100
NEWTON_TOL = 1e-12
SOLVABILITY_MARGIN = 1e-12
NEAR_VIOLATION = 1e-6


class ThetaRule(str, Enum):
    CONVEX_COMBO_OF_F = "convex_combo"
    F_AT_COMBO_POINT = "combo_point"


@dataclass(frozen=True)
class AffineRhs:
    """f(t, u) = beta·u + c."""

    beta: float
    c: float = 0.0

    def __call__(self, t: float, u):
        return self.beta * u + self.c


@dataclass(frozen=True)
class FodeProblem:
    """
    D^α u = f(t, u), u(0) = u0.

    `lipschitz` é a constante M usada na condição de solvabilidade;
    `jacobian(t, u)` opcional substitui o jacobiano numérico.
    """

    f: Callable[[float, Any], Any]
    u0: Any
    lipschitz: Optional[float] = None
    theta: float = 1.0
    variant: ThetaRule = ThetaRule.CONVEX_COMBO_OF_F
    jacobian: Optional[Callable[[float, Any], Any]] = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta <= 1.0:
            raise InvalidParameterError.from_payload(
                E.invalid_parameter(name="theta", value=self.theta, expected="0 <= theta <= 1")
            )
        if self.lipschitz is not None and self.lipschitz < 0:
            raise InvalidParameterError.from_payload(
                E.invalid_parameter(name="lipschitz", value=self.lipschitz, expected="M >= 0")
            )

    def effective_lipschitz(self) -> float:
        if self.lipschitz is not None:
            return float(self.lipschitz)
        if isinstance(self.f, AffineRhs):
            return max(float(self.f.beta), 0.0)
        return 0.0


@dataclass
class Trajectory:
    """Valores u_0..u_N sobre a malha, mais warnings não fatais do solve."""

    mesh: Mesh
    values: np.ndarray
    warnings: List[str] = field(default_factory=list)

    @property
    def t(self) -> np.ndarray:
        return self.mesh.points

    @property
    def u(self) -> np.ndarray:
        return self.values

    def __len__(self) -> int:
        return int(self.values.shape[0])


# ---------------------------------------------------------------------------
# Núcleo de um passo
# ---------------------------------------------------------------------------

def _as_vec(u) -> np.ndarray:
    return np.atleast_1d(np.asarray(u, dtype=float))


def _norm(x) -> float:
    return float(np.max(np.abs(x))) if np.size(x) else 0.0


@dataclass(frozen=True)
class _StepData:
    n: int
    lead: float
    hist: np.ndarray
    theta: float
    variant: ThetaRule
    t_prev: float
    t_n: float
    u_prev: np.ndarray
    f_prev: np.ndarray
    vector: bool = False


def _f_theta(problem: FodeProblem, d: _StepData, u: np.ndarray) -> np.ndarray:
    if d.variant == ThetaRule.CONVEX_COMBO_OF_F:
        return d.theta * _as_vec(problem.f(d.t_n, _unwrap(u, d.vector))) + (1.0 - d.theta) * d.f_prev
    t_c = (1.0 - d.theta) * d.t_prev + d.theta * d.t_n
    u_c = (1.0 - d.theta) * d.u_prev + d.theta * u
    return _as_vec(problem.f(t_c, _unwrap(u_c, d.vector)))


def _unwrap(u: np.ndarray, vector: bool):
    return u if vector else float(u[0])


def _jac_f_theta(problem: FodeProblem, d: _StepData, u: np.ndarray) -> np.ndarray:
    m = u.size
    if problem.jacobian is not None:
        if d.variant == ThetaRule.CONVEX_COMBO_OF_F:
            jac = problem.jacobian(d.t_n, _unwrap(u, d.vector))
        else:
            t_c = (1.0 - d.theta) * d.t_prev + d.theta * d.t_n
            jac = problem.jacobian(t_c, _unwrap((1.0 - d.theta) * d.u_prev + d.theta * u, d.vector))
        return d.theta * np.atleast_2d(np.asarray(jac, dtype=float)).reshape(m, m)
    J = np.empty((m, m))
    for i in range(m):
        h = 1e-7 * (1.0 + abs(u[i]))
        up = u.copy()
        um = u.copy()
        up[i] += h
        um[i] -= h
        J[:, i] = (_f_theta(problem, d, up) - _f_theta(problem, d, um)) / (2.0 * h)
    return J


def _newton_solve(problem: FodeProblem, d: _StepData) -> np.ndarray:
    """Resolve G(u) = lead·u - hist - f^θ(u) = 0 a partir de u_{n-1}."""

    def G(u: np.ndarray) -> np.ndarray:
        return d.lead * u - d.hist - _f_theta(problem, d, u)

    u = d.u_prev.copy()
    g = G(u)
    res = _norm(g)
    for _ in range(NEWTON_MAX_ITER):
        if res <= NEWTON_TOL * (1.0 + _norm(u)):
            return u
        J = d.lead * np.eye(u.size) - _jac_f_theta(problem, d, u)
        try:
            delta = np.linalg.solve(J, -g)
        except np.linalg.LinAlgError:
            delta = None

        accepted = False
        if delta is not None and np.all(np.isfinite(delta)):
            if _norm(delta) <= 1e-15 * (1.0 + _norm(u)):
                # passo abaixo do roundoff: G já está no piso de ponto flutuante
                return u + delta
            step = 1.0
            for _ in range(30):
                cand = u + step * delta
                g_c = G(cand)
                if np.all(np.isfinite(g_c)) and _norm(g_c) < _norm(g):
                    u, g = cand, g_c
                    accepted = True
                    break
                step *= 0.5
        if not accepted:
            # ponto fixo: u ← (hist + f^θ(u)) / lead
            u = (d.hist + _f_theta(problem, d, u)) / d.lead
            g = G(u)
        res = _norm(g)
    if res <= NEWTON_TOL * (1.0 + _norm(u)):
        return u
    raise NewtonNonConvergenceError.from_payload(
        E.newton_non_convergence(iterations=NEWTON_MAX_ITER, residual=float(res), step=d.n)
    )


def _solve_step(problem: FodeProblem, d: _StepData) -> np.ndarray:
    f = problem.f
    if isinstance(f, AffineRhs):
        rhs = d.hist + f.c + (1.0 - d.theta) * f.beta * d.u_prev
        return rhs / (d.lead - d.theta * f.beta)
    return _newton_solve(problem, d)


def _check_solvability(problem: FodeProblem, n: int, lead: float, theta: float, warnings: Optional[List[str]]) -> None:
    theta_m = theta * problem.effective_lipschitz()
    if not theta_m < lead * (1.0 - SOLVABILITY_MARGIN):
        raise SolvabilityError.from_payload(E.solvability_violation(step=n, lead=float(lead), theta_m=float(theta_m)))
    if warnings is not None and theta_m > lead * (1.0 - NEAR_VIOLATION):
        warnings.append(f"solvability near violation at n={n}: theta*M={theta_m:.17g} lead={lead:.17g}")


def _differential_step(
    Cmat: np.ndarray,
    mesh: Mesh,
    problem: FodeProblem,
    history: np.ndarray,
    theta: float,
    variant: ThetaRule,
    vector: bool,
    warnings: Optional[List[str]] = None,
) -> np.ndarray:
    n = history.shape[0]
    lead = float(Cmat[n - 1, n - 1])
    _check_solvability(problem, n, lead, theta, warnings)
    diffs = np.diff(history, axis=0)
    hist = lead * history[-1] - Cmat[n - 1, : n - 1] @ diffs if n > 1 else lead * history[-1]
    t_prev, t_n = float(mesh.points[n - 1]), float(mesh.points[n])
    u_prev = history[-1]
    f_prev = _as_vec(problem.f(t_prev, _unwrap(u_prev, vector))) if theta < 1.0 else np.zeros_like(u_prev)
    d = _StepData(
        n=n,
        lead=lead,
        hist=np.asarray(hist, dtype=float),
        theta=theta,
        variant=variant,
        t_prev=t_prev,
        t_n=t_n,
        u_prev=u_prev,
        f_prev=f_prev,
        vector=vector,
    )
    try:
        return _solve_step(problem, d)
    except FracgridException as exc:
        raise exc.with_details(step=n) from exc


def _history_array(history) -> Tuple[np.ndarray, bool]:
    h = np.asarray(history, dtype=float)
    if h.ndim == 1:
        return h[:, None], False
    return h, True


# ---------------------------------------------------------------------------
# API pública
# ---------------------------------------------------------------------------

def step_implicit(kernel: SchemeKernel, problem: FodeProblem, history) -> Any:
    """
    u_n a partir de u_0..u_{n-1} pela forma diferencial Σ_j c_{n-j}^n ∇u_j = f_n^θ,
    com θ = problem.theta.
    """
    h, vector = _history_array(history)
    u = _differential_step(kernel.C.matrix, kernel.mesh, problem, h, problem.theta, problem.variant, vector)
    return u if vector else float(u[0])


def step_cn(kernel: SchemeKernel, problem: FodeProblem, history) -> Any:
    """
    Passo Crank–Nicolson L1+: Σ_j χ_{n-j}^n ∇u_j = (f(t_n, u_n) + f(t_{n-1}, u_{n-1}))/2.

    Equivale a Σ_j c_{n-j}^n ∇u_j = χ_0^n (u_n - u_{n-1}) + f_n^{1/2} com o
    kernel modificado; a pré-condição é χ_0^n > M/2.
    """
    if kernel.chi is None:
        raise InvalidParameterError.from_payload(
            E.invalid_parameter(name="kernel", value=kernel.family.value, expected="kernel Crank–Nicolson L1+")
        )
    h, vector = _history_array(history)
    u = _differential_step(kernel.chi.matrix, kernel.mesh, problem, h, 0.5, ThetaRule.CONVEX_COMBO_OF_F, vector)
    return u if vector else float(u[0])


def _initial(problem: FodeProblem, N: int) -> Tuple[np.ndarray, bool]:
    u0 = np.asarray(problem.u0, dtype=float)
    vector = u0.ndim > 0
    values = np.zeros((N + 1, u0.size))
    values[0] = u0.reshape(-1)
    return values, vector


def _check_mesh(kernel_mesh: Mesh, mesh: Optional[Mesh]) -> Mesh:
    if mesh is not None and mesh != kernel_mesh:
        raise InvalidParameterError.from_payload(
            E.invalid_parameter(name="mesh", value="distinct", expected="a mesma malha do kernel")
        )
    return kernel_mesh


def solve(kernel: SchemeKernel, problem: FodeProblem, mesh: Optional[Mesh] = None) -> Trajectory:
    """
    Trajetória completa u_0..u_N. Kernels CN seguem o passo de `step_cn`; os
    demais usam a forma diferencial com θ = problem.theta.
    """
    mesh = _check_mesh(kernel.mesh, mesh)
    N = mesh.N
    values, vector = _initial(problem, N)
    warnings: List[str] = []
    cn = kernel.family == SchemeFamily.CRANK_NICOLSON_L1_PLUS and kernel.chi is not None
    Cmat = kernel.chi.matrix if cn else kernel.C.matrix
    theta = 0.5 if cn else problem.theta
    variant = ThetaRule.CONVEX_COMBO_OF_F if cn else problem.variant
    for n in range(1, N + 1):
        values[n] = _differential_step(Cmat, mesh, problem, values[:n], theta, variant, vector, warnings)
    return Trajectory(mesh=mesh, values=values if vector else values[:, 0].copy(), warnings=warnings)


def solve_integral_form(A: TriKernel, problem: FodeProblem, mesh: Mesh) -> Trajectory:
    """
    Forma integral u_n = u_0 + Σ_j a_{n-j}^n f_j^θ.

    Cada passo é lead·u_n - hist = f_n^θ(u_n) com lead = 1/a_0^n e
    hist = (u_0 + Σ_{j<n} a_{n-j}^n f_j^θ)/a_0^n.
    """
    if A.n_rows != mesh.N:
        raise InvalidParameterError.from_payload(
            E.invalid_parameter(name="A", value=A.n_rows, expected=f"kernel com N={mesh.N} linhas")
        )
    N = mesh.N
    values, vector = _initial(problem, N)
    f_hist = np.zeros((N, values.shape[1]))
    warnings: List[str] = []
    M = A.matrix
    theta, variant = problem.theta, problem.variant
    for n in range(1, N + 1):
        lead = 1.0 / float(M[n - 1, n - 1])
        _check_solvability(problem, n, lead, theta, warnings)
        memory = M[n - 1, : n - 1] @ f_hist[: n - 1] if n > 1 else 0.0
        hist = (values[0] + memory) * lead
        t_prev, t_n = float(mesh.points[n - 1]), float(mesh.points[n])
        u_prev = values[n - 1]
        f_prev = _as_vec(problem.f(t_prev, _unwrap(u_prev, vector))) if theta < 1.0 else np.zeros_like(u_prev)
        d = _StepData(
            n=n,
            lead=lead,
            hist=np.asarray(hist, dtype=float),
            theta=theta,
            variant=variant,
            t_prev=t_prev,
            t_n=t_n,
            u_prev=u_prev,
            f_prev=f_prev,
            vector=vector,
        )
        try:
            values[n] = _solve_step(problem, d)
        except FracgridException as exc:
            raise exc.with_details(step=n) from exc
        f_hist[n - 1] = _f_theta(problem, d, values[n])
    return Trajectory(mesh=mesh, values=values if vector else values[:, 0].copy(), warnings=warnings)
