"""
Esquemas de discretização da derivada de Caputo sobre malhas arbitrárias.

Responsabilidades:
    - Kernels L1, forma integral e Crank–Nicolson L1+ em forma fechada
    - Certificação de positividade completa (teste de sinais de B e teste
      de resolventes, que precisam concordar)
    - Estimativa das constantes ν e ρ1 (razão com a média de g_{1-α})
    - Diagnósticos de monotonicidade dupla, log-convexidade e α crítico

Princípios fundamentais:
    - Pesos vêm de antiderivadas fechadas de potências; quadratura só
      aparece nos testes como oráculo independente
    - Diferenças a^p - b^p são avaliadas por expm1/log1p para não perder
      dígitos em células distantes da diagonal

Convenções:
    - C é o kernel da forma diferencial: 𝒟u_n = Σ_j c_{n-j}^n ∇u_j
    - A é o kernel da forma integral: u_n = u_0 + Σ_j a_{n-j}^n f_j
    - B = C ̄* L^(-1): b_0^n = c_0^n, b_k^n = c_k^n - c_{k-1}^n; A = B^(-1)

Limites explícitos:
    - Não implementa Grünwald–Letnikov nem métodos de quadratura de convolução
    - Não implementa esquemas de ordem alta
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gamma

from fracgrid.core import errors as E
from fracgrid.core.exceptions import InvalidParameterError, KernelSizeMismatchError
from fracgrid.kernel_algebra import (
    TriKernel,
    heaviside_inverse,
    invert,
    pseudo_convolve,
    resolvent,
    right_complementary,
)
from fracgrid.mesh import Mesh

DEFAULT_LAMBDAS: Tuple[float, ...] = (0.01, 1.0, 100.0)
SIGN_TOL = 1e-13


class SchemeFamily(str, Enum):
    L1 = "l1"
    INTEGRAL_FORM = "integral"
    CRANK_NICOLSON_L1_PLUS = "cn"
    EXTERNAL = "external"


@dataclass(frozen=True)
class SchemeKernel:
    """
    Kernel da forma diferencial C sobre uma malha, com metadados do esquema.

    Campos:
        - alpha: ordem em (0, 1)
        - mesh: malha (snapshot imutável)
        - family: família do esquema
        - C: pesos c_{n-j}^n (unidade tempo^{-α})
        - theta: peso da regra θ para f (1 implícito, 1/2 Crank–Nicolson)
        - chi: kernel χ do Crank–Nicolson L1+ (None nas outras famílias)
        - integral: kernel A da forma integral, quando conhecido
        - chi_monotone: χ_0^n > χ_1^n para todo n ≥ 2 (apenas CN)
    """

    alpha: float
    mesh: Mesh
    family: SchemeFamily
    C: TriKernel
    theta: float = 1.0
    chi: Optional[TriKernel] = None
    integral: Optional[TriKernel] = None
    chi_monotone: Optional[bool] = None

    def __post_init__(self) -> None:
        if self.C.n_rows != self.mesh.N:
            raise KernelSizeMismatchError.from_payload(
                E.kernel_size_mismatch(operation="SchemeKernel", left=self.C.n_rows, right=self.mesh.N)
            )
        if not 0.0 <= self.theta <= 1.0:
            raise InvalidParameterError.from_payload(
                E.invalid_parameter(name="theta", value=self.theta, expected="0 <= theta <= 1")
            )

    @property
    def N(self) -> int:
        return self.mesh.N

    def lead(self, n: int) -> float:
        """c_0^n."""
        return self.C.entry(n, 0)

    def scaled(self, s: float) -> "SchemeKernel":
        return replace(
            self,
            family=SchemeFamily.EXTERNAL,
            C=self.C.scaled(s),
            chi=None if self.chi is None else self.chi.scaled(s),
            integral=None if self.integral is None else self.integral.scaled(1.0 / s),
        )


def _check_alpha(alpha: float) -> None:
    if not (isinstance(alpha, (int, float)) and 0.0 < alpha < 1.0):
        raise InvalidParameterError.from_payload(
            E.invalid_parameter(name="alpha", value=alpha, expected="0 < alpha < 1")
        )


def _pow_diff(a: np.ndarray, b: np.ndarray, p: float) -> np.ndarray:
    """a^p - b^p para a > b ≥ 0, sem cancelamento quando b ≈ a."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.zeros(np.broadcast(a, b).shape)
    pos = (a > 0.0) & (b > 0.0)
    zero_b = (a > 0.0) & (b <= 0.0)
    aa = np.where(pos, a, 1.0)
    bb = np.where(pos, b, 1.0)
    out = np.where(pos, -(aa ** p) * np.expm1(p * np.log1p(-(aa - bb) / aa)), out)
    out = np.where(zero_b, np.where(zero_b, a, 1.0) ** p, out)
    return out


def _pow_drop(a: np.ndarray, h: np.ndarray, p: float) -> np.ndarray:
    """a^p - (a - h)^p para 0 < h ≤ a, usando o passo h exato em vez de a - b."""
    a = np.asarray(a, dtype=float)
    h = np.asarray(h, dtype=float)
    full = h >= a
    ratio = np.where(full, 0.0, h / np.where(a > 0.0, a, 1.0))
    out = -(a ** p) * np.expm1(p * np.log1p(-ratio))
    return np.where(full, a ** p, out)


def _cell_distances(mesh: Mesh) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    (d1, h, mask) com d1[n-1, j-1] = t_n - t_{j-1} e h[n-1, j-1] = τ_j, j ≤ n.

    d1 é a soma dos passos τ_j..τ_n, sem subtrair pontos da malha: células
    minúsculas longe de t_n mantêm precisão relativa.
    """
    tau = mesh.steps
    N = mesh.N
    mask = np.tri(N, dtype=bool)
    d1 = np.ones((N, N))
    for n in range(1, N + 1):
        d1[n - 1, :n] = np.cumsum(tau[:n][::-1])[::-1]
    h = np.where(mask, np.broadcast_to(tau[None, :], (N, N)), 0.0)
    return d1, h, mask


def _l1_matrix(alpha: float, mesh: Mesh) -> np.ndarray:
    d1, h, mask = _cell_distances(mesh)
    tau = mesh.steps[None, :]
    c = _pow_drop(d1, h, 1.0 - alpha) / (tau * gamma(2.0 - alpha))
    return np.where(mask, c, 0.0)


def l1_kernel(alpha: float, mesh: Mesh) -> SchemeKernel:
    """
    c_{n-j}^n = [(t_n - t_{j-1})^{1-α} - (t_n - t_j)^{1-α}] / (τ_j Γ(2-α)),
    a média exata de g_{1-α}(t_n - ·) na célula j.
    """
    _check_alpha(alpha)
    return SchemeKernel(alpha=float(alpha), mesh=mesh, family=SchemeFamily.L1, C=TriKernel(_l1_matrix(alpha, mesh)))


def integral_form_kernel(alpha: float, mesh: Mesh) -> TriKernel:
    """a_{n-j}^n = [(t_n - t_{j-1})^α - (t_n - t_j)^α] / Γ(1+α) = ∫ g_α(t_n - s) na célula j."""
    _check_alpha(alpha)
    d1, h, mask = _cell_distances(mesh)
    a = _pow_drop(d1, h, alpha) / gamma(1.0 + alpha)
    return TriKernel(np.where(mask, a, 0.0))


def integral_scheme(alpha: float, mesh: Mesh) -> SchemeKernel:
    """Esquema integral: A da forma integral e C = right_complementary(A)."""
    A = integral_form_kernel(alpha, mesh)
    return SchemeKernel(
        alpha=float(alpha),
        mesh=mesh,
        family=SchemeFamily.INTEGRAL_FORM,
        C=right_complementary(A),
        integral=A,
    )


def external_scheme(alpha: float, mesh: Mesh, kernel: TriKernel, *, form: str = "integral") -> SchemeKernel:
    """Envolve um kernel fornecido pelo usuário (forma integral A ou diferencial C)."""
    _check_alpha(alpha)
    if form == "integral":
        return SchemeKernel(
            alpha=float(alpha), mesh=mesh, family=SchemeFamily.EXTERNAL, C=right_complementary(kernel), integral=kernel
        )
    if form == "differential":
        return SchemeKernel(alpha=float(alpha), mesh=mesh, family=SchemeFamily.EXTERNAL, C=kernel)
    raise InvalidParameterError.from_payload(
        E.invalid_parameter(name="kernel_form", value=form, expected="'integral' ou 'differential'")
    )


def integral_kernel_of(scheme: SchemeKernel) -> TriKernel:
    """A = invert(C ̄* L^(-1))."""
    if scheme.integral is not None:
        return scheme.integral
    return invert(pseudo_convolve(scheme.C, heaviside_inverse(scheme.N)))


# ---------------------------------------------------------------------------
# Crank–Nicolson L1+
# ---------------------------------------------------------------------------

def _chi_matrix(alpha: float, mesh: Mesh) -> np.ndarray:
    """
    χ_{n-j}^n = (1/(τ_n τ_j)) ∫_{t_{n-1}}^{t_n} ∫_{t_{j-1}}^{min(t, t_j)} g_{1-α}(t - s) ds dt.

    Com G2(x) = x^{2-α}/Γ(3-α): para j < n é a diferença dupla de G2 nos
    cantos da célula; a célula j = n é triangular e vale G2(τ_n).
    """
    t = mesh.points
    tau = mesh.steps
    N = mesh.N
    p = 2.0 - alpha
    g3 = gamma(3.0 - alpha)
    chi = np.zeros((N, N))
    for n in range(1, N + 1):
        tn, tn1 = t[n], t[n - 1]
        chi[n - 1, n - 1] = tau[n - 1] ** p / g3 / (tau[n - 1] ** 2)
        if n == 1:
            continue
        tj1 = t[: n - 1]
        tj = t[1:n]
        upper = _pow_diff(tn - tj1, tn1 - tj1, p)
        lower = _pow_diff(np.full(n - 1, tn) - tj, np.maximum(tn1 - tj, 0.0), p)
        chi[n - 1, : n - 1] = (upper - lower) / g3 / (tau[n - 1] * tau[: n - 1])
    return chi


def cn_l1plus_kernel(alpha: float, mesh: Mesh) -> SchemeKernel:
    """
    Kernel χ do Crank–Nicolson L1+ e o kernel modificado C com c_0^n = 2χ_0^n,
    c_k^n = χ_k^n (θ = 1/2).
    """
    _check_alpha(alpha)
    chi = _chi_matrix(alpha, mesh)
    C = chi.copy()
    np.fill_diagonal(C, 2.0 * np.diag(chi))
    chi_k = TriKernel(chi)
    return SchemeKernel(
        alpha=float(alpha),
        mesh=mesh,
        family=SchemeFamily.CRANK_NICOLSON_L1_PLUS,
        C=TriKernel(C),
        theta=0.5,
        chi=chi_k,
        chi_monotone=_chi_first_drop(chi),
    )


def _chi_first_drop(chi: np.ndarray) -> bool:
    N = chi.shape[0]
    if N < 2:
        return True
    diag = np.diag(chi)[1:]
    sub = np.diag(chi, k=-1)
    return bool(np.all(diag > sub))


def estimate_alpha_critical(mesh: Mesh, tol: float = 1e-10) -> float:
    """
    Menor α com χ_0^n > χ_1^n para todo n ≥ 2, por bissecção.

    Malhas uniformes dão 2 - log2(3). Devolve 0.0 se a condição já vale
    perto de α = 0 e 1.0 se não vale perto de α = 1.
    """
    if mesh.N < 2:
        return 0.0
    lo, hi = 1e-9, 1.0 - 1e-9
    if _chi_first_drop(_chi_matrix(lo, mesh)):
        return 0.0
    if not _chi_first_drop(_chi_matrix(hi, mesh)):
        return 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _chi_first_drop(_chi_matrix(mid, mesh)):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Operador discreto e diagnósticos estruturais
# ---------------------------------------------------------------------------

def discrete_caputo(scheme: SchemeKernel, values: np.ndarray) -> np.ndarray:
    """
    𝒟_τ^α u_n = Σ_j c_{n-j}^n ∇u_j para n = 1..N.

    `values` tem N+1 linhas (u_0..u_N); colunas extras são componentes.
    """
    u = np.asarray(values, dtype=float)
    if u.shape[0] != scheme.N + 1:
        raise KernelSizeMismatchError.from_payload(
            E.kernel_size_mismatch(operation="discrete_caputo", left=scheme.N + 1, right=int(u.shape[0]))
        )
    return scheme.C.matrix @ np.diff(u, axis=0)


def is_doubly_monotone(C: TriKernel, *, rtol: float = 1e-12) -> bool:
    """Linhas não crescentes a partir da diagonal e c_{j-1}^{n-1} ≥ c_j^n."""
    m = C.matrix
    N = C.n_rows
    mask = np.tri(N, dtype=bool)
    scale = np.abs(m).max() if m.size else 1.0
    slack = rtol * scale
    # linha n: m[n-1, j-1] ≤ m[n-1, j] para j < n
    within = np.all((m[:, 1:] - m[:, :-1])[np.tri(N, N - 1, k=-1, dtype=bool)] >= -slack) if N > 1 else True
    # coluna j: m[n-2, j-1] ≥ m[n-1, j-1] para j ≤ n-1
    down = np.all((m[:-1, :] - m[1:, :])[mask[:-1, :]] >= -slack) if N > 1 else True
    return bool(within and down)


def is_log_convex(C: TriKernel, *, rtol: float = 1e-12) -> bool:
    """c_{k-1}^{n-1} c_{k+1}^n ≥ c_k^n c_k^{n-1} em todas as posições válidas."""
    N = C.n_rows
    for n in range(3, N + 1):
        for k in range(1, n - 1):
            lhs = C.entry(n - 1, k - 1) * C.entry(n, k + 1)
            rhs = C.entry(n, k) * C.entry(n - 1, k)
            if lhs < rhs * (1.0 - rtol) - 1e-300:
                return False
    return True


def nonincreasing_in_n(A: TriKernel, *, rtol: float = 1e-12) -> bool:
    """a_{j-1}^{n-1} ≥ a_j^n (colunas não crescentes para baixo)."""
    m = A.matrix
    N = A.n_rows
    if N < 2:
        return True
    mask = np.tri(N, dtype=bool)[:-1, :]
    upper = m[:-1, :][mask]
    lower = m[1:, :][mask]
    return bool(np.all(upper >= lower - rtol * np.maximum(np.abs(upper), np.abs(lower))))


# ---------------------------------------------------------------------------
# Certificação
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResolventCheck:
    lam: float
    passed: bool
    min_entry: float
    diag_min: float
    diag_max: float
    row_sum_max: float


@dataclass(frozen=True)
class CertificationReport:
    """
    Resultado de `certify`.

    is_completely_positive == (b_diagonal_min > 0 and b_offdiag_max ≤ 0 and
    row_sum_min ≥ -tolerance); `consistent` indica se o teste de resolventes
    concorda com o de sinais.
    """

    is_completely_positive: bool
    b_diagonal_min: float
    b_offdiag_max: float
    row_sum_min: float
    tolerance: float
    resolvent_checks: List[Tuple[float, bool]]
    nu: Optional[float] = None
    rho1: Optional[float] = None
    consistent: bool = True
    inconsistency: Optional[str] = None
    doubly_monotone: Optional[bool] = None
    log_convex: Optional[bool] = None
    chi_monotone: Optional[bool] = None
    alpha_critical: Optional[float] = None
    details: Dict[str, List[ResolventCheck]] = field(default_factory=dict)

    @property
    def resolvent_ok(self) -> bool:
        return all(ok for _, ok in self.resolvent_checks)


def _sign_test(B: np.ndarray) -> Tuple[float, float, float, float]:
    N = B.shape[0]
    row_tol = SIGN_TOL * np.max(np.abs(B), axis=1)
    diag_min = float(np.min(np.diag(B)))
    off = np.tri(N, k=-1, dtype=bool)
    if off.any():
        clipped = np.where(np.abs(B) <= row_tol[:, None], 0.0, B)
        offdiag_max = float(np.max(clipped[off]))
    else:
        offdiag_max = 0.0
    row_sums = B.sum(axis=1)
    tol_sum = SIGN_TOL * np.abs(B).sum(axis=1)
    row_sum_min = float(np.min(np.where(np.abs(row_sums) <= tol_sum, 0.0, row_sums)))
    return diag_min, offdiag_max, row_sum_min, float(np.max(tol_sum))


def _resolvent_test(A: TriKernel, lam: float) -> ResolventCheck:
    R = resolvent(A, lam).matrix
    N = R.shape[0]
    scale = max(float(np.max(np.abs(R))), 1e-300)
    mask = np.tri(N, dtype=bool)
    min_entry = float(np.min(R[mask]))
    diag = np.diag(R)
    row_sum_max = float(np.max(R.sum(axis=1)))
    passed = (
        min_entry >= -SIGN_TOL * scale
        and float(diag.min()) > 0.0
        and float(diag.max()) <= 1.0 + 1e-12
        and row_sum_max <= 1.0 + 1e-12
    )
    return ResolventCheck(
        lam=float(lam),
        passed=bool(passed),
        min_entry=min_entry,
        diag_min=float(diag.min()),
        diag_max=float(diag.max()),
        row_sum_max=row_sum_max,
    )


def certify(kernel, lambdas: Sequence[float] = DEFAULT_LAMBDAS) -> CertificationReport:
    """
    Certifica positividade completa de um kernel de forma integral.

    TriKernel é tratado como A (B = A^(-1)); SchemeKernel usa B = C ̄* L^(-1)
    diretamente e A = B^(-1). Os testes de sinais de B e de resolventes
    R_λ para cada λ precisam concordar.
    """
    scheme: Optional[SchemeKernel] = kernel if isinstance(kernel, SchemeKernel) else None
    if scheme is not None:
        B = pseudo_convolve(scheme.C, heaviside_inverse(scheme.N))
        A = scheme.integral if scheme.integral is not None else invert(B)
    else:
        A = kernel
        B = invert(A)

    diag_min, offdiag_max, row_sum_min, tol = _sign_test(B.matrix)
    sign_ok = diag_min > 0.0 and offdiag_max <= 0.0 and row_sum_min >= -tol

    checks = [_resolvent_test(A, float(lam)) for lam in lambdas]
    resolvent_ok = all(c.passed for c in checks)
    consistent = sign_ok == resolvent_ok
    inconsistency = None
    if not consistent:
        failing = [c.lam for c in checks if not c.passed]
        inconsistency = (
            f"teste de sinais={'ok' if sign_ok else 'falhou'} mas resolventes "
            f"{'falharam em λ=' + str(failing) if failing else 'passaram'}"
        )

    nu = rho1 = None
    doubly = log_convex = chi_mono = alpha_c = None
    if scheme is not None:
        nu, rho1 = estimate_nu_rho1(scheme)
        if scheme.family == SchemeFamily.CRANK_NICOLSON_L1_PLUS and scheme.chi is not None:
            doubly = is_doubly_monotone(scheme.chi)
            log_convex = is_log_convex(scheme.chi)
            chi_mono = scheme.chi_monotone
            alpha_c = estimate_alpha_critical(scheme.mesh)

    return CertificationReport(
        is_completely_positive=bool(sign_ok),
        b_diagonal_min=diag_min,
        b_offdiag_max=offdiag_max,
        row_sum_min=row_sum_min,
        tolerance=tol,
        resolvent_checks=[(c.lam, c.passed) for c in checks],
        nu=nu,
        rho1=rho1,
        consistent=consistent,
        inconsistency=inconsistency,
        doubly_monotone=doubly,
        log_convex=log_convex,
        chi_monotone=chi_mono,
        alpha_critical=alpha_c,
        details={"resolvent": checks},
    )


def estimate_nu_rho1(kernel: SchemeKernel) -> Tuple[float, float]:
    """
    ν = min e ρ1 = max de c_{n-j}^n / média_j[g_{1-α}(t_n - ·)] sobre todas as
    células; a média na célula j é exatamente o peso L1.
    """
    _check_alpha(kernel.alpha)
    avg = _l1_matrix(kernel.alpha, kernel.mesh)
    mask = np.tri(kernel.N, dtype=bool)
    ratio = kernel.C.matrix[mask] / avg[mask]
    return float(np.min(ratio)), float(np.max(ratio))

