"""
Malhas temporais não uniformes.

Este módulo constrói e valida as grades t_0 = 0 < t_1 < … < t_N sobre as
quais todos os kernels do fracgrid são montados.

Responsabilidades:
    - Construir malhas uniformes, graduadas (t_n = T (n/N)^r) e aleatórias
      com razão de passos limitada
    - Validar monotonicidade estrita e finitude
    - Serializar para texto (um tempo por linha, 17 dígitos significativos)

Decisões arquiteturais:
    - `Mesh` é imutável: arrays internos são somente leitura, de modo que
      coeficientes de kernel nunca dessincronizam da grade
    - A malha graduada é avaliada pela forma fechada (sem acumular passos);
      os passos são derivados por subtração
    - r = 1 reproduz bit a bit a malha uniforme (mesma expressão aritmética)
    - A malha aleatória percorre log(τ) por passeio refletido: a razão entre
      passos consecutivos respeita `ratio_bound` e a faixa dinâmica total
      dos passos fica limitada a `_MAX_STEP_RANGE`

Invariantes:
    - points estritamente crescente, points[0] == 0
    - steps[n] == points[n] - points[n-1] exatamente como armazenado

Limites explícitos:
    - Não trata malhas espaciais (ver pde_apps)
    - Não faz adaptação de passo por estimador de erro
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from fracgrid.core import errors as E
from fracgrid.core.exceptions import InvalidMeshError, InvalidParameterError

_MAX_STEP_RANGE = 1e4
_RATIO_SLACK = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Mesh:
    """Grade temporal imutável t_0 = 0 < … < t_N com passos τ_n = t_n − t_{n−1}."""

    points: np.ndarray
    steps: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise InvalidMeshError.from_payload(
                E.invalid_mesh(reason="pelo menos dois pontos são necessários", details={"size": int(pts.size)})
            )
        if not np.all(np.isfinite(pts)):
            raise InvalidMeshError.from_payload(E.invalid_mesh(reason="pontos não finitos"))
        if pts[0] != 0.0:
            raise InvalidMeshError.from_payload(
                E.invalid_mesh(reason="t_0 deve ser 0", details={"t0": float(pts[0])})
            )
        steps = np.diff(pts)
        if np.any(steps <= 0.0):
            bad = int(np.argmax(steps <= 0.0)) + 1
            raise InvalidMeshError.from_payload(
                E.invalid_mesh(reason="pontos não estritamente crescentes", details={"n": bad})
            )
        object.__setattr__(self, "points", _frozen(pts))
        object.__setattr__(self, "steps", _frozen(steps))

    @property
    def N(self) -> int:
        return int(self.points.size - 1)

    @property
    def T(self) -> float:
        return float(self.points[-1])

    def tau(self, n: int) -> float:
        """τ_n para n ∈ {1..N}."""
        if not 1 <= n <= self.N:
            raise IndexError(f"step index {n} outside 1..{self.N}")
        return float(self.steps[n - 1])

    def ratios(self) -> np.ndarray:
        """τ_{n+1}/τ_n para n = 1..N−1."""
        return self.steps[1:] / self.steps[:-1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Mesh):
            return NotImplemented
        return bool(np.array_equal(self.points, other.points))

    def __hash__(self) -> int:
        return hash(self.points.tobytes())

    def __len__(self) -> int:
        return int(self.points.size)

    # -----------------------------
    # Serialização texto
    # -----------------------------
    def to_text(self) -> str:
        return "".join(f"{t:.17g}\n" for t in self.points)

    @classmethod
    def from_text(cls, text: str) -> "Mesh":
        values = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                values.append(float(line))
        return cls(np.array(values, dtype=float))


def _check_T_N(T: float, N: int) -> None:
    if not (isinstance(T, (int, float)) and math.isfinite(T) and T > 0):
        raise InvalidParameterError.from_payload(E.invalid_parameter(name="T", value=T, expected="T > 0"))
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)) or N < 1:
        raise InvalidParameterError.from_payload(E.invalid_parameter(name="N", value=N, expected="inteiro N >= 1"))


def uniform_mesh(T: float, N: int) -> Mesh:
    """t_n = nT/N."""
    _check_T_N(T, N)
    return Mesh(T * (np.arange(N + 1) / N))


def graded_mesh(T: float, N: int, r: float) -> Mesh:
    """
    Malha graduada t_n = T (n/N)^r, concentrando pontos perto de t = 0.

    r < 1 é rejeitado: afastar pontos da origem piora a camada inicial
    singular que a graduação existe para resolver.
    """
    _check_T_N(T, N)
    if not (math.isfinite(r) and r >= 1.0):
        raise InvalidParameterError.from_payload(
            E.invalid_parameter(name="r", value=r, expected="r >= 1")
        )
    return Mesh(T * (np.arange(N + 1) / N) ** r)


def optimal_grading(alpha: float) -> float:
    """Expoente (2−α)/α, graduação ótima para o esquema L1 com solução não suave em 0."""
    return (2.0 - alpha) / alpha


def random_mesh(T: float, N: int, ratio_bound: float, seed: int) -> Mesh:
    """
    Malha aleatória determinística com τ_{n+1}/τ_n ∈ [1/R, R].

    Os log-passos seguem um passeio com incrementos uniformes em
    [−log R, log R], refletido em uma janela de largura log(_MAX_STEP_RANGE);
    os passos são normalizados para t_N = T e as razões revalidadas.
    """
    _check_T_N(T, N)
    if not (math.isfinite(ratio_bound) and ratio_bound >= 1.0):
        raise InvalidParameterError.from_payload(
            E.invalid_parameter(name="ratio_bound", value=ratio_bound, expected="ratio_bound >= 1")
        )
    if N == 1 or ratio_bound == 1.0:
        return uniform_mesh(T, N)

    rng = np.random.default_rng(seed)
    increments = rng.uniform(-math.log(ratio_bound), math.log(ratio_bound), size=N - 1)
    half = 0.5 * math.log(_MAX_STEP_RANGE)

    log_steps = np.empty(N)
    log_steps[0] = 0.0
    for k, d in enumerate(increments, start=1):
        x = log_steps[k - 1] + d
        if x > half:
            x = 2.0 * half - x
        elif x < -half:
            x = -2.0 * half - x
        log_steps[k] = x

    steps = np.exp(log_steps - log_steps.max())
    cumulative = np.concatenate(([0.0], np.cumsum(steps)))
    points = T * (cumulative / cumulative[-1])
    points[-1] = T
    mesh = Mesh(points)

    ratios = mesh.ratios()
    slack = ratio_slack(mesh)
    lo, hi = (1.0 / ratio_bound) * (1.0 - slack), ratio_bound * (1.0 + slack)
    if np.any(ratios < lo) or np.any(ratios > hi):
        raise InvalidMeshError.from_payload(
            E.invalid_mesh(
                reason="razão de passos fora do limite após normalização",
                details={"ratio_min": float(ratios.min()), "ratio_max": float(ratios.max()), "ratio_bound": ratio_bound},
            )
        )
    return mesh


def ratio_slack(mesh: Mesh) -> np.ndarray:
    """
    Folga relativa admissível em cada razão τ_{n+1}/τ_n: _RATIO_SLACK mais o
    roundoff da subtração t_n − t_{n−1} (passos pequenos longe da origem).
    """
    eps = np.finfo(float).eps
    smaller = np.minimum(mesh.steps[1:], mesh.steps[:-1])
    return _RATIO_SLACK + 32.0 * eps * mesh.points[2:] / smaller


def max_step_restriction(mesh: Mesh, lam: float, alpha: float) -> float:
    """max_n λ τ_n^α (quantidade das hipóteses com restrição de passo)."""
    return float(lam * np.max(mesh.steps ** alpha))


def save_mesh(mesh: Mesh, path: Union[str, Path]) -> None:
    Path(path).write_text(mesh.to_text(), encoding="utf-8")


def load_mesh(path: Union[str, Path]) -> Mesh:
    return Mesh.from_text(Path(path).read_text(encoding="utf-8"))


def mesh_from_points(points: Iterable[float]) -> Mesh:
    return Mesh(np.fromiter(points, dtype=float))
