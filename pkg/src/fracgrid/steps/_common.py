"""
Utilitários compartilhados pelos Steps do fracgrid.

Responsabilidades:
    - Ler e validar a seção `steps.<id>` da config (erros → CONFIG_INVALID)
    - Construir malha, esquema e lado direito a partir da config
    - Montar StepResult de sucesso/falha com payload serializável

Princípios fundamentais:
    - Nenhum default implícito além de defaults.yaml
    - Erros numéricos (FracgridException) viram StepResult FAILED com o
      payload canônico; exceções inesperadas seguem para o Engine
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from fracgrid.core import errors as E
from fracgrid.core.exceptions import ConfigInvalidError, FracgridException
from fracgrid.core.pipeline.context import RunContext
from fracgrid.core.pipeline.types import StepKind, StepResult, StepStatus
from fracgrid.kernel_algebra import TriKernel
from fracgrid.mesh import Mesh, graded_mesh, load_mesh, random_mesh
from fracgrid.schemes import (
    SchemeKernel,
    cn_l1plus_kernel,
    external_scheme,
    integral_scheme,
    l1_kernel,
)
from fracgrid.solver import AffineRhs

SCHEMES = ("l1", "integral", "cn", "external")


def get_step_cfg(ctx: RunContext, step_id: str) -> Dict[str, Any]:
    steps = ctx.config.get("steps", {}) if isinstance(ctx.config, dict) else {}
    cfg = steps.get(step_id, {}) if isinstance(steps, dict) else {}
    return cfg if isinstance(cfg, dict) else {}


def config_error(step: str, key: str, reason: str) -> ConfigInvalidError:
    return ConfigInvalidError.from_payload(E.config_invalid(key=key, reason=reason, step=step))


# ---------------------------------------------------------------------------
# Leitura tipada
# ---------------------------------------------------------------------------

def require_float(cfg: Dict[str, Any], key: str, step: str) -> float:
    v = cfg.get(key)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(float(v)):
        raise config_error(step, key, "must be a finite number")
    return float(v)


def optional_float(cfg: Dict[str, Any], key: str, step: str) -> Optional[float]:
    if cfg.get(key) is None:
        return None
    return require_float(cfg, key, step)


def require_int(cfg: Dict[str, Any], key: str, step: str, *, minimum: int = 1) -> int:
    v = cfg.get(key)
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise config_error(step, key, f"must be an int >= {minimum}")
    return int(v)


def require_str(cfg: Dict[str, Any], key: str, step: str, *, choices: Optional[List[str]] = None) -> str:
    v = cfg.get(key)
    if not isinstance(v, str) or not v.strip():
        raise config_error(step, key, "is required")
    v = v.strip()
    if choices is not None and v not in choices:
        raise config_error(step, key, f"must be one of {list(choices)}")
    return v


def require_float_list(cfg: Dict[str, Any], key: str, step: str) -> List[float]:
    v = cfg.get(key)
    if not isinstance(v, (list, tuple)) or not v:
        raise config_error(step, key, "must be a non-empty list")
    out = []
    for i, item in enumerate(v):
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise config_error(step, f"{key}[{i}]", "must be a number")
        out.append(float(item))
    return out


def require_int_list(cfg: Dict[str, Any], key: str, step: str) -> List[int]:
    values = require_float_list(cfg, key, step)
    if any(v != int(v) or v < 2 for v in values):
        raise config_error(step, key, "must be a list of ints >= 2")
    return [int(v) for v in values]


# ---------------------------------------------------------------------------
# Construção de objetos numéricos
# ---------------------------------------------------------------------------

def build_mesh(cfg: Dict[str, Any], step: str) -> Mesh:
    """mesh_file > ratio_bound (aleatória, com seed) > grading_r (graduada)."""
    mesh_file = cfg.get("mesh_file")
    if mesh_file:
        path = Path(str(mesh_file))
        if not path.is_file():
            raise config_error(step, "mesh_file", f"not found: {path}")
        return load_mesh(path)
    T = require_float(cfg, "T", step)
    N = require_int(cfg, "N", step)
    ratio_bound = optional_float(cfg, "ratio_bound", step)
    if ratio_bound is not None:
        seed = cfg.get("seed")
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise config_error(step, "seed", "must be an explicit int for random meshes")
        return random_mesh(T, N, ratio_bound, seed)
    r = optional_float(cfg, "grading_r", step)
    return graded_mesh(T, N, 1.0 if r is None else r)


def build_scheme(cfg: Dict[str, Any], step: str, mesh: Mesh) -> SchemeKernel:
    alpha = require_float(cfg, "alpha", step)
    name = require_str(cfg, "scheme", step, choices=list(SCHEMES))
    if name == "l1":
        return l1_kernel(alpha, mesh)
    if name == "integral":
        return integral_scheme(alpha, mesh)
    if name == "cn":
        return cn_l1plus_kernel(alpha, mesh)
    kernel_file = cfg.get("kernel_file")
    if not kernel_file or not Path(str(kernel_file)).is_file():
        raise config_error(step, "kernel_file", "is required for scheme 'external'")
    form = require_str(cfg, "kernel_form", step, choices=["integral", "differential"])
    return external_scheme(alpha, mesh, TriKernel.from_csv(Path(str(kernel_file))), form=form)


class PolynomialRhs:
    """f(t, u) = Σ_k a_k u^k, com jacobiano analítico."""

    def __init__(self, coeffs: List[float]) -> None:
        self.coeffs = np.asarray(coeffs, dtype=float)

    def __call__(self, t: float, u):
        return np.polynomial.polynomial.polyval(u, self.coeffs)

    def jacobian(self, t: float, u):
        return np.diag(np.atleast_1d(np.polynomial.polynomial.polyval(u, np.polynomial.polynomial.polyder(self.coeffs))))


def parse_rhs(spec: str, step: str):
    """
    "affine:β,c" → AffineRhs(β, c); "poly:a0,a1,..." → PolynomialRhs.
    """
    kind, _, args = str(spec).partition(":")
    try:
        values = [float(a) for a in args.split(",")] if args.strip() else []
    except ValueError:
        raise config_error(step, "rhs", f"could not parse coefficients in {spec!r}") from None
    if kind == "affine" and len(values) in (1, 2):
        return AffineRhs(beta=values[0], c=values[1] if len(values) == 2 else 0.0)
    if kind == "poly" and values:
        return PolynomialRhs(values)
    raise config_error(step, "rhs", "expected 'affine:beta,c' or 'poly:a0,a1,...'")


def rhs_jacobian(rhs) -> Optional[Callable]:
    return rhs.jacobian if isinstance(rhs, PolynomialRhs) else None


# ---------------------------------------------------------------------------
# Resultados
# ---------------------------------------------------------------------------

def success(
    step_id: str,
    kind: StepKind,
    summary: str,
    *,
    metrics: Optional[Dict[str, Any]] = None,
    warnings: Optional[List[str]] = None,
    artifacts: Optional[Dict[str, Any]] = None,
    payload: Optional[Dict[str, Any]] = None,
) -> StepResult:
    return StepResult(
        step_id=step_id,
        kind=kind,
        status=StepStatus.SUCCESS,
        summary=summary,
        metrics=dict(metrics or {}),
        warnings=list(warnings or []),
        artifacts=dict(artifacts or {}),
        payload=dict(payload or {}),
    )


def failure(ctx: RunContext, step_id: str, kind: StepKind, exc: FracgridException) -> StepResult:
    payload = exc.to_payload()
    ctx.log(
        step_id=step_id,
        level="error",
        message=f"{step_id} failed",
        error_type=payload.type,
        error_message=payload.message,
    )
    return StepResult(
        step_id=step_id,
        kind=kind,
        status=StepStatus.FAILED,
        summary=payload.message,
        payload={"error": payload.to_dict()},
    )


def forward_warnings(ctx: RunContext, step_id: str, messages: List[str]) -> None:
    for msg in messages:
        ctx.add_warning(step_id=step_id, message=msg)
