"""Step canônico: pde.subdiffusion (v1).

Resolve a subdifusão 1D com L1 no tempo e publica normas por passo.

Responsabilidades:
- Montar SubdiffusionConfig (perfis rhs/u0, h, X) sobre a malha configurada
- Resolver, medir ‖u_n‖ e ‖u_n - u_∞^h‖ e o defeito da desigualdade de norma
- Relatório de decaimento: inclinação na cauda e envelope σ quando
  max κτ_n^α ≤ 1 (caso contrário apenas o status da condição)

Artifacts produzidos:
- pde.trajectory, report.pde_trajectory
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List

from fracgrid.core.exceptions import FracgridException, InsufficientDataError
from fracgrid.core.pipeline.context import RunContext
from fracgrid.core.pipeline.step import Step
from fracgrid.core.pipeline.types import StepKind, StepResult
from fracgrid.pde_apps import (
    SUBDIFFUSION_PROFILES,
    SubdiffusionConfig,
    decay_report,
    norm_inequality_defect,
    solve_subdiffusion,
    steady_state,
)
from fracgrid.report import pde_frame

from ._common import build_mesh, failure, get_step_cfg, require_float, require_str, success

NORM_DEFECT_TOL = 1e-9


@dataclass
class SubdiffusionStep(Step):
    """Subdifusão D^α u = Δu + f com Dirichlet homogêneo."""

    id: str = "pde.subdiffusion"
    kind: StepKind = StepKind.SOLVE
    depends_on: List[str] = field(default_factory=list)

    def run(self, ctx: RunContext) -> StepResult:
        cfg = get_step_cfg(ctx, self.id)
        profiles = sorted(SUBDIFFUSION_PROFILES)
        try:
            pde = SubdiffusionConfig(
                alpha=require_float(cfg, "alpha", self.id),
                mesh=build_mesh(cfg, self.id),
                X=require_float(cfg, "X", self.id),
                h=require_float(cfg, "h", self.id),
                rhs=require_str(cfg, "rhs", self.id, choices=profiles),
                u0=require_str(cfg, "u0", self.id, choices=profiles),
                amplitude=require_float(cfg, "amplitude", self.id),
            )
            traj = solve_subdiffusion(pde)
            steady = steady_state(pde)
            errors = traj.norms(shift=steady)
            defect = norm_inequality_defect(traj, pde)
            metrics: Dict[str, Any] = {
                "kappa": float(pde.kappa),
                "final_norm": float(traj.norms()[-1]),
                "final_steady_error": float(errors[-1]),
                "norm_inequality_defect": defect,
            }
            envelope = None
            decay_ok = None
            try:
                decay = decay_report(traj, pde)
            except InsufficientDataError as exc:
                ctx.add_warning(step_id=self.id, message=exc.message)
            else:
                metrics.update(
                    tail_slope=decay.slope,
                    decay_condition=decay.condition_value,
                    envelope_checked=decay.envelope_checked,
                )
                for note in decay.notes:
                    ctx.add_warning(step_id=self.id, message=note)
                envelope = decay.envelope
                decay_ok = decay.envelope_passed
        except FracgridException as exc:
            return failure(ctx, self.id, self.kind, exc)

        passed = defect <= NORM_DEFECT_TOL and decay_ok is not False
        ctx.set_artifact("pde.trajectory", traj)
        ctx.set_artifact("report.pde_trajectory", pde_frame(traj.t, traj.norms(), errors, envelope))
        ctx.log(step_id=self.id, level="info", message="pde.subdiffusion completed", **metrics)
        return success(
            self.id,
            self.kind,
            f"subdiffusion solved: ‖u_N - u_inf‖ = {errors[-1]:.6g}",
            metrics=metrics,
            artifacts={"trajectory": "pde.trajectory", "report": "report.pde_trajectory"},
            payload={"passed": bool(passed)},
        )


__all__ = ["SubdiffusionStep"]
