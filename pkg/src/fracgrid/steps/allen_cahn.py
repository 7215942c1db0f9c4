"""Step canônico: pde.allen_cahn (v1).

Allen–Cahn fracionário 1D no toro com derivada espectral.

Verificações publicadas:
- modo zero de Fourier < 1e-12 em todos os passos (u0 ímpar)
- 𝒟‖u_n‖ + (κ²-1)‖u_n‖ ≤ 1e-9 em todos os passos
- inclinação da cauda de ‖u_n‖ e envelope σ quando max (κ²-1)τ_n^α ≤ 1

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
    ALLEN_CAHN_PROFILES,
    ODD_TOL,
    AllenCahnConfig,
    decay_report,
    dissipation_defect,
    solve_allen_cahn,
    zero_mode,
)
from fracgrid.report import pde_frame

from ._common import build_mesh, failure, get_step_cfg, require_float, require_int, require_str, success

DISSIPATION_TOL = 1e-9


@dataclass
class AllenCahnStep(Step):
    id: str = "pde.allen_cahn"
    kind: StepKind = StepKind.SOLVE
    depends_on: List[str] = field(default_factory=list)

    def run(self, ctx: RunContext) -> StepResult:
        cfg = get_step_cfg(ctx, self.id)
        try:
            pde = AllenCahnConfig(
                alpha=require_float(cfg, "alpha", self.id),
                mesh=build_mesh(cfg, self.id),
                kappa2=require_float(cfg, "kappa2", self.id),
                modes=require_int(cfg, "modes", self.id, minimum=4),
                u0=require_str(cfg, "u0", self.id, choices=sorted(ALLEN_CAHN_PROFILES)),
                amplitude=require_float(cfg, "amplitude", self.id),
            )
            traj = solve_allen_cahn(pde)
            norms = traj.norms()
            max_zero = max(zero_mode(u) for u in traj.values)
            defect = dissipation_defect(traj, pde)
            metrics: Dict[str, Any] = {
                "final_norm": float(norms[-1]),
                "max_zero_mode": max_zero,
                "dissipation_defect": defect,
            }
            envelope = None
            decay_ok = None
            if norms[0] > 0.0:
                try:
                    decay = decay_report(traj, pde)
                except InsufficientDataError as exc:
                    ctx.add_warning(step_id=self.id, message=exc.message)
                else:
                    metrics.update(tail_slope=decay.slope, decay_condition=decay.condition_value)
                    for note in decay.notes:
                        ctx.add_warning(step_id=self.id, message=note)
                    envelope = decay.envelope
                    decay_ok = decay.envelope_passed
        except FracgridException as exc:
            return failure(ctx, self.id, self.kind, exc)

        passed = max_zero < ODD_TOL and defect <= DISSIPATION_TOL and decay_ok is not False
        ctx.set_artifact("pde.trajectory", traj)
        ctx.set_artifact("report.pde_trajectory", pde_frame(traj.t, norms, None, envelope))
        ctx.log(step_id=self.id, level="info", message="pde.allen_cahn completed", **metrics)
        return success(
            self.id,
            self.kind,
            f"allen-cahn solved: ‖u_N‖ = {norms[-1]:.6g}",
            metrics=metrics,
            artifacts={"trajectory": "pde.trajectory", "report": "report.pde_trajectory"},
            payload={"passed": bool(passed)},
        )


__all__ = ["AllenCahnStep"]
