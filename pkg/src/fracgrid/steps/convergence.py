"""Step canônico: pde.convergence (v1).

Tabela de refinamento da subdifusão (modo seno, f = 0).

- refine=time: `levels` são valores de N; a malha é graduada com
  `grading_r` (null → uniforme) até T, h fixo
- refine=space: `levels` são números de intervalos espaciais; malha
  temporal fixa (T, N, grading_r)

Artifacts produzidos:
- convergence.table, report.convergence
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List

from fracgrid.core.exceptions import FracgridException
from fracgrid.core.pipeline.context import RunContext
from fracgrid.core.pipeline.step import Step
from fracgrid.core.pipeline.types import StepKind, StepResult
from fracgrid.pde_apps import SubdiffusionConfig, truncation_and_error_study

from ._common import (
    build_mesh,
    failure,
    get_step_cfg,
    optional_float,
    require_float,
    require_int_list,
    require_str,
    success,
)


@dataclass
class ConvergenceStep(Step):
    id: str = "pde.convergence"
    kind: StepKind = StepKind.STUDY
    depends_on: List[str] = field(default_factory=list)

    def run(self, ctx: RunContext) -> StepResult:
        cfg = get_step_cfg(ctx, self.id)
        try:
            refine = require_str(cfg, "refine", self.id, choices=["time", "space"])
            levels = require_int_list(cfg, "levels", self.id)
            pde = SubdiffusionConfig(
                alpha=require_float(cfg, "alpha", self.id),
                mesh=build_mesh(cfg, self.id),
                X=require_float(cfg, "X", self.id),
                h=require_float(cfg, "h", self.id),
                rhs=require_str(cfg, "rhs", self.id),
                u0=require_str(cfg, "u0", self.id),
                amplitude=require_float(cfg, "amplitude", self.id),
            )
            table = truncation_and_error_study(
                pde, levels, refine=refine, grading_r=optional_float(cfg, "grading_r", self.id)
            )
        except FracgridException as exc:
            return failure(ctx, self.id, self.kind, exc)

        last = float(table["order"].iloc[-1])
        metrics = {
            "levels": len(levels),
            "refine": refine,
            "final_order": None if math.isnan(last) else last,
            "final_error": float(table["error"].iloc[-1]),
        }
        ctx.set_artifact("convergence.table", table)
        ctx.set_artifact("report.convergence", table)
        ctx.log(step_id=self.id, level="info", message="pde.convergence completed", **metrics)
        return success(
            self.id,
            self.kind,
            f"{refine} refinement over {len(levels)} levels, final order {metrics['final_order']}",
            metrics=metrics,
            artifacts={"table": "convergence.table", "report": "report.convergence"},
        )


__all__ = ["ConvergenceStep"]
