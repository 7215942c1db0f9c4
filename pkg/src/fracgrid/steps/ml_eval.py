"""Step canônico: ml.eval (v1).

Avalia E_{α,β}(z) num ponto (`z`) ou numa grade uniforme
[z_min, z_max] com `points` pontos, registrando o ramo usado.

Artifacts produzidos:
- report.ml (DataFrame z,value,branch)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import numpy as np

from fracgrid.core.exceptions import FracgridException
from fracgrid.core.pipeline.context import RunContext
from fracgrid.core.pipeline.step import Step
from fracgrid.core.pipeline.types import StepKind, StepResult
from fracgrid.ml_func import MLParams, ml, ml_branch
from fracgrid.report import ml_frame

from ._common import failure, get_step_cfg, optional_float, require_float, require_int, success


@dataclass
class MLEvalStep(Step):
    id: str = "ml.eval"
    kind: StepKind = StepKind.DIAGNOSTIC
    depends_on: List[str] = field(default_factory=list)

    def run(self, ctx: RunContext) -> StepResult:
        cfg = get_step_cfg(ctx, self.id)
        try:
            params = MLParams(require_float(cfg, "alpha", self.id), require_float(cfg, "beta", self.id))
            z = optional_float(cfg, "z", self.id)
            if z is not None:
                zs = np.array([z])
            else:
                zs = np.linspace(
                    require_float(cfg, "z_min", self.id),
                    require_float(cfg, "z_max", self.id),
                    require_int(cfg, "points", self.id),
                )
            values = [ml(params, float(x)) for x in zs]
            branches = [ml_branch(params, float(x)) for x in zs]
        except FracgridException as exc:
            return failure(ctx, self.id, self.kind, exc)

        ctx.set_artifact("report.ml", ml_frame(zs, values, branches))
        ctx.log(step_id=self.id, level="info", message="ml.eval completed", points=int(zs.size))
        summary = f"E(z={zs[0]:.6g}) = {values[0]:.17g}" if zs.size == 1 else f"{zs.size} points evaluated"
        return success(
            self.id,
            self.kind,
            summary,
            metrics={"points": int(zs.size), "alpha": params.alpha, "beta": params.beta},
            artifacts={"report": "report.ml"},
            payload={"values": [float(v) for v in values]},
        )


__all__ = ["MLEvalStep"]
