"""Step canônico: gronwall.check (v1).

Verifica uma trajetória salva (trajectory.csv) contra envelopes de Grönwall.

Config esperada (exemplo):

steps:
  gronwall.check:
    trajectory_file: out/trajectory.csv
    alpha: 0.5
    variant: sandwich      # ou uniform, decay_lower, decay_upper,
                           # decay_upper_restricted, growing, lambda_zero
    lam: 1.0
    c: 0.0

`sandwich` aplica os envelopes de D^α v = -λv + c (inferior e superior
quando v0 > c/λ). `v0` ausente usa u na primeira linha do arquivo.

Artifacts produzidos:
- gronwall (lista de (rótulo, VerificationReport))
- report.gronwall (linhas de texto)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Tuple

from fracgrid.core.exceptions import FracgridException
from fracgrid.core.pipeline.context import RunContext
from fracgrid.core.pipeline.step import Step
from fracgrid.core.pipeline.types import StepKind, StepResult
from fracgrid.gronwall import (
    EnvelopeVariant,
    GronwallEnvelope,
    VerificationReport,
    affine_envelopes,
    verify_trajectory,
)
from fracgrid.mesh import mesh_from_points
from fracgrid.report import gronwall_lines, read_trajectory

from ._common import config_error, failure, get_step_cfg, optional_float, require_float, require_str, success

VARIANTS = ["sandwich"] + [v.value for v in EnvelopeVariant]


@dataclass
class GronwallCheckStep(Step):
    """Verificação de envelopes de Grönwall sobre uma trajetória em CSV."""

    id: str = "gronwall.check"
    kind: StepKind = StepKind.VERIFY
    depends_on: List[str] = field(default_factory=list)

    def run(self, ctx: RunContext) -> StepResult:
        cfg = get_step_cfg(ctx, self.id)
        try:
            path = cfg.get("trajectory_file")
            if not path or not Path(str(path)).is_file():
                raise config_error(self.id, "trajectory_file", f"not found: {path}")
            try:
                frame = read_trajectory(Path(str(path)))
            except ValueError as exc:
                raise config_error(self.id, "trajectory_file", str(exc)) from exc
            mesh = mesh_from_points(frame["t"].to_numpy(dtype=float))
            values = frame["u"].to_numpy(dtype=float)

            alpha = require_float(cfg, "alpha", self.id)
            variant = require_str(cfg, "variant", self.id, choices=VARIANTS)
            lam = require_float(cfg, "lam", self.id)
            c = require_float(cfg, "c", self.id)
            v0 = optional_float(cfg, "v0", self.id)
            v0 = float(values[0]) if v0 is None else v0
            consts = dict(
                nu=require_float(cfg, "nu", self.id),
                rho1=require_float(cfg, "rho1", self.id),
            )
            sigma = optional_float(cfg, "sigma", self.id)
            mu = optional_float(cfg, "mu", self.id)

            plan: List[Tuple[str, GronwallEnvelope, str]] = []
            notes: List[str] = []
            if variant == "sandwich":
                lower, upper, notes = affine_envelopes(alpha, -lam, c, v0, mesh, sigma=sigma, mu=mu, **consts)
                if lower is not None:
                    plan.append((lower.variant.value, lower, "lower"))
                if upper is not None:
                    plan.append((upper.variant.value, upper, "upper"))
                if not plan:
                    raise config_error(self.id, "variant", "no envelope applies to these parameters")
            else:
                kind = EnvelopeVariant(variant)
                env = GronwallEnvelope(kind, alpha=alpha, lam=lam, c=c, v0=v0, mesh=mesh, sigma=sigma, mu=mu, **consts)
                default_dir = "lower" if kind == EnvelopeVariant.DECAY_LOWER else "upper"
                direction = cfg.get("direction") or default_dir
                if direction not in ("upper", "lower"):
                    raise config_error(self.id, "direction", "must be 'upper' or 'lower'")
                plan.append((kind.value, env, direction))

            checks: List[Tuple[str, VerificationReport]] = [
                (label, verify_trajectory(env, values, direction)) for label, env, direction in plan
            ]
        except FracgridException as exc:
            return failure(ctx, self.id, self.kind, exc)

        passed = all(r.passed for _, r in checks)
        for note in notes:
            ctx.add_warning(step_id=self.id, message=note)
        ctx.set_artifact("gronwall", checks)
        ctx.set_artifact("report.gronwall", gronwall_lines(checks, notes))
        metrics = {
            "passed": passed,
            "checks": len(checks),
            "max_violation": max(r.max_violation for _, r in checks),
        }
        ctx.log(step_id=self.id, level="info", message="gronwall.check completed", **metrics)
        return success(
            self.id,
            self.kind,
            f"gronwall {'passed' if passed else 'violated'}: max violation {metrics['max_violation']:.3e}",
            metrics=metrics,
            artifacts={"gronwall": "gronwall", "report": "report.gronwall"},
            payload={"passed": passed},
        )


__all__ = ["GronwallCheckStep"]
