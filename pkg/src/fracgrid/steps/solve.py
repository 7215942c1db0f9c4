"""Step canônico: fode.solve (v1).

Integra D^α u = f(t, u) com o esquema configurado e publica a trajetória.

Responsabilidades:
- Construir malha, esquema e lado direito (`affine:β,c` ou `poly:a0,a1,...`)
- Resolver com a regra θ configurada (Crank–Nicolson L1+ usa θ = 1/2)
- Para lados direitos afins: solução exata via Mittag-Leffler e envelopes
  de Grönwall aplicáveis (colunas exact/lower/upper do trajectory.csv)

Artifacts produzidos:
- mesh, scheme, trajectory
- report.trajectory (DataFrame n,t,u,exact,lower,upper)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np

from fracgrid.core.exceptions import FracgridException
from fracgrid.core.pipeline.context import RunContext
from fracgrid.core.pipeline.step import Step
from fracgrid.core.pipeline.types import StepKind, StepResult
from fracgrid.gronwall import affine_envelopes, verify_trajectory
from fracgrid.ml_func import linear_fode_exact
from fracgrid.report import trajectory_frame
from fracgrid.schemes import estimate_nu_rho1
from fracgrid.solver import AffineRhs, FodeProblem, ThetaRule, solve

from ._common import (
    build_mesh,
    build_scheme,
    failure,
    forward_warnings,
    get_step_cfg,
    optional_float,
    parse_rhs,
    require_float,
    require_str,
    rhs_jacobian,
    success,
)


@dataclass
class SolveStep(Step):
    """Integração temporal de uma FODE escalar."""

    id: str = "fode.solve"
    kind: StepKind = StepKind.SOLVE
    depends_on: List[str] = field(default_factory=list)

    def run(self, ctx: RunContext) -> StepResult:
        cfg = get_step_cfg(ctx, self.id)
        try:
            mesh = build_mesh(cfg, self.id)
            scheme = build_scheme(cfg, self.id, mesh)
            rhs = parse_rhs(require_str(cfg, "rhs", self.id), self.id)
            u0 = require_float(cfg, "u0", self.id)
            variant = require_str(cfg, "variant", self.id, choices=[v.value for v in ThetaRule])
            problem = FodeProblem(
                f=rhs,
                u0=u0,
                lipschitz=optional_float(cfg, "lipschitz", self.id),
                theta=require_float(cfg, "theta", self.id),
                variant=ThetaRule(variant),
                jacobian=rhs_jacobian(rhs),
            )
            traj = solve(scheme, problem)

            metrics: Dict[str, Any] = {"N": mesh.N, "T": mesh.T, "u_N": float(traj.values[-1])}
            exact = lower = upper = None
            notes: List[str] = []
            if isinstance(rhs, AffineRhs):
                exact = np.array(
                    [linear_fode_exact(scheme.alpha, rhs.beta, rhs.c, u0, float(t)) for t in mesh.points]
                )
                metrics["max_error"] = float(np.max(np.abs(traj.values - exact)))
                if cfg.get("envelopes", True) and problem.theta == 1.0 and scheme.chi is None:
                    nu, rho1 = estimate_nu_rho1(scheme)
                    low_env, up_env, notes = affine_envelopes(
                        scheme.alpha, rhs.beta, rhs.c, u0, mesh, nu=nu, rho1=rho1
                    )
                    if low_env is not None:
                        lower = low_env.values()
                        metrics["lower_passed"] = verify_trajectory(low_env, traj, "lower").passed
                    if up_env is not None:
                        upper = up_env.values()
                        metrics["upper_passed"] = verify_trajectory(up_env, traj, "upper").passed
        except FracgridException as exc:
            return failure(ctx, self.id, self.kind, exc)

        forward_warnings(ctx, self.id, list(traj.warnings) + notes)
        ctx.set_artifact("mesh", mesh)
        ctx.set_artifact("scheme", scheme)
        ctx.set_artifact("trajectory", traj)
        ctx.set_artifact("report.trajectory", trajectory_frame(traj, exact=exact, lower=lower, upper=upper))
        ctx.log(step_id=self.id, level="info", message="fode.solve completed", **metrics)
        return success(
            self.id,
            self.kind,
            f"solved N={mesh.N} steps, u_N={metrics['u_N']:.6g}",
            metrics=metrics,
            artifacts={"trajectory": "trajectory", "report": "report.trajectory"},
        )


__all__ = ["SolveStep"]
