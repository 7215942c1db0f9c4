"""Step canônico: scheme.certify (v1).

Certifica a positividade completa do kernel de um esquema sobre uma malha.

Responsabilidades:
- Construir malha (arquivo, aleatória ou graduada) e esquema (l1, integral,
  cn ou kernel externo em CSV)
- Rodar o teste de sinais de B e o teste de resolventes para cada λ
- Publicar o relatório e as constantes (ν, ρ1)

Config esperada (exemplo):

steps:
  scheme.certify:
    enabled: true
    alpha: 0.5
    scheme: l1
    T: 1.0
    N: 32
    grading_r: 3.0
    lambdas: [0.01, 1.0, 100.0]

Artifacts produzidos:
- mesh, scheme, certification
- report.certification (linhas de texto)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

from fracgrid.core.exceptions import FracgridException
from fracgrid.core.pipeline.context import RunContext
from fracgrid.core.pipeline.step import Step
from fracgrid.core.pipeline.types import StepKind, StepResult
from fracgrid.report import certification_lines
from fracgrid.schemes import certify

from ._common import build_mesh, build_scheme, failure, get_step_cfg, require_float_list, success


@dataclass
class CertifyStep(Step):
    """Certificação de positividade completa (sinais de B + resolventes)."""

    id: str = "scheme.certify"
    kind: StepKind = StepKind.DIAGNOSTIC
    depends_on: List[str] = field(default_factory=list)

    def run(self, ctx: RunContext) -> StepResult:
        cfg = get_step_cfg(ctx, self.id)
        try:
            mesh = build_mesh(cfg, self.id)
            scheme = build_scheme(cfg, self.id, mesh)
            lambdas = require_float_list(cfg, "lambdas", self.id)
            report = certify(scheme, lambdas)
        except FracgridException as exc:
            return failure(ctx, self.id, self.kind, exc)

        ctx.set_artifact("mesh", mesh)
        ctx.set_artifact("scheme", scheme)
        ctx.set_artifact("certification", report)
        ctx.set_artifact(
            "report.certification",
            certification_lines(report, alpha=scheme.alpha, scheme=scheme.family.value),
        )
        if not report.consistent:
            ctx.add_warning(step_id=self.id, message=report.inconsistency or "inconsistent certification")

        metrics = {
            "completely_positive": report.is_completely_positive,
            "resolvent_ok": report.resolvent_ok,
            "nu": report.nu,
            "rho1": report.rho1,
            "N": mesh.N,
        }
        ctx.log(step_id=self.id, level="info", message="scheme.certify completed", **metrics)
        passed = report.is_completely_positive and report.resolvent_ok
        return success(
            self.id,
            self.kind,
            f"completely_positive: {str(report.is_completely_positive).lower()}",
            metrics=metrics,
            artifacts={"certification": "certification", "report": "report.certification"},
            payload={"passed": bool(passed), "consistent": report.consistent},
        )


__all__ = ["CertifyStep"]
