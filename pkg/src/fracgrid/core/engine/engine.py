# src/fracgrid/core/engine/engine.py
"""
Engine de execução do fracgrid.

Regras:
- O Engine **não** muta instâncias de StepResult; enriquecimento
  (warnings do contexto, metadados do payload) cria nova instância
  via `dataclasses.replace`.
- Exceções levantadas por Steps viram FracgridErrorPayload em
  `StepResult.payload["error"]`; nenhum stack trace cru chega ao operador.
- FracgridException usa seu `error_type` do catálogo; qualquer outra
  exceção vira ENGINE_EXECUTION_ERROR.
- Quando o RunContext carrega um `manifest`, o Engine registra
  step_started / step_finished / step_failed.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Sequence

from fracgrid.core.errors import (
    ENGINE_CONFIGURATION_ERROR,
    FracgridErrorPayload,
    engine_execution_error,
)
from fracgrid.core.exceptions import FracgridException
from fracgrid.core.pipeline.context import RunContext
from fracgrid.core.pipeline.step import Step
from fracgrid.core.pipeline.types import StepKind, StepResult, StepStatus

from .planner import plan_execution


@dataclass(frozen=True)
class RunResult:
    """Resultado agregado de uma execução (RunResult v1)."""

    steps: Dict[str, StepResult] = field(default_factory=dict)

    def failed(self) -> List[str]:
        return [sid for sid, r in self.steps.items() if r.status == StepStatus.FAILED]


class Engine:
    """Engine canônico do fracgrid (planner + executor)."""

    def __init__(self, *, steps: Sequence[Step], ctx: RunContext):
        self.steps: List[Step] = list(steps)
        self.ctx: RunContext = ctx

    def _is_enabled(self, step_id: str) -> bool:
        steps_cfg = (self.ctx.config or {}).get("steps", {}) or {}
        step_cfg = steps_cfg.get(step_id, {}) or {}
        return bool(step_cfg.get("enabled", True))

    def _fail_fast(self) -> bool:
        engine_cfg = (self.ctx.config or {}).get("engine", {}) or {}
        return bool(engine_cfg.get("fail_fast", True))

    # ------------------------------------------------------------------
    # Guardrails: exceção -> FracgridErrorPayload
    # ------------------------------------------------------------------

    def _exception_to_error(self, step_id: str, exc: Exception) -> FracgridErrorPayload:
        if isinstance(exc, FracgridException):
            return exc.to_payload()
        return engine_execution_error(
            step=step_id,
            exc_type=exc.__class__.__name__,
            exc_message=str(exc) or None,
        )

    # ------------------------------------------------------------------
    # Rastreamento
    # ------------------------------------------------------------------

    def _now(self) -> datetime:
        return datetime.now(timezone.utc)

    def _payload_meta(self, payload: Any) -> Dict[str, Any]:
        raw = json.dumps(payload, ensure_ascii=False, sort_keys=True, default=str).encode("utf-8")
        return {
            "payload_bytes": int(len(raw)),
            "payload_sha256": hashlib.sha256(raw).hexdigest(),
        }

    def _enrich_step_result(self, *, step_id: str, step: Step, result: StepResult) -> StepResult:
        """Retorna uma NOVA instância StepResult enriquecida para rastreabilidade."""
        kind = result.kind or getattr(step, "kind", None) or StepKind.DIAGNOSTIC

        merged_w: List[str] = []
        for msg in list(result.warnings or []) + list(self.ctx.warnings.get(step_id, [])):
            if msg not in merged_w:
                merged_w.append(msg)

        payload = dict(result.payload or {})
        artifacts = dict(result.artifacts or {})
        artifacts.setdefault("payload_meta", self._payload_meta(payload))

        return replace(
            result,
            step_id=step_id,
            kind=kind,
            warnings=merged_w,
            payload=payload,
            artifacts=artifacts,
        )

    def _record(self, result: StepResult) -> None:
        manifest = self.ctx.manifest
        if manifest is not None:
            manifest.record_step_result(result, ts=self._now())

    def _mk_result(
        self,
        *,
        step_id: str,
        step: Step,
        status: StepStatus,
        summary: str,
        payload: Optional[Dict[str, Any]] = None,
    ) -> StepResult:
        kind = getattr(step, "kind", None) or StepKind.DIAGNOSTIC
        r = StepResult(
            step_id=step_id,
            kind=kind,
            status=status,
            summary=summary,
            payload=dict(payload or {}),
        )
        enriched = self._enrich_step_result(step_id=step_id, step=step, result=r)
        self._record(enriched)
        return enriched

    def run(self) -> RunResult:
        ordered = plan_execution(self.steps)

        results: Dict[str, StepResult] = {}
        for step in ordered:
            sid = step.id

            if not self._is_enabled(sid):
                results[sid] = self._mk_result(
                    step_id=sid,
                    step=step,
                    status=StepStatus.SKIPPED,
                    summary="skipped by config",
                )
                continue

            deps = list(getattr(step, "depends_on", []) or [])
            if any(results.get(d) and results[d].status == StepStatus.FAILED for d in deps):
                results[sid] = self._mk_result(
                    step_id=sid,
                    step=step,
                    status=StepStatus.SKIPPED,
                    summary="skipped due to failed dependency",
                )
                continue

            if self.ctx.manifest is not None:
                kind = getattr(step, "kind", None) or StepKind.DIAGNOSTIC
                self.ctx.manifest.step_started(step_id=sid, kind=str(getattr(kind, "value", kind)), ts=self._now())

            try:
                step_result = step.run(self.ctx)
                if not isinstance(step_result, StepResult):
                    raise TypeError("Step.run(ctx) must return StepResult")

                enriched = self._enrich_step_result(step_id=sid, step=step, result=step_result)
                results[sid] = enriched
                self._record(enriched)

            except Exception as e:
                error = self._exception_to_error(sid, e)

                if isinstance(e, TypeError) and "must return StepResult" in (str(e) or ""):
                    error = FracgridErrorPayload(
                        type=ENGINE_CONFIGURATION_ERROR,
                        message="Step retornou tipo inválido",
                        details={
                            "step_id": sid,
                            "expected": "StepResult",
                            "received": e.__class__.__name__,
                        },
                        hint="Ajuste o Step para retornar StepResult",
                        decision_required=False,
                    )

                results[sid] = self._mk_result(
                    step_id=sid,
                    step=step,
                    status=StepStatus.FAILED,
                    summary=error.message,
                    payload={"error": error.to_dict()},
                )

            if results[sid].status == StepStatus.FAILED and self._fail_fast():
                break

        return RunResult(steps=results)
