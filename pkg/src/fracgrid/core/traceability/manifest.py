"""
Manifest v1 — rastreabilidade de execuções do fracgrid.

O Manifest consolida, de forma determinística e auditável:
    - metadados da execução (run_id, started_at, versão do fracgrid)
    - hash da configuração efetiva (identidade numérica da run)
    - estado incremental dos Steps (status, duração, métricas, warnings)
    - Event Log ordenado de eventos explícitos

Princípios fundamentais:
    - Nenhum evento é emitido implicitamente
    - Toda mutação ocorre por chamadas explícitas da API
    - A ordem do Event Log reflete a ordem real de execução
    - O Manifest é serializável e reconstruível (round-trip JSON)

Decisões arquiteturais:
    - UTC é o timezone canônico para todos os timestamps
    - Métricas e payloads numéricos passam por `_json_safe` (numpy → Python)

Limites explícitos:
    - Não executa Steps
    - Não decide políticas de execução (fail-fast, skip)
    - Não realiza migração de versões de schema
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

from fracgrid.core.pipeline.types import StepResult, StepStatus


def _ensure_tzaware_utc(dt: datetime) -> datetime:
    """Timestamps timezone-naive são assumidos como UTC."""
    if dt.tzinfo is None:
        return dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def _iso(dt: datetime) -> str:
    return _ensure_tzaware_utc(dt).isoformat()


def _ms_between(start: datetime, end: datetime) -> int:
    s = _ensure_tzaware_utc(start)
    e = _ensure_tzaware_utc(end)
    return max(0, int((e - s).total_seconds() * 1000))


def _json_safe(obj: Any) -> Any:
    """Converte escalares numpy, enums e não finitos para tipos JSON."""
    if obj is None or isinstance(obj, (str, bool, int)):
        return obj
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else repr(obj)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _json_safe(obj.tolist())
    if hasattr(obj, "item"):
        return _json_safe(obj.item())
    return str(obj)


@dataclass
class RunManifest:
    """
    Manifest v1 — registro de uma execução.

    Campos principais:
        - run: metadados da execução (run_id, started_at, fracgrid_version)
        - inputs: hash da configuração efetiva e comando executado
        - steps: estado incremental de cada Step
        - events: Event Log ordenado

    Invariantes:
        - `steps` é sempre um dicionário indexado por step_id
        - `events` é sempre uma lista ordenada
    """

    run: Dict[str, Any]
    inputs: Dict[str, Any]
    steps: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    events: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "run": dict(self.run),
            "inputs": dict(self.inputs),
            "steps": {k: dict(v) for k, v in self.steps.items()},
            "events": [dict(e) for e in self.events],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunManifest":
        return cls(
            run=dict(data.get("run", {})),
            inputs=dict(data.get("inputs", {})),
            steps={k: dict(v) for k, v in (data.get("steps", {}) or {}).items()},
            events=[dict(e) for e in (data.get("events", []) or [])],
        )

    # ------------------------------------------------------------------
    # Event Log
    # ------------------------------------------------------------------

    def add_event(
        self,
        *,
        event_type: str,
        ts: datetime,
        step_id: Optional[str] = None,
        payload: Optional[Dict[str, Any]] = None,
    ) -> None:
        """Adiciona exatamente um evento ao final do Event Log."""
        ev: Dict[str, Any] = {"event_type": event_type, "timestamp": _iso(ts)}
        if step_id is not None:
            ev["step_id"] = step_id
        if payload is not None:
            ev["payload"] = _json_safe(payload)
        self.events.append(ev)

    # ------------------------------------------------------------------
    # Estado de Steps
    # ------------------------------------------------------------------

    def step_started(self, *, step_id: str, kind: str, ts: datetime) -> None:
        s = self.steps.setdefault(step_id, {})
        s.update(
            {
                "step_id": step_id,
                "kind": kind,
                "status": "running",
                "started_at": _iso(ts),
            }
        )
        self.add_event(event_type="step_started", ts=ts, step_id=step_id, payload={"kind": kind})

    def step_finished(self, *, step_id: str, ts: datetime, result: StepResult) -> None:
        s = self.steps.setdefault(step_id, {"step_id": step_id})
        started_iso = s.get("started_at")
        started_dt = datetime.fromisoformat(started_iso) if started_iso else ts
        status = result.status.value if hasattr(result.status, "value") else str(result.status)

        s.update(
            {
                "status": status,
                "finished_at": _iso(ts),
                "duration_ms": _ms_between(started_dt, ts),
                "summary": result.summary,
                "metrics": _json_safe(result.metrics or {}),
                "warnings": list(result.warnings or []),
                "artifacts": _json_safe(result.artifacts or {}),
            }
        )
        self.add_event(
            event_type="step_finished",
            ts=ts,
            step_id=step_id,
            payload={"status": status, "duration_ms": s.get("duration_ms", 0)},
        )

    def step_failed(self, *, step_id: str, ts: datetime, error: Dict[str, Any]) -> None:
        s = self.steps.setdefault(step_id, {"step_id": step_id})
        s.update(
            {
                "status": "failed",
                "finished_at": _iso(ts),
                "error": _json_safe(error),
            }
        )
        self.add_event(
            event_type="step_failed",
            ts=ts,
            step_id=step_id,
            payload={"error_type": error.get("type"), "message": error.get("message")},
        )

    def record_step_result(self, result: StepResult, *, ts: datetime) -> None:
        """Despacha o StepResult final para step_finished ou step_failed."""
        if result.status == StepStatus.FAILED:
            error = (result.payload or {}).get("error") or {"type": None, "message": result.summary}
            self.step_failed(step_id=result.step_id, ts=ts, error=error)
        else:
            self.step_finished(step_id=result.step_id, ts=ts, result=result)


def create_manifest(
    *,
    run_id: str,
    started_at: datetime,
    fracgrid_version: str,
    config_hash: str,
    command: Optional[str] = None,
) -> RunManifest:
    """
    Cria o Manifest inicial de uma execução.

    ⚠️ Não emite eventos: o Event Log inicia vazio e só é preenchido por
    chamadas explícitas.
    """
    return RunManifest(
        run={
            "run_id": run_id,
            "started_at": _iso(started_at),
            "fracgrid_version": fracgrid_version,
        },
        inputs={
            "config_hash": config_hash,
            "command": command,
        },
    )


def save_manifest(manifest: RunManifest, path: Path) -> None:
    """Persiste o Manifest em JSON determinístico (chaves ordenadas, indent=2)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(manifest.to_dict(), ensure_ascii=False, indent=2, sort_keys=True),
        encoding="utf-8",
    )


def load_manifest(path: Path) -> RunManifest:
    """Restaura um Manifest salvo por `save_manifest`."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return RunManifest.from_dict(data)
