# tests/core/traceability/test_manifest.py
"""
Testes do Manifest v1 (traceability).

Os testes asseguram que:
- `create_manifest` produz os campos mínimos sem eventos implícitos
- o Event Log preserva a ordem de inserção
- transições de Step (started → finished / failed) consolidam estado
- métricas numpy e não finitas são convertidas para JSON
- o Manifest sobrevive a save/load sem perda estrutural

Limites explícitos:
    - Não valida integração com o Engine (ver tests/core/engine)
"""

import json
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import pytest

try:
    from fracgrid.core.pipeline.types import StepKind, StepResult, StepStatus
    from fracgrid.core.traceability.manifest import (
        RunManifest,
        create_manifest,
        load_manifest,
        save_manifest,
    )
except Exception as e:  # noqa: BLE001
    create_manifest = None
    _IMPORT_ERR = e
else:
    _IMPORT_ERR = None


def _require_imports():
    if _IMPORT_ERR is not None:
        pytest.fail(
            "Missing manifest module. Implement:\n"
            "- src/fracgrid/core/traceability/manifest.py\n"
            "Expected exports: create_manifest, save_manifest, load_manifest, RunManifest\n"
            f"Import error: {_IMPORT_ERR}"
        )


def _manifest(run_id: str = "run-001"):
    return create_manifest(
        run_id=run_id,
        started_at=datetime(2026, 1, 16, 12, 0, 0, tzinfo=timezone.utc),
        fracgrid_version="0.0.0",
        config_hash="c" * 64,
        command="solve",
    )


def test_create_manifest_has_minimum_fields():
    """
    Campos obrigatórios presentes; Event Log e steps começam vazios.
    """
    _require_imports()
    m = _manifest()
    assert isinstance(m, RunManifest)
    data = m.to_dict()
    assert data["run"]["run_id"] == "run-001"
    assert data["run"]["started_at"].startswith("2026-01-16T12:00:00")
    assert data["run"]["fracgrid_version"] == "0.0.0"
    assert data["inputs"] == {"config_hash": "c" * 64, "command": "solve"}
    assert data["steps"] == {}
    assert data["events"] == []


def test_naive_timestamp_is_assumed_utc():
    _require_imports()
    m = create_manifest(
        run_id="r",
        started_at=datetime(2026, 1, 16, 12, 0, 0),
        fracgrid_version="0.0.0",
        config_hash="c" * 64,
    )
    assert m.run["started_at"].endswith("+00:00")


def test_event_log_appends_ordered_events():
    _require_imports()
    m = _manifest()
    t0 = datetime(2026, 1, 16, 12, 0, 0, tzinfo=timezone.utc)
    t1 = datetime(2026, 1, 16, 12, 0, 1, tzinfo=timezone.utc)
    m.add_event(event_type="run_started", ts=t0, payload={"note": "begin"})
    m.add_event(event_type="step_started", ts=t1, step_id="fode.solve", payload={"kind": "solve"})
    assert [e["event_type"] for e in m.events] == ["run_started", "step_started"]
    assert m.events[1]["step_id"] == "fode.solve"
    assert "step_id" not in m.events[0]


def test_incremental_step_update_records_status_and_metrics():
    """
    step_started → step_finished consolida status, duração, warnings,
    artefatos e métricas (escalares numpy viram tipos Python).
    """
    _require_imports()
    m = _manifest()
    t0 = datetime(2026, 1, 16, 12, 0, 1, tzinfo=timezone.utc)
    t1 = datetime(2026, 1, 16, 12, 0, 3, tzinfo=timezone.utc)
    m.step_started(step_id="fode.solve", kind="solve", ts=t0)
    result = StepResult(
        step_id="fode.solve",
        kind=StepKind.SOLVE,
        status=StepStatus.SUCCESS,
        summary="ok",
        metrics={"max_error": np.float64(2.5e-3), "N": np.int64(64), "order": float("nan")},
        warnings=["w1"],
        artifacts={"trajectory": "report.trajectory"},
    )
    m.record_step_result(result, ts=t1)
    s = m.steps["fode.solve"]
    assert s["status"] == "success"
    assert s["duration_ms"] == 2000
    assert s["warnings"] == ["w1"]
    assert s["artifacts"] == {"trajectory": "report.trajectory"}
    assert s["metrics"]["max_error"] == 2.5e-3
    assert type(s["metrics"]["N"]) is int
    assert s["metrics"]["order"] == "nan"
    json.dumps(m.to_dict())


def test_failed_step_is_recorded():
    _require_imports()
    m = _manifest()
    t0 = datetime(2026, 1, 16, 12, 1, 0, tzinfo=timezone.utc)
    m.step_started(step_id="pde.allen_cahn", kind="solve", ts=t0)
    result = StepResult(
        step_id="pde.allen_cahn",
        kind=StepKind.SOLVE,
        status=StepStatus.FAILED,
        summary="Newton não convergiu",
        payload={"error": {"type": "NEWTON_NON_CONVERGENCE", "message": "Newton não convergiu"}},
    )
    m.record_step_result(result, ts=t0)
    assert m.steps["pde.allen_cahn"]["status"] == "failed"
    assert m.steps["pde.allen_cahn"]["error"]["type"] == "NEWTON_NON_CONVERGENCE"
    assert m.events[-1]["event_type"] == "step_failed"
    assert m.events[-1]["payload"]["error_type"] == "NEWTON_NON_CONVERGENCE"


def test_round_trip_save_load(tmp_path: Path):
    """
    save_manifest grava JSON determinístico; load_manifest reconstrói o
    mesmo dicionário.
    """
    _require_imports()
    m = _manifest("run-004")
    m.add_event(event_type="note", ts=datetime(2026, 1, 16, tzinfo=timezone.utc))
    out = tmp_path / "nested" / "manifest.json"
    save_manifest(m, out)
    assert out.exists()
    loaded = load_manifest(out)
    assert loaded.to_dict() == m.to_dict()
    text = out.read_text(encoding="utf-8")
    assert text == json.dumps(m.to_dict(), ensure_ascii=False, indent=2, sort_keys=True)
