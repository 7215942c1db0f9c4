# tests/core/pipeline/test_run_context.py
"""
Testes do RunContext: artifact store, log estruturado e warnings.

Invariantes:
    - Artefatos são indexados por chave explícita; chave ausente é KeyError
    - Cada evento de log carrega run_id, step_id, level, message e timestamp
    - Warnings são agrupados por step_id, na ordem de registro
    - Contextos distintos não compartilham estado
"""

from datetime import datetime, timezone

import pytest

try:
    from fracgrid.core.pipeline.context import RunContext
except Exception as e:  # noqa: BLE001
    RunContext = None
    _IMPORT_ERR = e
else:
    _IMPORT_ERR = None


def _require_imports():
    if _IMPORT_ERR is not None:
        pytest.fail(
            "Missing RunContext. Implement:\n"
            "- src/fracgrid/core/pipeline/context.py (RunContext)\n"
            f"Import error: {_IMPORT_ERR}"
        )


def test_artifact_set_get(dummy_ctx):
    _require_imports()
    dummy_ctx.set_artifact("mesh", [0.0, 0.5, 1.0])
    assert dummy_ctx.has_artifact("mesh") is True
    assert dummy_ctx.get_artifact("mesh") == [0.0, 0.5, 1.0]
    assert dummy_ctx.artifact_keys() == ["mesh"]


def test_artifact_missing_key_raises(dummy_ctx):
    _require_imports()
    with pytest.raises(KeyError):
        dummy_ctx.get_artifact("report.trajectory")


def test_context_isolation(dummy_config):
    """Artefatos e eventos de uma run não vazam para outra."""
    _require_imports()
    t = datetime(2026, 1, 16, tzinfo=timezone.utc)
    ctx1 = RunContext(run_id="r1", created_at=t, config=dummy_config)
    ctx2 = RunContext(run_id="r2", created_at=t, config=dummy_config)
    ctx1.set_artifact("x", 1)
    ctx1.log(step_id="s", level="info", message="m")
    assert ctx2.has_artifact("x") is False
    assert ctx2.events == []
    assert ctx2.meta == {} and ctx2.manifest is None


def test_structured_log_event(dummy_ctx):
    """
    Campos extras (métricas) são anexados ao evento sem sobrescrever
    os campos canônicos.
    """
    _require_imports()
    dummy_ctx.log(step_id="fode.solve", level="info", message="solved", max_error=1.5e-4, N=64)
    ev = dummy_ctx.events[-1]
    assert ev["run_id"] == dummy_ctx.run_id
    assert ev["step_id"] == "fode.solve"
    assert ev["level"] == "info"
    assert ev["message"] == "solved"
    assert ev["max_error"] == 1.5e-4
    assert ev["N"] == 64
    assert datetime.fromisoformat(ev["timestamp"]).tzinfo is not None


def test_warning_collection(dummy_ctx):
    _require_imports()
    dummy_ctx.add_warning(step_id="fode.solve", message="w1")
    dummy_ctx.add_warning(step_id="fode.solve", message="w2")
    dummy_ctx.add_warning(step_id="pde.allen_cahn", message="w3")
    assert dummy_ctx.warnings == {"fode.solve": ["w1", "w2"], "pde.allen_cahn": ["w3"]}
