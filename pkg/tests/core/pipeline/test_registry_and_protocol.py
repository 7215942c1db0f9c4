# tests/core/pipeline/test_registry_and_protocol.py
"""
Testes do contrato de Step e do StepRegistry.

Este módulo valida que:
- Steps duck-typed satisfazem o Protocol `Step` (@runtime_checkable)
- o registry rejeita ids duplicados ou vazios e preserva a ordem
- o registry real do fracgrid contém um Step por subcomando da CLI

Limites explícitos:
    - Não executa Steps reais (ver tests/core/steps)
"""

import pytest

try:
    from fracgrid.core.pipeline.registry import DuplicateStepIdError, StepRegistry
    from fracgrid.core.pipeline.step import Step
    from fracgrid.core.pipeline.types import StepKind, StepResult
    from fracgrid.steps import STEP_FOR_COMMAND, build_registry
except Exception as e:  # noqa: BLE001
    StepRegistry = None
    _IMPORT_ERR = e
else:
    _IMPORT_ERR = None


def _require_imports():
    if _IMPORT_ERR is not None:
        pytest.fail(
            "Missing pipeline core modules. Implement:\n"
            "- src/fracgrid/core/pipeline/{types,step,registry}.py\n"
            "- src/fracgrid/steps/__init__.py (build_registry, STEP_FOR_COMMAND)\n"
            f"Import error: {_IMPORT_ERR}"
        )


def test_dummy_step_satisfies_protocol(DummyStep, dummy_ctx):
    _require_imports()
    step = DummyStep(step_id="scheme.certify", kind=StepKind.DIAGNOSTIC)
    assert isinstance(step, Step), "DummyStep must satisfy Step Protocol (@runtime_checkable expected)."
    result = step.run(dummy_ctx)
    assert isinstance(result, StepResult)
    assert result.step_id == "scheme.certify"


def test_registry_rejects_duplicate_step_id(DummyStep):
    _require_imports()
    reg = StepRegistry()
    reg.add(DummyStep(step_id="fode.solve"))
    with pytest.raises(DuplicateStepIdError):
        reg.add(DummyStep(step_id="fode.solve"))
    with pytest.raises(ValueError):
        reg.add(DummyStep(step_id=""))


def test_registry_preserves_order(DummyStep):
    _require_imports()
    reg = StepRegistry()
    reg.add(DummyStep(step_id="pde.subdiffusion"))
    reg.add(DummyStep(step_id="fode.solve"))
    assert reg.ids() == ["pde.subdiffusion", "fode.solve"]
    assert [s.id for s in reg.list()] == ["pde.subdiffusion", "fode.solve"]
    assert reg.get("fode.solve").id == "fode.solve"


def test_fracgrid_registry_covers_every_command():
    """
    Cada subcomando mapeia para um Step registrado que satisfaz o
    Protocol e declara um StepKind.
    """
    _require_imports()
    reg = build_registry()
    assert sorted(reg.ids()) == sorted(STEP_FOR_COMMAND.values())
    for step in reg.list():
        assert isinstance(step, Step)
        assert isinstance(step.kind, StepKind)
        assert step.depends_on == []
