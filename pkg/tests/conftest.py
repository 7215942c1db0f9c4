# tests/conftest.py
"""
Fixtures compartilhados para testes do fracgrid.

Este módulo define fixtures reutilizáveis que fornecem:
- configurações mínimas e determinísticas
- contexto de execução controlado (RunContext)
- Steps dummy para testes estruturais do Engine
- malhas pequenas (uniforme, graduada, aleatória) para os testes numéricos

Decisões arquiteturais:
    - Fixtures são mantidas simples e explícitas
    - Imports do fracgrid são realizados de forma lazy para
      melhorar a clareza de erros durante falhas
    - Malhas aleatórias sempre recebem seed explícita

Invariantes:
    - Nenhuma fixture executa pipeline real
    - Nenhuma fixture realiza I/O
    - Todas as fixtures são seguras para execução em paralelo

Limites explícitos:
    - Não substituir testes de integração (tests/e2e)
    - Não conter lógica numérica além da construção de malhas
"""

import pytest
from datetime import datetime, timezone


# =====================================================
# Config fixtures
# =====================================================

@pytest.fixture
def project_like_config_defaults_yaml() -> str:
    """
    YAML de defaults semelhante ao `defaults.yaml` empacotado.

    Fornecido como string para evitar I/O; usado pelos testes de loader,
    deep-merge e hashing.
    """
    return """\
engine:
  fail_fast: true
steps:
  scheme.certify:
    enabled: true
    alpha: 0.5
    N: 32
  fode.solve:
    enabled: true
    theta: 1.0
"""


@pytest.fixture
def project_like_config_local_yaml() -> str:
    """YAML de override local (apenas as chaves alteradas)."""
    return """\
steps:
  scheme.certify:
    alpha: 0.3
  fode.solve:
    enabled: false
"""


# =====================================================
# Pipeline fixtures (Step + RunContext)
# =====================================================

@pytest.fixture
def dummy_config() -> dict:
    """
    Configuração mínima e válida, já resolvida.

    Invariantes:
        - `fail_fast` explicitamente habilitado
        - Não depende de filesystem nem de defaults externos
    """
    return {
        "engine": {"fail_fast": True},
        "steps": {"scheme.certify": {"enabled": True}},
    }


@pytest.fixture
def dummy_ctx(dummy_config):
    """
    RunContext determinístico para testes do core.

    `run_id` e `created_at` são fixos; o contexto inicia sem artefatos,
    eventos ou warnings e sem manifest.
    """
    from fracgrid.core.pipeline.context import RunContext

    return RunContext(
        run_id="run-test-001",
        created_at=datetime(2026, 1, 16, 0, 0, 0, tzinfo=timezone.utc),
        config=dummy_config,
        meta={"source": "pytest"},
    )


@pytest.fixture
def DummyStep():
    """
    Fixture factory que fornece uma implementação mínima e duck-typed de um Step.

    Retorna uma *classe* que respeita o protocolo de Step (`id`, `kind`,
    `depends_on`, `run`) sem herança, registra um artefato no RunContext
    e sempre devolve StepResult SUCCESS.

    Usado por:
        - Testes de planner (ordenação, dependências)
        - Testes de engine (execução, status, skip por config)
    """
    from fracgrid.core.pipeline.types import StepKind, StepStatus, StepResult

    class _DummyStep:
        def __init__(
            self,
            step_id: str = "scheme.certify",
            kind: StepKind = StepKind.DIAGNOSTIC,
            depends_on=None,
        ):
            self.id = step_id
            self.kind = kind
            self.depends_on = depends_on or []

        def run(self, ctx):
            ctx.set_artifact(f"{self.id}.ok", True)
            return StepResult(
                step_id=self.id,
                kind=self.kind,
                status=StepStatus.SUCCESS,
                summary="dummy ok",
                metrics={},
                warnings=[],
                artifacts={"ok": f"{self.id}.ok"},
                payload={"note": "dummy"},
            )

    return _DummyStep


# =====================================================
# Numerical fixtures
# =====================================================

@pytest.fixture
def uniform_mesh_16():
    """Malha uniforme em [0, 1] com 16 passos."""
    from fracgrid.mesh import uniform_mesh

    return uniform_mesh(1.0, 16)


@pytest.fixture
def graded_mesh_32():
    """Malha graduada t_n = (n/32)^2 em [0, 1]."""
    from fracgrid.mesh import graded_mesh

    return graded_mesh(1.0, 32, 2.0)


@pytest.fixture
def random_mesh_24():
    """Malha aleatória com razão de passos limitada por 3 (seed fixa)."""
    from fracgrid.mesh import random_mesh

    return random_mesh(1.0, 24, 3.0, 7)
