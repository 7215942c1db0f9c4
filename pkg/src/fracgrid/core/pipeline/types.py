# src/fracgrid/core/pipeline/types.py
"""
Tipos canônicos do pipeline do fracgrid.

Componentes principais:
    - StepStatus → enum de estados finais (SUCCESS, SKIPPED, FAILED)
    - StepKind   → enum de classificação semântica de Steps
    - StepResult → estrutura imutável de resultado de execução

Princípios fundamentais:
    - Tipos são estáveis e serializáveis (valores textuais)
    - Nenhuma lógica de execução vive neste módulo

Invariantes:
    - StepResult é imutável; o Engine enriquece via `dataclasses.replace`
    - `payload["passed"]`, quando presente, é o veredito de verificação
      consumido pela CLI para o exit code
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List


class StepKind(str, Enum):
    """
    Tipos semânticos de Steps.

    Tipos definidos:
        - DIAGNOSTIC: inspeções sem integração temporal (certify, ml-eval)
        - SOLVE: integração temporal (solve, subdiffusion, allen-cahn)
        - VERIFY: verificação de trajetórias contra envelopes (gronwall-check)
        - STUDY: estudos de refinamento (convergence)
        - EXPORT: materialização de relatórios

    O `kind` é informativo; o Engine não o usa para decidir execução.
    """
    DIAGNOSTIC = "diagnostic"
    SOLVE = "solve"
    VERIFY = "verify"
    STUDY = "study"
    EXPORT = "export"


class StepStatus(str, Enum):
    """
    Estados finais possíveis da execução de um Step.

        - SUCCESS: execução concluída (mesmo que a verificação reprove)
        - SKIPPED: pulada por config ou dependência falha
        - FAILED: interrompida por erro
    """
    SUCCESS = "success"
    SKIPPED = "skipped"
    FAILED = "failed"


@dataclass(frozen=True)
class StepResult:
    """
    Resultado imutável da execução de um Step.

    Campos:
        - step_id: identificador único do Step
        - kind: tipo semântico do Step
        - status: estado final da execução
        - summary: resumo textual
        - metrics: escalares produzidos (erros máximos, ordens, constantes)
        - warnings: avisos não fatais
        - artifacts: chaves do RunContext / caminhos produzidos
        - payload: dados adicionais livres (inclui `error` em falhas)
    """
    step_id: str
    kind: StepKind
    status: StepStatus
    summary: str
    metrics: Dict[str, Any] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)
    artifacts: Dict[str, Any] = field(default_factory=dict)
    payload: Dict[str, Any] = field(default_factory=dict)
