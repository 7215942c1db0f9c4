"""
fracgrid — Canonical Exceptions (v1)

Exceções tipadas levantadas pelas bibliotecas numéricas e pelos Steps.

Objetivo:
- Cada classe corresponde a exatamente um código do catálogo em `core/errors.py`
  (atributo de classe `error_type`)
- O Engine e a CLI convertem qualquer FracgridException em
  FracgridErrorPayload sem inspecionar mensagens
- Evitar ValueError/RuntimeError genéricos nas pré-condições numéricas

Regras:
- Exceções carregam apenas dados estruturados (serializáveis).
- Mensagem, detalhes e dica vêm das fábricas de `core/errors.py`
  via `from_payload`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, ClassVar, Dict, Optional

from fracgrid.core import errors as E


@dataclass(frozen=True)
class FracgridException(Exception):
    """Base class para exceções internas do fracgrid.

    Importante:
    - Sempre carregar dados estruturados em `details`
    - Não embedar stack trace em payloads de erro
    - Mensagem deve ser curta e humana
    """

    error_type: ClassVar[str] = E.ENGINE_EXECUTION_ERROR

    message: str
    details: Dict[str, Any]
    hint: Optional[str] = None
    decision_required: bool = False

    def __str__(self) -> str:  # pragma: no cover
        return self.message

    @classmethod
    def from_payload(cls, payload: E.FracgridErrorPayload) -> "FracgridException":
        return cls(
            message=payload.message,
            details=dict(payload.details),
            hint=payload.hint,
            decision_required=payload.decision_required,
        )

    def to_payload(self) -> E.FracgridErrorPayload:
        return E.FracgridErrorPayload(
            type=self.error_type,
            message=self.message,
            details=dict(self.details),
            hint=self.hint,
            decision_required=self.decision_required,
        )

    def with_details(self, **extra: Any) -> "FracgridException":
        """Nova instância do mesmo tipo com detalhes adicionais."""
        return type(self)(
            message=self.message,
            details={**self.details, **extra},
            hint=self.hint,
            decision_required=self.decision_required,
        )


# ---------------------------------------------------------------------------
# Malha / parâmetros
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InvalidMeshError(FracgridException):
    """Malha não estritamente crescente, T/N inválidos ou razão de passos fora do limite."""

    error_type: ClassVar[str] = E.INVALID_MESH


@dataclass(frozen=True)
class InvalidParameterError(FracgridException):
    """Parâmetro numérico fora do domínio (alpha, theta, lambda, ...)."""

    error_type: ClassVar[str] = E.INVALID_PARAMETER


# ---------------------------------------------------------------------------
# Álgebra de kernels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KernelSizeMismatchError(FracgridException):
    """Operação entre kernels de tamanhos diferentes."""

    error_type: ClassVar[str] = E.KERNEL_SIZE_MISMATCH


@dataclass(frozen=True)
class SingularKernelError(FracgridException):
    """Diagonal nula (ou abaixo do limiar) impede a inversão."""

    error_type: ClassVar[str] = E.SINGULAR_KERNEL


# ---------------------------------------------------------------------------
# Mittag-Leffler / constantes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MLDomainError(FracgridException):
    """Parâmetros (alpha, beta) ou argumento fora do domínio suportado."""

    error_type: ClassVar[str] = E.ML_DOMAIN_ERROR


@dataclass(frozen=True)
class MLConvergenceError(FracgridException):
    """Nenhum ramo de avaliação atingiu a precisão contratada."""

    error_type: ClassVar[str] = E.ML_CONVERGENCE_ERROR


@dataclass(frozen=True)
class GridTooCoarseError(FracgridException):
    """Grade de estimação não delimita o ponto de transição t_*."""

    error_type: ClassVar[str] = E.GRID_TOO_COARSE


# ---------------------------------------------------------------------------
# Solver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SolvabilityError(FracgridException):
    """Pré-condição theta*M < c_0^n violada."""

    error_type: ClassVar[str] = E.SOLVABILITY_VIOLATION


@dataclass(frozen=True)
class NewtonNonConvergenceError(FracgridException):
    """Newton (com fallback de ponto fixo) esgotou as iterações."""

    error_type: ClassVar[str] = E.NEWTON_NON_CONVERGENCE


# ---------------------------------------------------------------------------
# Grönwall / dados
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HypothesisViolationError(FracgridException):
    """Hipótese de um envelope de Grönwall não vale para os parâmetros dados."""

    error_type: ClassVar[str] = E.HYPOTHESIS_VIOLATION


@dataclass(frozen=True)
class InsufficientDataError(FracgridException):
    """Poucos pontos para um ajuste ou estudo."""

    error_type: ClassVar[str] = E.INSUFFICIENT_DATA


# ---------------------------------------------------------------------------
# Configuração / I/O / Engine
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConfigInvalidError(FracgridException):
    """Chave de configuração ausente ou com tipo/valor inválido."""

    error_type: ClassVar[str] = E.CONFIG_INVALID


@dataclass(frozen=True)
class ReportWriteError(FracgridException):
    """Falha de I/O ao emitir relatórios."""

    error_type: ClassVar[str] = E.REPORT_WRITE_ERROR


@dataclass(frozen=True)
class EngineConfigurationError(FracgridException):
    """Configuração inválida ou inconsistente para execução."""

    error_type: ClassVar[str] = E.ENGINE_CONFIGURATION_ERROR


@dataclass(frozen=True)
class EngineExecutionError(FracgridException):
    """Erro inesperado durante execução do Engine (encapsulado)."""

    error_type: ClassVar[str] = E.ENGINE_EXECUTION_ERROR
