"""
fracgrid — Canonical Error Structures (v1)

Este módulo define o padrão canônico de erros do fracgrid.
Erros são artefatos de domínio e fazem parte do contrato operacional:
o CLI, o Engine e os relatórios consomem o mesmo payload.

Cada falha numérica relevante (kernel singular, hipótese de Grönwall
violada, Newton sem convergência, malha inválida...) tem um código
estável no catálogo abaixo e uma função de fábrica que fixa mensagem,
detalhes estruturados e dica de correção.

Nenhuma decisão implícita é permitida: um erro nunca é convertido em
fallback silencioso.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict
from typing import Any, Dict, Optional


# ---------------------------------------------------------------------------
# Payload canônico
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FracgridErrorPayload:
    """
    Payload canônico de erro do fracgrid.

    Campos:
    - type: código estável do erro (não é texto livre)
    - message: mensagem curta, humana e objetiva
    - details: dados estruturados relevantes para diagnóstico
    - hint: ação sugerida ao operador (onde corrigir)
    - decision_required: indica que a execução depende de decisão humana
      (por exemplo, trocar o esquema ou refinar a malha).
    """

    type: str
    message: str
    details: Dict[str, Any]
    hint: Optional[str] = None
    decision_required: bool = False

    def to_dict(self) -> Dict[str, Any]:
        """Retorna representação serializável do erro."""
        return asdict(self)


# ---------------------------------------------------------------------------
# Catálogo canônico de tipos de erro (v1)
# ---------------------------------------------------------------------------

# Malha / parâmetros
INVALID_MESH = "INVALID_MESH"
INVALID_PARAMETER = "INVALID_PARAMETER"

# Álgebra de kernels
KERNEL_SIZE_MISMATCH = "KERNEL_SIZE_MISMATCH"
SINGULAR_KERNEL = "SINGULAR_KERNEL"

# Mittag-Leffler / constantes
ML_DOMAIN_ERROR = "ML_DOMAIN_ERROR"
ML_CONVERGENCE_ERROR = "ML_CONVERGENCE_ERROR"
GRID_TOO_COARSE = "GRID_TOO_COARSE"

# Solver
SOLVABILITY_VIOLATION = "SOLVABILITY_VIOLATION"
NEWTON_NON_CONVERGENCE = "NEWTON_NON_CONVERGENCE"

# Grönwall / análise de dados
HYPOTHESIS_VIOLATION = "HYPOTHESIS_VIOLATION"
INSUFFICIENT_DATA = "INSUFFICIENT_DATA"

# Configuração / I/O
CONFIG_INVALID = "CONFIG_INVALID"
REPORT_WRITE_ERROR = "REPORT_WRITE_ERROR"

# Engine / Execução
ENGINE_EXECUTION_ERROR = "ENGINE_EXECUTION_ERROR"
ENGINE_CONFIGURATION_ERROR = "ENGINE_CONFIGURATION_ERROR"


# ---------------------------------------------------------------------------
# Helpers de fábrica
# ---------------------------------------------------------------------------

def invalid_mesh(
    *,
    reason: str,
    details: Optional[Dict[str, Any]] = None,
    hint: str = "Construa a malha com pontos estritamente crescentes a partir de t_0 = 0.",
) -> FracgridErrorPayload:
    return FracgridErrorPayload(
        type=INVALID_MESH,
        message=f"Malha temporal inválida: {reason}",
        details={"reason": reason, **(details or {})},
        hint=hint,
        decision_required=False,
    )


def invalid_parameter(
    *,
    name: str,
    value: Any,
    expected: str,
    hint: Optional[str] = None,
) -> FracgridErrorPayload:
    return FracgridErrorPayload(
        type=INVALID_PARAMETER,
        message=f"Parâmetro '{name}' fora do domínio: esperado {expected}",
        details={"name": name, "value": value, "expected": expected},
        hint=hint or f"Ajuste '{name}' para satisfazer {expected}.",
        decision_required=False,
    )


def kernel_size_mismatch(
    *,
    operation: str,
    left: int,
    right: int,
    hint: str = "Construa ambos os kernels sobre a mesma malha (mesmo N).",
) -> FracgridErrorPayload:
    return FracgridErrorPayload(
        type=KERNEL_SIZE_MISMATCH,
        message=f"Kernels de tamanhos distintos em {operation}: {left} vs {right}",
        details={"operation": operation, "left": left, "right": right},
        hint=hint,
        decision_required=False,
    )


def singular_kernel(
    *,
    row: int,
    diagonal: float,
    threshold: float = 1e-300,
    hint: str = "Verifique a diagonal do kernel; o esquema exige a_0^n > 0 em todas as linhas.",
) -> FracgridErrorPayload:
    return FracgridErrorPayload(
        type=SINGULAR_KERNEL,
        message=f"Kernel singular: diagonal nula na linha n={row}",
        details={"row": row, "diagonal": diagonal, "threshold": threshold},
        hint=hint,
        decision_required=False,
    )


def ml_domain_error(
    *,
    alpha: Any,
    beta: Any,
    reason: str,
    hint: str = "Use 0 < alpha <= 1 e beta > 0 com argumento real finito.",
) -> FracgridErrorPayload:
    return FracgridErrorPayload(
        type=ML_DOMAIN_ERROR,
        message=f"Parâmetros de Mittag-Leffler fora do domínio: {reason}",
        details={"alpha": alpha, "beta": beta, "reason": reason},
        hint=hint,
        decision_required=False,
    )


def ml_convergence_error(
    *,
    alpha: float,
    beta: float,
    z: float,
    branch: str,
    hint: str = "O argumento está fora da faixa validada; reduza |z| ou ajuste a estratégia.",
) -> FracgridErrorPayload:
    return FracgridErrorPayload(
        type=ML_CONVERGENCE_ERROR,
        message=f"Avaliação de Mittag-Leffler não convergiu (ramo {branch})",
        details={"alpha": alpha, "beta": beta, "z": z, "branch": branch},
        hint=hint,
        decision_required=False,
    )


def grid_too_coarse(
    *,
    alpha: float,
    reason: str,
    hint: str = "Refine a grade (mais pontos em s) ou amplie s_max.",
) -> FracgridErrorPayload:
    return FracgridErrorPayload(
        type=GRID_TOO_COARSE,
        message=f"Grade insuficiente para localizar o ponto de transição: {reason}",
        details={"alpha": alpha, "reason": reason},
        hint=hint,
        decision_required=False,
    )


def solvability_violation(
    *,
    step: int,
    lead: float,
    theta_m: float,
    hint: str = "Reduza o passo (aumenta c_0^n) ou a constante de Lipschitz M.",
) -> FracgridErrorPayload:
    return FracgridErrorPayload(
        type=SOLVABILITY_VIOLATION,
        message=f"Condição de solvabilidade violada no passo n={step}: theta*M >= c_0^n",
        details={"step": step, "lead": lead, "theta_m": theta_m},
        hint=hint,
        decision_required=False,
    )


def newton_non_convergence(
    *,
    iterations: int,
    residual: float,
    step: Optional[int] = None,
    hint: str = "Reduza o passo temporal ou forneça o jacobiano analítico.",
) -> FracgridErrorPayload:
    return FracgridErrorPayload(
        type=NEWTON_NON_CONVERGENCE,
        message=f"Newton não convergiu após {iterations} iterações",
        details={"iterations": iterations, "residual": residual, "step": step},
        hint=hint,
        decision_required=False,
    )


def hypothesis_violation(
    *,
    variant: str,
    inequality: str,
    lhs: float,
    rhs: float,
    hint: str = "Escolha a variante de envelope compatível com os dados ou refine a malha.",
) -> FracgridErrorPayload:
    return FracgridErrorPayload(
        type=HYPOTHESIS_VIOLATION,
        message=f"Hipótese do envelope {variant} violada: {inequality}",
        details={"variant": variant, "inequality": inequality, "lhs": lhs, "rhs": rhs},
        hint=hint,
        decision_required=True,
    )


def insufficient_data(
    *,
    what: str,
    required: int,
    available: int,
    hint: str = "Estenda o horizonte T ou aumente N para obter mais pontos na cauda.",
) -> FracgridErrorPayload:
    return FracgridErrorPayload(
        type=INSUFFICIENT_DATA,
        message=f"Dados insuficientes para {what}: {available} < {required}",
        details={"what": what, "required": required, "available": available},
        hint=hint,
        decision_required=False,
    )


def config_invalid(
    *,
    key: str,
    reason: str,
    step: Optional[str] = None,
    hint: str = "Corrija a chave indicada no arquivo de config ou na linha de comando.",
) -> FracgridErrorPayload:
    return FracgridErrorPayload(
        type=CONFIG_INVALID,
        message=f"Invalid config: {key} {reason}",
        details={"key": key, "reason": reason, "step": step},
        hint=hint,
        decision_required=False,
    )


def report_write_error(
    *,
    path: str,
    reason: str,
    hint: str = "Verifique permissões e existência do diretório de saída.",
) -> FracgridErrorPayload:
    return FracgridErrorPayload(
        type=REPORT_WRITE_ERROR,
        message=f"Falha ao escrever relatório em {path}",
        details={"path": path, "reason": reason},
        hint=hint,
        decision_required=False,
    )


def engine_execution_error(
    *,
    step: Optional[str] = None,
    exc_type: Optional[str] = None,
    exc_message: Optional[str] = None,
    hint: str = "Verifique o log de eventos do run para diagnosticar a falha. Nenhum fallback é aplicado automaticamente.",
) -> FracgridErrorPayload:
    return FracgridErrorPayload(
        type=ENGINE_EXECUTION_ERROR,
        message="Falha inesperada durante a execução",
        details={
            "step": step,
            "exc_type": exc_type,
            "exc_message": exc_message,
        },
        hint=hint,
        decision_required=False,
    )


def engine_configuration_error(
    *,
    message: str = "Configuração inválida para execução",
    details: Optional[Dict[str, Any]] = None,
    hint: str = "Revise a configuração dos steps e declare explicitamente as opções necessárias antes de reexecutar.",
) -> FracgridErrorPayload:
    return FracgridErrorPayload(
        type=ENGINE_CONFIGURATION_ERROR,
        message=message,
        details=details or {},
        hint=hint,
        decision_required=False,
    )
