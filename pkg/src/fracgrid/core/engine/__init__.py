"""
Engine do fracgrid.

Componentes:
    - planner → ordenação topológica determinística e validações estruturais
    - engine  → execução coordenada de Steps com políticas explícitas
      (enabled por Step, fail_fast, exceção → payload canônico)

Invariantes:
    - Steps só são executados após suas dependências
    - Cada Step é executado no máximo uma vez por run
"""

from .engine import Engine, RunResult
from .planner import CycleDetectedError, UnknownDependencyError, plan_execution

__all__ = [
    "Engine",
    "RunResult",
    "CycleDetectedError",
    "UnknownDependencyError",
    "plan_execution",
]
