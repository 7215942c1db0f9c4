"""
# Pipeline Core — fracgrid

Contratos canônicos de execução:

- **types**: `StepStatus`, `StepKind`, `StepResult`
- **step**: `Step` (Protocol)
- **context**: `RunContext` (artefatos, log estruturado, warnings)
- **registry**: `StepRegistry` (unicidade de `step.id`)

Steps não conhecem o Engine; dependências são explícitas; estado
compartilhado passa apenas pelo RunContext.
"""

from .context import RunContext
from .registry import DuplicateStepIdError, StepRegistry
from .step import Step
from .types import StepKind, StepResult, StepStatus

__all__ = [
    "RunContext",
    "DuplicateStepIdError",
    "StepRegistry",
    "Step",
    "StepKind",
    "StepResult",
    "StepStatus",
]
