"""
Steps do fracgrid: um Step por subcomando da CLI.

`build_registry()` registra todos; a CLI executa apenas o Step do
subcomando pedido (`STEP_FOR_COMMAND`).
"""

from fracgrid.core.pipeline.registry import StepRegistry

from .allen_cahn import AllenCahnStep
from .certify import CertifyStep
from .convergence import ConvergenceStep
from .gronwall_check import GronwallCheckStep
from .ml_eval import MLEvalStep
from .solve import SolveStep
from .subdiffusion import SubdiffusionStep

STEP_FOR_COMMAND = {
    "certify": "scheme.certify",
    "solve": "fode.solve",
    "gronwall-check": "gronwall.check",
    "ml-eval": "ml.eval",
    "subdiffusion": "pde.subdiffusion",
    "allen-cahn": "pde.allen_cahn",
    "convergence": "pde.convergence",
}


def build_registry() -> StepRegistry:
    registry = StepRegistry()
    for step in (
        CertifyStep(),
        SolveStep(),
        GronwallCheckStep(),
        MLEvalStep(),
        SubdiffusionStep(),
        AllenCahnStep(),
        ConvergenceStep(),
    ):
        registry.add(step)
    return registry


__all__ = [
    "AllenCahnStep",
    "CertifyStep",
    "ConvergenceStep",
    "GronwallCheckStep",
    "MLEvalStep",
    "SolveStep",
    "SubdiffusionStep",
    "STEP_FOR_COMMAND",
    "build_registry",
]
