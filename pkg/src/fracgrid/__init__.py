"""
fracgrid — discretizações completamente positivas de EDOs fracionárias de Caputo.

Este pacote reúne a álgebra de kernels triangulares, a construção e
certificação de esquemas (L1, forma integral, Crank–Nicolson L1⁺) em
malhas não uniformes, a avaliação de funções de Mittag-Leffler, os
envelopes discretos de Grönwall e duas aplicações dissipativas
(subdifusão e Allen–Cahn fracionário).

Organização:
    - mesh, kernel_algebra, ml_func, schemes, solver, gronwall, pde_apps
      → bibliotecas numéricas puras (sem logging, sem I/O implícito)
    - core/ → configuração, erros canônicos, pipeline, engine e manifest
    - steps/ → um Step por subcomando da CLI
    - cli, report → superfície de linha de comando e emissão de relatórios
"""

__version__ = "0.1.0"

from .kernel_algebra import TriKernel, invert, pseudo_convolve, resolvent  # noqa: E402
from .mesh import Mesh, graded_mesh, random_mesh, uniform_mesh  # noqa: E402
from .ml_func import MLParams, ml  # noqa: E402
from .schemes import SchemeKernel, certify, cn_l1plus_kernel, integral_scheme, l1_kernel  # noqa: E402
from .solver import AffineRhs, FodeProblem, Trajectory, solve  # noqa: E402

__all__ = [
    "__version__",
    "Mesh",
    "uniform_mesh",
    "graded_mesh",
    "random_mesh",
    "TriKernel",
    "pseudo_convolve",
    "invert",
    "resolvent",
    "MLParams",
    "ml",
    "SchemeKernel",
    "l1_kernel",
    "integral_scheme",
    "cn_l1plus_kernel",
    "certify",
    "AffineRhs",
    "FodeProblem",
    "Trajectory",
    "solve",
]
