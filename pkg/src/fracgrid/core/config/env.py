"""
Parâmetros de runtime lidos do ambiente.

Apenas uma variável é reconhecida: `FRACGRID_THREADS`, o teto de
paralelismo para execuções independentes (níveis de refinamento,
ensaios aleatórios). Solves individuais são sempre sequenciais.
"""

from __future__ import annotations

import os
from typing import Mapping, Optional

from .errors import ConfigError

THREADS_ENV = "FRACGRID_THREADS"


def thread_limit(environ: Optional[Mapping[str, str]] = None) -> int:
    """
    Número máximo de workers para fan-out.

    Default: min(4, os.cpu_count()). Valor presente e inválido (não
    inteiro ou < 1) é erro de configuração, não fallback.
    """
    env = os.environ if environ is None else environ
    raw = env.get(THREADS_ENV)
    if raw is None or not raw.strip():
        return max(1, min(4, os.cpu_count() or 1))
    try:
        value = int(raw.strip())
    except ValueError as e:
        raise ConfigError(f"{THREADS_ENV} deve ser inteiro positivo, recebido: {raw!r}") from e
    if value < 1:
        raise ConfigError(f"{THREADS_ENV} deve ser inteiro positivo, recebido: {raw!r}")
    return value
