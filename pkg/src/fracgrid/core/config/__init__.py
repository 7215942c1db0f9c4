"""
Camada de configuração do fracgrid.

Responsabilidades do pacote:
    - Carregamento de arquivos de configuração (defaults empacotados + overrides)
    - Resolução da configuração final via deep-merge determinístico
    - Geração de hash canônico (identidade e run_id de uma execução)
    - Leitura do teto de paralelismo (`FRACGRID_THREADS`)

Princípios fundamentais:
    - Configuração não contém lógica numérica
    - Overrides são sempre explícitos
    - A mesma entrada sempre produz a mesma configuração final
"""

from .env import THREADS_ENV, thread_limit
from .errors import (
    ConfigError,
    ConfigTypeConflictError,
    DefaultsNotFoundError,
    InvalidConfigLineError,
    InvalidConfigRootTypeError,
    UnsupportedConfigFormatError,
)
from .hashing import compute_config_hash, run_id_from_config
from .loader import default_config_path, is_flat_config, load_config, load_file, parse_flat_config
from .merge import deep_merge

__all__ = [
    "THREADS_ENV",
    "thread_limit",
    "ConfigError",
    "ConfigTypeConflictError",
    "DefaultsNotFoundError",
    "InvalidConfigLineError",
    "InvalidConfigRootTypeError",
    "UnsupportedConfigFormatError",
    "compute_config_hash",
    "run_id_from_config",
    "default_config_path",
    "is_flat_config",
    "load_config",
    "load_file",
    "parse_flat_config",
    "deep_merge",
]
