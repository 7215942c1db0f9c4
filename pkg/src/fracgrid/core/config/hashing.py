"""
Hashing canônico de configuração do fracgrid.

O hash SHA-256 da configuração efetiva é a identidade de uma execução:
a CLI deriva o `run_id` dos 12 primeiros dígitos hexadecimais, de modo
que a mesma configuração (incluindo seeds) produz o mesmo run_id e as
mesmas saídas numéricas.

Política de hashing (v1):
    - Serialização JSON canônica (chaves ordenadas, separadores compactos)
    - Codificação UTF-8
    - SHA-256

Invariantes:
    - Configurações estruturalmente equivalentes produzem o mesmo hash
    - O valor gerado é sempre uma string hexadecimal de 64 caracteres
"""

import hashlib
import json
from typing import Any, Dict


def compute_config_hash(config: Dict[str, Any]) -> str:
    """
    Gera um hash determinístico da configuração efetiva.

    Args:
        config (Dict[str, Any]): Configuração efetiva.

    Returns:
        str: Hash SHA-256 hexadecimal da configuração.

    Raises:
        TypeError: Se o objeto fornecido não for um dicionário.
    """

    if not isinstance(config, dict):
        raise TypeError(
            f"Config para hashing deve ser dict, recebido: {type(config).__name__}"
        )

    canonical_json = json.dumps(
        config,
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=False,
    )

    return hashlib.sha256(canonical_json.encode("utf-8")).hexdigest()


def run_id_from_config(config: Dict[str, Any], *, length: int = 12) -> str:
    """Identificador de run derivado do hash (determinístico)."""
    return "run-" + compute_config_hash(config)[:length]
