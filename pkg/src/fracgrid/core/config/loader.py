"""
Loader canônico de configuração do fracgrid.

Este módulo é responsável por carregar, validar estruturalmente e resolver
a configuração efetiva de uma execução.

A configuração é resolvida a partir de:
    - o arquivo de defaults empacotado (`defaults.yaml`, obrigatório)
    - um arquivo local de overrides (opcional)
    - overrides em memória vindos da CLI (aplicados pelo chamador via deep_merge)

Formatos suportados:
    - YAML (.yaml, .yml)
    - JSON (.json)
    - texto plano chave=valor (.txt, .cfg, .conf), com comentários '#'
      e valores interpretados como escalares YAML (`0.5`, `true`, `[32, 64]`)

Princípios fundamentais:
    - Configuração é declarativa e explícita
    - Nenhuma heurística implícita é aplicada
    - Erros estruturais são tratados como falhas fatais
    - A mesma entrada sempre produz a mesma configuração final

Invariantes:
    - O resultado é sempre um dicionário puro (`dict`)
    - Overrides nunca mutam os defaults

Limites explícitos:
    - Não valida semântica numérica (responsabilidade dos Steps)
    - Não persiste configuração ou hash
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any, Dict, Optional

import yaml  # PyYAML

from .errors import (
    DefaultsNotFoundError,
    InvalidConfigLineError,
    InvalidConfigRootTypeError,
    UnsupportedConfigFormatError,
)
from .merge import deep_merge

_FLAT_SUFFIXES = {".txt", ".cfg", ".conf"}


def is_flat_config(path: Path) -> bool:
    """Arquivo chave=valor, decidido pela extensão."""
    return Path(path).suffix.lower() in _FLAT_SUFFIXES


def default_config_path() -> Path:
    """Caminho do `defaults.yaml` empacotado com o fracgrid."""
    return Path(str(resources.files("fracgrid.core.config").joinpath("defaults.yaml")))


def parse_flat_config(text: str) -> Dict[str, Any]:
    """
    Interpreta o formato chave=valor.

    Regras:
        - linhas vazias e linhas iniciadas por '#' são ignoradas
        - '#' após o valor inicia comentário de fim de linha
        - o valor é interpretado com `yaml.safe_load` (números, bool, listas)
        - valor vazio resulta em None
        - a última ocorrência de uma chave prevalece

    Raises:
        InvalidConfigLineError: linha sem '=' ou com chave vazia.
    """
    data: Dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidConfigLineError(f"Linha {lineno}: esperado 'chave=valor', recebido: {raw.strip()!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise InvalidConfigLineError(f"Linha {lineno}: chave vazia")
        value = value.strip()
        data[key] = yaml.safe_load(value) if value else None
    return data


def load_file(path: Path) -> Dict[str, Any]:
    """
    Carrega um arquivo de configuração e valida sua estrutura básica.

    Decisões arquiteturais:
        - O arquivo deve existir no momento do carregamento
        - O conteúdo raiz deve ser um dicionário (`dict`)
        - Arquivos vazios são interpretados como dicionários vazios
        - O formato é decidido pela extensão, nunca pelo conteúdo

    Raises:
        DefaultsNotFoundError: Se o arquivo não existir.
        UnsupportedConfigFormatError: Se o formato do arquivo não for suportado.
        InvalidConfigRootTypeError: Se o conteúdo raiz não for um dicionário.
        InvalidConfigLineError: Linha malformada no formato chave=valor.
    """
    path = Path(path)
    if not path.exists():
        raise DefaultsNotFoundError(f"Arquivo de configuração não encontrado: {path}")

    suffix = path.suffix.lower()

    if suffix in {".yaml", ".yml"}:
        with path.open("r", encoding="utf-8") as f:
            data = yaml.safe_load(f)

    elif suffix == ".json":
        with path.open("r", encoding="utf-8") as f:
            data = json.load(f)

    elif suffix in _FLAT_SUFFIXES:
        data = parse_flat_config(path.read_text(encoding="utf-8"))

    else:
        raise UnsupportedConfigFormatError(f"Formato não suportado: {path.suffix}")

    if data is None:
        data = {}

    if not isinstance(data, dict):
        raise InvalidConfigRootTypeError(
            f"Config root deve ser dict, recebido: {type(data).__name__}"
        )

    return data


def load_config(
    *,
    defaults_path: Optional[str] = None,
    local_path: Optional[str] = None,
) -> Dict[str, Any]:
    """
    Carrega e resolve a configuração efetiva.

    Política de resolução:
        - Sem `defaults_path`, usa o `defaults.yaml` empacotado
        - O arquivo local é opcional; quando presente tem prioridade
        - A resolução utiliza `deep_merge` com política determinística

    Args:
        defaults_path (Optional[str]): Caminho para o arquivo de configuração base.
        local_path (Optional[str]): Caminho opcional para overrides locais.

    Returns:
        Dict[str, Any]: Configuração final resolvida.

    Raises:
        DefaultsNotFoundError: Se o arquivo de defaults não existir.
        UnsupportedConfigFormatError: Se o formato do arquivo não for suportado.
        InvalidConfigRootTypeError: Se o conteúdo não for um dicionário.
        ConfigTypeConflictError: Se ocorrer conflito estrutural durante o merge.
    """
    defaults_file = Path(defaults_path) if defaults_path is not None else default_config_path()
    effective = load_file(defaults_file)

    if local_path is not None:
        local_file = Path(local_path)
        if local_file.exists():
            effective = deep_merge(effective, load_file(local_file))

    return effective
