"""
Exceções canônicas da camada de configuração do fracgrid.

Este módulo define a hierarquia de exceções utilizadas durante o
carregamento, validação estrutural e resolução de configuração.

As exceções aqui definidas representam violações estruturais
explícitas (arquivo ausente, formato desconhecido, linha malformada,
conflito de tipos), e não erros numéricos.

Princípios fundamentais:
    - Exceções são tipadas e semânticas
    - Erros estruturais são tratados como falhas fatais
    - A CLI mapeia qualquer ConfigError para exit code 2

Invariantes:
    - Todas as exceções de configuração herdam de `ConfigError`
    - Nenhuma exceção representa erro numérico ou de execução de Step

Limites explícitos:
    - Não executa Steps
    - Não realiza fallback ou recovery
"""


class ConfigError(Exception):
    """
    Exceção base para erros relacionados à configuração do fracgrid.

    Todas as exceções levantadas durante carregamento, validação estrutural
    e resolução de configuração devem herdar desta classe.
    """


class DefaultsNotFoundError(ConfigError):
    """
    Exceção levantada quando um arquivo de configuração não é encontrado
    no caminho especificado.

    Decisões arquiteturais:
        - Os defaults empacotados são obrigatórios
        - Um arquivo local passado explicitamente (--config) também deve existir
    """


class UnsupportedConfigFormatError(ConfigError):
    """
    Exceção levantada quando o formato do arquivo de configuração
    não é suportado pelo loader.

    Formatos suportados (v1):
        - YAML (.yaml, .yml)
        - JSON (.json)
        - texto plano chave=valor (.txt, .cfg, .conf)
    """


class InvalidConfigRootTypeError(ConfigError):
    """
    Exceção levantada quando o conteúdo raiz da configuração
    não é um dicionário (`dict`).
    """


class InvalidConfigLineError(ConfigError):
    """
    Exceção levantada quando uma linha do formato chave=valor não
    contém o separador '=' ou possui chave vazia.

    A mensagem inclui o número da linha (1-based) para correção direta.
    """


class ConfigTypeConflictError(ConfigError):
    """
    Exceção levantada quando ocorre conflito de tipos durante o deep-merge.

    Exemplo de conflito:
        - base:     {"engine": {"fail_fast": true}}
        - override: {"engine": "DEBUG"}

    Exceção tolerada: int sobre float é promovido a float, pois o formato
    chave=valor não distingue `1` de `1.0`.
    """
