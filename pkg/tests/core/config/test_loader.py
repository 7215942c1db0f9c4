# tests/core/config/test_loader.py
"""
Testes do loader canônico de configuração.

Este módulo valida `load_config`, `load_file` e `parse_flat_config`:
- defaults ausentes são erro fatal
- config local ausente é opcional
- defaults + local são resolvidos via deep-merge
- o formato chave=valor interpreta escalares YAML e comentários
- raiz não-dict, extensão desconhecida e linha malformada são rejeitadas
- o `defaults.yaml` empacotado contém uma seção por Step

Limites explícitos:
    - Não valida hashing
    - Não valida semântica numérica dos valores
"""

from pathlib import Path

import pytest

try:
    from fracgrid.core.config.loader import (
        default_config_path,
        is_flat_config,
        load_config,
        load_file,
        parse_flat_config,
    )
    from fracgrid.core.config.errors import (
        DefaultsNotFoundError,
        InvalidConfigLineError,
        InvalidConfigRootTypeError,
        UnsupportedConfigFormatError,
    )
    from fracgrid.steps import STEP_FOR_COMMAND
except Exception as e:  # noqa: BLE001
    load_config = None
    _IMPORT_ERR = e
else:
    _IMPORT_ERR = None


def _require_imports():
    if _IMPORT_ERR is not None:
        pytest.fail(
            "Missing config loader APIs. Implement:\n"
            "- src/fracgrid/core/config/loader.py (load_config, load_file, parse_flat_config)\n"
            "- src/fracgrid/core/config/errors.py (typed exceptions)\n"
            f"Import error: {_IMPORT_ERR}"
        )


def test_missing_defaults_raises(tmp_path: Path):
    """Um caminho de defaults inexistente é erro fatal (DefaultsNotFoundError)."""
    _require_imports()
    with pytest.raises(DefaultsNotFoundError):
        load_config(defaults_path=str(tmp_path / "missing.yaml"))


def test_missing_local_is_ok(tmp_path: Path, project_like_config_defaults_yaml):
    _require_imports()
    defaults = tmp_path / "defaults.yaml"
    defaults.write_text(project_like_config_defaults_yaml, encoding="utf-8")
    cfg = load_config(defaults_path=str(defaults), local_path=str(tmp_path / "nope.yaml"))
    assert cfg["steps"]["scheme.certify"]["alpha"] == 0.5


def test_load_defaults_and_local(tmp_path: Path, project_like_config_defaults_yaml, project_like_config_local_yaml):
    """
    O arquivo local tem prioridade e chaves não sobrescritas são preservadas.
    """
    _require_imports()
    defaults = tmp_path / "defaults.yaml"
    local = tmp_path / "local.yaml"
    defaults.write_text(project_like_config_defaults_yaml, encoding="utf-8")
    local.write_text(project_like_config_local_yaml, encoding="utf-8")
    cfg = load_config(defaults_path=str(defaults), local_path=str(local))
    assert cfg["steps"]["scheme.certify"]["alpha"] == 0.3
    assert cfg["steps"]["scheme.certify"]["N"] == 32
    assert cfg["steps"]["fode.solve"]["enabled"] is False
    assert cfg["steps"]["fode.solve"]["theta"] == 1.0


def test_packaged_defaults_cover_every_command():
    """
    O `defaults.yaml` empacotado possui uma seção `steps.<id>` para cada
    subcomando da CLI, todas com `enabled`.
    """
    _require_imports()
    assert default_config_path().is_file()
    cfg = load_config()
    for step_id in STEP_FOR_COMMAND.values():
        assert step_id in cfg["steps"], step_id
        assert "enabled" in cfg["steps"][step_id]
    assert cfg["engine"]["fail_fast"] is True


def test_parse_flat_config_scalars_and_comments():
    """
    chave=valor com valores YAML: números, bool, listas, vazio → None;
    comentários '#' inteiros ou de fim de linha; a última ocorrência vence.
    """
    _require_imports()
    text = """
# malha
alpha = 0.3
N=128   # passos
envelopes = false
levels = [16, 32]
mesh_file =
alpha = 0.4
"""
    cfg = parse_flat_config(text)
    assert cfg == {"alpha": 0.4, "N": 128, "envelopes": False, "levels": [16, 32], "mesh_file": None}


def test_parse_flat_config_rejects_malformed_line():
    """A mensagem inclui o número da linha (1-based)."""
    _require_imports()
    with pytest.raises(InvalidConfigLineError, match="Linha 2"):
        parse_flat_config("alpha=0.5\nsem separador\n")
    with pytest.raises(InvalidConfigLineError):
        parse_flat_config("=0.5\n")


def test_load_file_flat_format(tmp_path: Path):
    _require_imports()
    path = tmp_path / "run.cfg"
    path.write_text("scheme = cn\nN = 16\n", encoding="utf-8")
    assert is_flat_config(path)
    assert not is_flat_config(tmp_path / "run.yaml")
    assert load_file(path) == {"scheme": "cn", "N": 16}


def test_invalid_root_type_raises(tmp_path: Path):
    _require_imports()
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(InvalidConfigRootTypeError):
        load_file(path)


def test_empty_file_is_empty_dict(tmp_path: Path):
    _require_imports()
    path = tmp_path / "empty.json"
    path.write_text("null", encoding="utf-8")
    assert load_file(path) == {}


def test_unsupported_extension_raises(tmp_path: Path):
    """O formato é decidido pela extensão, nunca pelo conteúdo."""
    _require_imports()
    path = tmp_path / "config.toml"
    path.write_text("alpha = 0.5\n", encoding="utf-8")
    with pytest.raises(UnsupportedConfigFormatError):
        load_file(path)
