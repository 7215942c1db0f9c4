# src/fracgrid/core/pipeline/context.py
"""
Contexto de execução compartilhado.

Este módulo define o `RunContext`, a estrutura canônica utilizada para
compartilhar estado explícito entre Steps durante uma execução do fracgrid
(uma invocação da CLI, um teste de integração).

O RunContext é o único meio permitido de:
    - troca indireta de informações entre Steps (malhas, kernels, trajetórias)
    - registro de logs estruturados de execução
    - coleta de warnings não fatais (ex.: margem de solvabilidade apertada)

Princípios fundamentais:
    - Isolamento por execução (cada run possui seu próprio contexto)
    - Ausência de estado global e de logger global
    - As bibliotecas numéricas nunca recebem o contexto; quem loga são os Steps

Invariantes:
    - Artefatos são indexados por chave explícita
    - Logs sempre incluem `run_id`, `step_id` e timestamp UTC
    - Warnings são agrupados por `step_id`

Limites explícitos:
    - Não executa Steps
    - Não persiste dados automaticamente
    - Não registra eventos no Manifest (responsabilidade do Engine)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import TYPE_CHECKING, Any, Dict, List, Optional

if TYPE_CHECKING:  # pragma: no cover
    from fracgrid.core.traceability.manifest import RunManifest


@dataclass
class RunContext:
    """
    Contexto de execução compartilhado de uma run.

    Consolida identidade da execução (run_id, created_at), configuração
    resolvida, artefatos produzidos, log estruturado e warnings por Step.

    `meta` carrega dados de ambiente da execução (ex.: `out_dir`);
    `manifest`, quando presente, é atualizado pelo Engine.
    """
    run_id: str
    created_at: datetime
    config: Dict[str, Any]
    meta: Dict[str, Any] = field(default_factory=dict)
    manifest: Optional["RunManifest"] = None

    _artifacts: Dict[str, Any] = field(default_factory=dict, init=False, repr=False)
    events: List[Dict[str, Any]] = field(default_factory=list, init=False)
    warnings: Dict[str, List[str]] = field(default_factory=dict, init=False)

    # -----------------------------
    # Artifact store
    # -----------------------------
    def set_artifact(self, key: str, value: Any) -> None:
        self._artifacts[key] = value

    def has_artifact(self, key: str) -> bool:
        return key in self._artifacts

    def get_artifact(self, key: str) -> Any:
        if key not in self._artifacts:
            raise KeyError(key)
        return self._artifacts[key]

    def artifact_keys(self) -> List[str]:
        return sorted(self._artifacts)

    # -----------------------------
    # Logging & warnings
    # -----------------------------
    def log(self, *, step_id: str, level: str, message: str, **extra: Any) -> None:
        event = {
            "run_id": self.run_id,
            "step_id": step_id,
            "level": level,
            "message": message,
            "timestamp": datetime.now(timezone.utc).isoformat(),
        }
        event.update(extra)
        self.events.append(event)

    def add_warning(self, *, step_id: str, message: str) -> None:
        if step_id not in self.warnings:
            self.warnings[step_id] = []
        self.warnings[step_id].append(message)
