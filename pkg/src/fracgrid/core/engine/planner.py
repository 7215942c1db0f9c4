# src/fracgrid/core/engine/planner.py
"""
Planejador de execução (DAG).

Valida a estrutura declarada pelos Steps e produz uma ordem topológica
determinística (Kahn com desempate lexicográfico por `step.id`).

Invariantes:
    - Nenhum Step é executado antes de suas dependências
    - A mesma definição produz sempre a mesma ordem

Limites explícitos:
    - Não executa Steps
    - Não interage com RunContext
"""

from __future__ import annotations

import heapq
from typing import Dict, Iterable, List

from fracgrid.core.pipeline.step import Step


class UnknownDependencyError(ValueError):
    """
    Exceção levantada quando um Step referencia uma dependência inexistente.

    Dependências devem ser explícitas e resolvíveis; a validação ocorre
    antes de qualquer execução.
    """


class CycleDetectedError(ValueError):
    """
    Exceção levantada quando o grafo de dependências contém um ciclo.

    Nenhuma execução parcial é permitida em presença de ciclos.
    """


def plan_execution(steps: Iterable[Step]) -> List[Step]:
    """
    Valida e produz uma ordem de execução topológica determinística de Steps.

    Quando múltiplos Steps estão prontos, a escolha segue a ordem
    lexicográfica do `step.id`.

    Args:
        steps (Iterable[Step]): Coleção de Steps declarativos.

    Returns:
        List[Step]: Steps em ordem topológica determinística.

    Raises:
        ValueError: Se algum Step possuir `id` inválido ou duplicado.
        UnknownDependencyError: Se um Step declarar dependência inexistente.
        CycleDetectedError: Se houver ciclo no grafo de dependências.
    """
    by_id: Dict[str, Step] = {}
    for step in steps:
        sid = getattr(step, "id", None)
        if not isinstance(sid, str) or not sid.strip():
            raise ValueError("step.id must be a non-empty string")
        if sid in by_id:
            raise ValueError(f"Duplicate step id: {sid}")
        by_id[sid] = step

    pending: Dict[str, int] = {}
    dependents: Dict[str, List[str]] = {sid: [] for sid in by_id}
    for sid, step in by_id.items():
        required = set(getattr(step, "depends_on", None) or [])
        missing = sorted(required - by_id.keys())
        if missing:
            raise UnknownDependencyError(f"Step '{sid}' depends on unknown step '{missing[0]}'")
        pending[sid] = len(required)
        for dep in required:
            dependents[dep].append(sid)

    ready = [sid for sid, count in pending.items() if count == 0]
    heapq.heapify(ready)
    order: List[Step] = []
    while ready:
        sid = heapq.heappop(ready)
        order.append(by_id[sid])
        for child in dependents[sid]:
            pending[child] -= 1
            if pending[child] == 0:
                heapq.heappush(ready, child)

    if len(order) != len(by_id):
        stuck = sorted(sid for sid, count in pending.items() if count > 0)
        raise CycleDetectedError(f"Cycle detected among steps: {', '.join(stuck)}")
    return order
