# tests/core/mesh/test_mesh.py
"""
Testes das malhas temporais (uniforme, graduada, aleatória).

Este módulo valida:
- os valores fechados de uniform_mesh e graded_mesh
- a rejeição de parâmetros fora do domínio (T, N, r, ratio_bound)
- determinismo e limite de razão de passos de random_mesh
- invariantes estruturais de Mesh (monotonia, soma dos passos, imutabilidade)
- serialização em texto (um tempo por linha)

Invariantes:
    - Soma dos passos = T dentro de 8 unidades de roundoff
    - graded_mesh com r = 1 reproduz uniform_mesh bit a bit
"""

from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

try:
    from fracgrid.core.exceptions import InvalidMeshError, InvalidParameterError
    from fracgrid.mesh import (
        Mesh,
        graded_mesh,
        load_mesh,
        max_step_restriction,
        mesh_from_points,
        optimal_grading,
        random_mesh,
        ratio_slack,
        save_mesh,
        uniform_mesh,
    )
except Exception as e:  # noqa: BLE001
    Mesh = None
    _IMPORT_ERR = e
else:
    _IMPORT_ERR = None


def _require_imports():
    if _IMPORT_ERR is not None:
        pytest.fail(
            "Missing mesh module. Implement:\n"
            "- src/fracgrid/mesh.py (Mesh, uniform_mesh, graded_mesh, random_mesh)\n"
            f"Import error: {_IMPORT_ERR}"
        )


def test_uniform_mesh_points():
    _require_imports()
    m = uniform_mesh(1.0, 4)
    np.testing.assert_array_equal(m.points, [0.0, 0.25, 0.5, 0.75, 1.0])
    assert m.N == 4 and m.T == 1.0 and len(m) == 5
    np.testing.assert_array_equal(uniform_mesh(2.0, 1).points, [0.0, 2.0])
    np.testing.assert_allclose(uniform_mesh(1.0, 3).steps, 1.0 / 3.0, rtol=1e-15)


def test_graded_mesh_points():
    """
    Forma fechada t_n = T (n/N)^r; r = 1 é a malha uniforme bit a bit.
    """
    _require_imports()
    np.testing.assert_array_equal(graded_mesh(1.0, 2, 2.0).points, [0.0, 0.25, 1.0])
    assert graded_mesh(1.0, 4, 1.0) == uniform_mesh(1.0, 4)
    assert graded_mesh(1.0, 4, 3.0).points[1] == 0.015625
    assert optimal_grading(0.5) == 3.0


@pytest.mark.parametrize(
    "call",
    [
        lambda: uniform_mesh(0.0, 4),
        lambda: uniform_mesh(-1.0, 4),
        lambda: uniform_mesh(1.0, 0),
        lambda: uniform_mesh(1.0, 2.5),
        lambda: graded_mesh(1.0, 4, 0.5),
        lambda: random_mesh(1.0, 4, 0.5, 0),
    ],
)
def test_invalid_parameters_rejected(call):
    _require_imports()
    with pytest.raises(InvalidParameterError):
        call()


def test_mesh_validation_errors():
    """
    t_0 ≠ 0, pontos não crescentes, não finitos ou < 2 pontos: INVALID_MESH
    com o índice ofensor nos detalhes.
    """
    _require_imports()
    with pytest.raises(InvalidMeshError):
        Mesh(np.array([0.1, 0.5, 1.0]))
    with pytest.raises(InvalidMeshError) as info:
        Mesh(np.array([0.0, 0.5, 0.5, 1.0]))
    assert info.value.details["n"] == 2
    with pytest.raises(InvalidMeshError):
        Mesh(np.array([0.0, np.inf]))
    with pytest.raises(InvalidMeshError):
        Mesh(np.array([0.0]))


def test_mesh_is_immutable_and_steps_exact():
    _require_imports()
    m = graded_mesh(1.0, 8, 2.0)
    with pytest.raises(ValueError):
        m.points[1] = 0.3
    for n in range(1, m.N + 1):
        assert m.tau(n) == m.points[n] - m.points[n - 1]
    with pytest.raises(IndexError):
        m.tau(0)


def test_random_mesh_trivial_cases():
    _require_imports()
    np.testing.assert_array_equal(random_mesh(1.0, 1, 5.0, 3).points, [0.0, 1.0])
    assert random_mesh(1.0, 8, 1.0, 0) == uniform_mesh(1.0, 8)


def test_random_mesh_is_deterministic():
    _require_imports()
    a = random_mesh(1.0, 8, 10.0, 7)
    b = random_mesh(1.0, 8, 10.0, 7)
    assert a == b
    assert a != random_mesh(1.0, 8, 10.0, 8)


@settings(max_examples=60, deadline=None)
@given(
    N=st.integers(min_value=2, max_value=64),
    ratio_bound=st.floats(min_value=1.0, max_value=100.0),
    seed=st.integers(min_value=0, max_value=2**31 - 1),
    T=st.floats(min_value=1e-3, max_value=1e3),
)
def test_random_mesh_properties(N, ratio_bound, seed, T):
    """
    Razões em [1/R, R] (a menos do roundoff da subtração), t_N = T exato,
    monotonia estrita e soma dos passos igual a T dentro do roundoff.
    """
    _require_imports()
    m = random_mesh(T, N, ratio_bound, seed)
    assert m.N == N
    assert m.points[-1] == T
    assert np.all(m.steps > 0)
    r = m.ratios()
    slack = ratio_slack(m)
    assert np.all(r <= ratio_bound * (1 + slack))
    assert np.all(r >= (1 / ratio_bound) * (1 - slack))
    assert abs(float(np.sum(m.steps)) - T) <= 8 * np.finfo(float).eps * T * N
    assert float(m.steps.max() / m.steps.min()) <= 1e4 * (1 + 1e-6)


@settings(max_examples=40, deadline=None)
@given(
    N=st.integers(min_value=1, max_value=200),
    r=st.floats(min_value=1.0, max_value=6.0),
)
def test_graded_mesh_properties(N, r):
    _require_imports()
    m = graded_mesh(1.0, N, r)
    assert m.points[-1] == 1.0
    assert np.all(np.diff(m.points) > 0)
    assert abs(float(np.sum(m.steps)) - 1.0) <= 8 * np.finfo(float).eps * N


def test_text_round_trip(tmp_path: Path, random_mesh_24):
    """
    Um tempo por linha com 17 dígitos; comentários '#' e linhas em
    branco são ignorados na leitura.
    """
    _require_imports()
    path = tmp_path / "mesh.txt"
    save_mesh(random_mesh_24, path)
    assert load_mesh(path) == random_mesh_24
    assert Mesh.from_text("# malha\n0\n\n0.5\n1.0  # fim\n") == mesh_from_points([0.0, 0.5, 1.0])


def test_max_step_restriction(uniform_mesh_16):
    _require_imports()
    assert max_step_restriction(uniform_mesh_16, 2.0, 0.5) == pytest.approx(2.0 * (1 / 16) ** 0.5)
