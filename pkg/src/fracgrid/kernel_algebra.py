"""
Álgebra de kernels triangulares (pseudo-convolução).

Um kernel de array (a_{n-j}^n), 1 ≤ j ≤ n ≤ N, é guardado como matriz
triangular inferior densa M com M[n-1, j-1] = a_{n-j}^n. Nessa forma a
pseudo-convolução é o produto matricial, a inversão é uma substituição
progressiva e a ação sobre sequências é um produto matriz-vetor.

Responsabilidades:
    - Construir os kernels I, L e L^(-1)
    - Pseudo-convolução, inversão, kernels complementares e resolventes
    - Comparação com tolerância mista absoluta/relativa
    - Serialização CSV (uma linha por n, colunas a_{n-1}^n … a_0^n)

Decisões arquiteturais:
    - Armazenamento denso triangular no lugar de linhas irregulares:
      scipy.linalg.solve_triangular e o produto BLAS operam direto sobre
      ele; `row(n)` devolve a visão irregular pedida pelos consumidores
    - Diagonal com |a_0^n| < 1e-300 é singular (erro, não inf)
    - O resolvente resolve (I + λA)^T R^T = λA^T sem formar inversas

Invariantes:
    - Entradas acima da diagonal são sempre zero
    - `entry(n, k)` fora do triângulo é erro de contrato
    - Kernels são imutáveis (array somente leitura)
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np
import pandas as pd
from scipy.linalg import solve_triangular

from fracgrid.core import errors as E
from fracgrid.core.exceptions import (
    InvalidParameterError,
    KernelSizeMismatchError,
    SingularKernelError,
)

SINGULAR_THRESHOLD = 1e-300
DEFAULT_ATOL = 1e-14
DEFAULT_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class TriKernel:
    """Kernel triangular inferior N×N; `matrix[n-1, j-1]` = a_{n-j}^n."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=float, copy=True)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise InvalidParameterError.from_payload(
                E.invalid_parameter(name="matrix", value=list(m.shape), expected="matriz quadrada N×N com N >= 1")
            )
        if np.any(np.triu(m, k=1) != 0.0):
            raise InvalidParameterError.from_payload(
                E.invalid_parameter(name="matrix", value="upper", expected="entradas nulas acima da diagonal")
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n_rows(self) -> int:
        return int(self.matrix.shape[0])

    def row(self, n: int) -> np.ndarray:
        """Linha n na ordem (a_{n-1}^n, …, a_0^n)."""
        if not 1 <= n <= self.n_rows:
            raise IndexError(f"row {n} outside 1..{self.n_rows}")
        return self.matrix[n - 1, :n]

    def entry(self, n: int, k: int) -> float:
        """a_k^n, k = n − j (distância à diagonal)."""
        if not (1 <= n <= self.n_rows and 0 <= k < n):
            raise IndexError(f"entry (n={n}, k={k}) outside the triangle of size {self.n_rows}")
        return float(self.matrix[n - 1, n - 1 - k])

    def diagonal(self) -> np.ndarray:
        """(a_0^1, …, a_0^N)."""
        return np.diag(self.matrix).copy()

    def rows(self) -> list:
        return [self.row(n).copy() for n in range(1, self.n_rows + 1)]

    def scaled(self, s: float) -> "TriKernel":
        return TriKernel(s * self.matrix)

    def __matmul__(self, other: "TriKernel") -> "TriKernel":
        return pseudo_convolve(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TriKernel):
            return NotImplemented
        return bool(np.array_equal(self.matrix, other.matrix))

    def __hash__(self) -> int:
        return hash(self.matrix.tobytes())

    # -----------------------------
    # Construção / serialização
    # -----------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "TriKernel":
        """Monta a partir de linhas irregulares; a linha n tem exatamente n entradas."""
        N = len(rows)
        m = np.zeros((N, N))
        for n, r in enumerate(rows, start=1):
            r = np.asarray(r, dtype=float)
            if r.shape != (n,):
                raise InvalidParameterError.from_payload(
                    E.invalid_parameter(name=f"row[{n}]", value=int(r.size), expected=f"exatamente {n} entradas")
                )
            m[n - 1, :n] = r
        return cls(m)

    def to_csv(self, path: Union[str, Path]) -> None:
        frame = pd.DataFrame(np.where(np.tri(self.n_rows, dtype=bool), self.matrix, np.nan))
        frame.to_csv(path, header=False, index=False, na_rep="", float_format="%.17g")

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "TriKernel":
        lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
        N = len(lines)
        if N == 0:
            raise InvalidParameterError.from_payload(
                E.invalid_parameter(name="kernel_csv", value=str(path), expected="pelo menos uma linha")
            )
        frame = pd.read_csv(
            path, header=None, names=list(range(N)), skip_blank_lines=True, dtype=float, float_precision="round_trip"
        )
        values = frame.to_numpy(dtype=float)
        rows = []
        for n in range(1, N + 1):
            r = values[n - 1]
            present = r[~np.isnan(r)]
            if present.size != n or np.any(np.isnan(r[:n])):
                raise InvalidParameterError.from_payload(
                    E.invalid_parameter(name=f"row[{n}]", value=int(present.size), expected=f"exatamente {n} entradas")
                )
            rows.append(r[:n])
        return cls.from_rows(rows)


# ---------------------------------------------------------------------------
# Kernels básicos
# ---------------------------------------------------------------------------

def _check_N(N: int) -> None:
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)) or N < 1:
        raise InvalidParameterError.from_payload(E.invalid_parameter(name="N", value=N, expected="inteiro N >= 1"))


def identity_kernel(N: int) -> TriKernel:
    _check_N(N)
    return TriKernel(np.eye(N))


def heaviside_kernel(N: int) -> TriKernel:
    """L: a_{n-j}^n = 1 para todo j ≤ n."""
    _check_N(N)
    return TriKernel(np.tri(N))


def heaviside_inverse(N: int) -> TriKernel:
    """L^(-1): 1 na diagonal, −1 na primeira subdiagonal (diferença regressiva ∇)."""
    _check_N(N)
    return TriKernel(np.eye(N) - np.eye(N, k=-1))


# ---------------------------------------------------------------------------
# Operações
# ---------------------------------------------------------------------------

def _same_size(operation: str, A: TriKernel, B: TriKernel) -> None:
    if A.n_rows != B.n_rows:
        raise KernelSizeMismatchError.from_payload(
            E.kernel_size_mismatch(operation=operation, left=A.n_rows, right=B.n_rows)
        )


def pseudo_convolve(A: TriKernel, B: TriKernel) -> TriKernel:
    """c_{n-k}^n = Σ_{j=k}^{n} a_{n-j}^n b_{j-k}^j (produto das matrizes triangulares)."""
    _same_size("pseudo_convolve", A, B)
    return TriKernel(np.tril(A.matrix @ B.matrix))


def act(A: TriKernel, x: np.ndarray) -> np.ndarray:
    """
    Ação do kernel sobre uma sequência: (A ̄* x)_n = Σ_j a_{n-j}^n x_j.

    `x` tem N linhas (x_1..x_N); colunas extras são tratadas como
    componentes independentes.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[0] != A.n_rows:
        raise KernelSizeMismatchError.from_payload(
            E.kernel_size_mismatch(operation="act", left=A.n_rows, right=int(x.shape[0]))
        )
    return A.matrix @ x


def _check_diagonal(A: TriKernel) -> None:
    d = np.abs(np.diag(A.matrix))
    bad = np.flatnonzero(d < SINGULAR_THRESHOLD)
    if bad.size:
        n = int(bad[0]) + 1
        raise SingularKernelError.from_payload(
            E.singular_kernel(row=n, diagonal=float(A.matrix[n - 1, n - 1]), threshold=SINGULAR_THRESHOLD)
        )


def invert(A: TriKernel) -> TriKernel:
    """B com A ̄* B = I, por substituição progressiva linha a linha."""
    _check_diagonal(A)
    inv = solve_triangular(A.matrix, np.eye(A.n_rows), lower=True, check_finite=True)
    return TriKernel(np.tril(inv))


def right_complementary(A: TriKernel) -> TriKernel:
    """C_R = A^(-1) ̄* L, de modo que A ̄* C_R = L."""
    return pseudo_convolve(invert(A), heaviside_kernel(A.n_rows))


def left_complementary(A: TriKernel) -> TriKernel:
    """C_L = L ̄* A^(-1). Exposto sem propriedade certificada."""
    return pseudo_convolve(heaviside_kernel(A.n_rows), invert(A))


def resolvent(A: TriKernel, lam: float) -> TriKernel:
    """
    Resolvente discreto R_λ: R_λ + λ R_λ ̄* A = λA.

    Equivale a R_λ (I + λA) = λA; transpondo, (I + λA)^T R_λ^T = λA^T é
    um sistema triangular superior resolvido sem formar (I + λA)^(-1).
    """
    if not (np.isfinite(lam) and lam > 0):
        raise InvalidParameterError.from_payload(E.invalid_parameter(name="lambda", value=lam, expected="lambda > 0"))
    N = A.n_rows
    system = np.eye(N) + lam * A.matrix
    _check_diagonal(TriKernel(system))
    rt = solve_triangular(system, lam * A.matrix.T, lower=True, trans="T")
    return TriKernel(np.tril(rt.T))


def resolvent_residual(R: TriKernel, A: TriKernel, lam: float) -> float:
    """‖R + λ R ̄* A − λA‖_max."""
    _same_size("resolvent_residual", R, A)
    return float(np.max(np.abs(R.matrix + lam * (R.matrix @ A.matrix) - lam * A.matrix)))


# ---------------------------------------------------------------------------
# Comparações
# ---------------------------------------------------------------------------

def _values(x: Union[TriKernel, np.ndarray, float]) -> np.ndarray:
    return x.matrix if isinstance(x, TriKernel) else np.asarray(x, dtype=float)


def allclose_mixed(x, y, *, atol: float = DEFAULT_ATOL, rtol: float = DEFAULT_RTOL) -> bool:
    """|x − y| ≤ atol + rtol·max(|x|, |y|) em todas as entradas."""
    a, b = _values(x), _values(y)
    if a.shape != b.shape:
        return False
    return bool(np.all(np.abs(a - b) <= atol + rtol * np.maximum(np.abs(a), np.abs(b))))


def commutes(R: TriKernel, A: TriKernel, *, atol: float = DEFAULT_ATOL, rtol: float = DEFAULT_RTOL) -> bool:
    """R ̄* A = A ̄* R dentro da tolerância mista (escalada pela maior entrada)."""
    left = pseudo_convolve(R, A).matrix
    right = pseudo_convolve(A, R).matrix
    scale = max(1.0, float(np.max(np.abs(left))))
    return allclose_mixed(left, right, atol=atol * scale, rtol=rtol)
