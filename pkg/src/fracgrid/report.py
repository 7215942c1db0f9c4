"""
Emissão de relatórios de uma run (CSV + texto + manifest).

Responsabilidades:
    - Montar tabelas estáveis (ordem de colunas fixa) a partir dos
      resultados numéricos
    - Escrever os arquivos no diretório de saída com 17 dígitos
      significativos

Arquivos:
    - trajectory.csv      n,t,u,exact,lower,upper
    - certification.txt   chave: valor (inclui nu e rho1)
    - convergence.csv     level,N,h,tau_max,error,order
    - gronwall.txt        um bloco por envelope verificado
    - ml.csv              z,value,branch
    - pde_trajectory.csv  n,t,norm,steady_error,envelope
    - manifest.json       RunManifest serializado

Invariantes:
    - Valores ausentes viram campo vazio no CSV
    - Falhas de I/O levantam ReportWriteError com o caminho
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from fracgrid.core import errors as E
from fracgrid.core.exceptions import ReportWriteError
from fracgrid.core.traceability.manifest import RunManifest, save_manifest
from fracgrid.gronwall import VerificationReport
from fracgrid.schemes import CertificationReport
from fracgrid.solver import Trajectory

FLOAT_FORMAT = "%.17g"

TRAJECTORY_COLUMNS = ["n", "t", "u", "exact", "lower", "upper"]
CONVERGENCE_COLUMNS = ["level", "N", "h", "tau_max", "error", "order"]
ML_COLUMNS = ["z", "value", "branch"]
PDE_COLUMNS = ["n", "t", "norm", "steady_error", "envelope"]

REPORT_FILES = {
    "trajectory": "trajectory.csv",
    "certification": "certification.txt",
    "convergence": "convergence.csv",
    "gronwall": "gronwall.txt",
    "ml": "ml.csv",
    "pde_trajectory": "pde_trajectory.csv",
}

Column = Optional[Union[np.ndarray, Sequence[float]]]


def _fmt(x: Any) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return FLOAT_FORMAT % float(x)
    return str(x)


def _column(values: Column, size: int) -> np.ndarray:
    if values is None:
        return np.full(size, np.nan)
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.size != size:
        raise ValueError(f"column has {arr.size} values, expected {size}")
    return arr


# ---------------------------------------------------------------------------
# Construtores de tabela / texto
# ---------------------------------------------------------------------------

def trajectory_frame(
    traj: Trajectory,
    *,
    exact: Column = None,
    lower: Column = None,
    upper: Column = None,
) -> pd.DataFrame:
    size = len(traj)
    return pd.DataFrame(
        {
            "n": np.arange(size),
            "t": traj.t,
            "u": _column(traj.values, size),
            "exact": _column(exact, size),
            "lower": _column(lower, size),
            "upper": _column(upper, size),
        },
        columns=TRAJECTORY_COLUMNS,
    )


def read_trajectory(path: Union[str, Path]) -> pd.DataFrame:
    """Lê um trajectory.csv; exige as colunas n, t e u."""
    frame = pd.read_csv(path, float_precision="round_trip")
    missing = [c for c in ("n", "t", "u") if c not in frame.columns]
    if missing:
        raise ValueError(f"{path}: missing columns {missing}")
    return frame


def pde_frame(t: np.ndarray, norms: np.ndarray, steady_error: Column = None, envelope: Column = None) -> pd.DataFrame:
    size = len(t)
    return pd.DataFrame(
        {
            "n": np.arange(size),
            "t": np.asarray(t, dtype=float),
            "norm": _column(norms, size),
            "steady_error": _column(steady_error, size),
            "envelope": _column(envelope, size),
        },
        columns=PDE_COLUMNS,
    )


def ml_frame(zs: Iterable[float], values: Iterable[float], branches: Iterable[str]) -> pd.DataFrame:
    return pd.DataFrame({"z": list(zs), "value": list(values), "branch": list(branches)}, columns=ML_COLUMNS)


def certification_lines(report: CertificationReport, *, alpha: Optional[float] = None, scheme: Optional[str] = None) -> List[str]:
    head: List[Tuple[str, Any]] = []
    if scheme is not None:
        head.append(("scheme", scheme))
    if alpha is not None:
        head.append(("alpha", float(alpha)))
    rows: List[Tuple[str, Any]] = head + [
        ("completely_positive", report.is_completely_positive),
        ("resolvent_ok", report.resolvent_ok),
        ("consistent", report.consistent),
        ("b_diagonal_min", report.b_diagonal_min),
        ("b_offdiag_max", report.b_offdiag_max),
        ("row_sum_min", report.row_sum_min),
        ("tolerance", report.tolerance),
        ("nu", report.nu),
        ("rho1", report.rho1),
    ]
    for lam, ok in report.resolvent_checks:
        rows.append((f"resolvent[{_fmt(float(lam))}]", ok))
    for key in ("doubly_monotone", "log_convex", "chi_monotone", "alpha_critical", "inconsistency"):
        value = getattr(report, key)
        if value is not None:
            rows.append((key, value))
    return [f"{k}: {_fmt(v)}" for k, v in rows]


def gronwall_lines(checks: Sequence[Tuple[str, VerificationReport]], notes: Sequence[str] = ()) -> List[str]:
    lines = [f"passed: {_fmt(all(r.passed for _, r in checks))}", f"checks: {len(checks)}"]
    for label, r in checks:
        lines += [
            f"[{label}]",
            f"direction: {r.direction}",
            f"passed: {_fmt(r.passed)}",
            f"max_violation: {_fmt(r.max_violation)}",
            f"worst_index: {r.worst_index}",
            f"checked: {r.checked}",
        ]
    lines += [f"note: {n}" for n in notes]
    return lines


# ---------------------------------------------------------------------------
# Escrita
# ---------------------------------------------------------------------------

def _write(path: Path, writer) -> Path:
    try:
        writer(path)
    except OSError as exc:
        raise ReportWriteError.from_payload(E.report_write_error(path=str(path), reason=str(exc))) from exc
    return path


def write_table(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    """Grava um DataFrame num caminho explícito, no mesmo formato de `emit_report`."""
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ReportWriteError.from_payload(E.report_write_error(path=str(target), reason=str(exc))) from exc
    return _write(target, lambda p: frame.to_csv(p, index=False, float_format=FLOAT_FORMAT, na_rep=""))


def emit_report(
    results: Mapping[str, Any],
    out_dir: Union[str, Path],
    *,
    manifest: Optional[RunManifest] = None,
) -> Dict[str, Path]:
    """
    Escreve cada resultado presente em `results` (chaves de REPORT_FILES:
    DataFrame para CSV, lista de linhas para texto) e o manifest.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ReportWriteError.from_payload(E.report_write_error(path=str(out), reason=str(exc))) from exc

    written: Dict[str, Path] = {}
    for key, filename in REPORT_FILES.items():
        if key not in results or results[key] is None:
            continue
        value = results[key]
        path = out / filename
        if isinstance(value, pd.DataFrame):
            written[key] = write_table(value, path)
        else:
            text = "\n".join(str(line) for line in value) + "\n"
            written[key] = _write(path, lambda p, s=text: p.write_text(s, encoding="utf-8"))
    if manifest is not None:
        written["manifest"] = _write(out / "manifest.json", lambda p: save_manifest(manifest, p))
    return written
