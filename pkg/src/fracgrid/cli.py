"""
Ponto de entrada de linha de comando do fracgrid.

Uso:
    fracgrid [-v] [--out-dir DIR] [--config FILE] <subcomando> [flags]

Subcomandos: certify, solve, gronwall-check, ml-eval, subdiffusion,
allen-cahn, convergence. Cada um executa exatamente um Step pelo Engine.

Atalhos: --kernel (= --kernel-file; sem --scheme implica external), --mesh
(= --mesh-file), --graded T N r (= --T --N --grading-r) e, em solve,
--out CSV (trajetória num caminho explícito, além do --out-dir).

Resolução de config: defaults.yaml < --config < flags. Arquivos chave=valor
(.txt/.cfg/.conf) valem para a seção do subcomando; YAML/JSON são configs
completas.

Exit codes:
    0 sucesso
    1 verificação reprovada ou falha numérica
    2 erro de uso / configuração / diretório de saída
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from fracgrid import __version__
from fracgrid.core.config import (
    ConfigError,
    compute_config_hash,
    deep_merge,
    is_flat_config,
    load_config,
    load_file,
    run_id_from_config,
)
from fracgrid.core.engine import Engine
from fracgrid.core.errors import CONFIG_INVALID, ENGINE_CONFIGURATION_ERROR
from fracgrid.core.exceptions import ReportWriteError
from fracgrid.core.pipeline.context import RunContext
from fracgrid.core.pipeline.types import StepResult, StepStatus
from fracgrid.core.traceability.manifest import create_manifest
from fracgrid.report import REPORT_FILES, emit_report, write_table
from fracgrid.steps import STEP_FOR_COMMAND, build_registry

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

_USAGE_ERRORS = {CONFIG_INVALID, ENGINE_CONFIGURATION_ERROR}


def _float_list(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated ints, got {text!r}") from None


def _add_mesh_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--T", type=float, dest="T", help="horizonte final")
    p.add_argument("--N", type=int, dest="N", help="número de passos")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--mesh-file", "--mesh", dest="mesh_file", help="malha em texto (um tempo por linha)")
    src.add_argument("--grading-r", type=float, dest="grading_r", help="malha graduada t_n = T (n/N)^r")
    src.add_argument(
        "--graded", nargs=3, type=float, metavar=("T", "N", "r"), help="malha graduada: atalho para --T, --N e --grading-r"
    )
    src.add_argument("--ratio-bound", type=float, dest="ratio_bound", help="malha aleatória com razão de passos limitada")
    p.add_argument("--seed", type=int, help="seed da malha aleatória")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracgrid", description="Completely positive schemes for Caputo FODEs.")
    parser.add_argument("--version", action="version", version=f"fracgrid {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="event log em JSON lines no stderr")
    parser.add_argument("--out-dir", dest="out_dir", help="diretório dos relatórios (CSV/texto/manifest)")
    parser.add_argument("--config", help="arquivo de config (chave=valor, YAML ou JSON)")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("certify", help="certifica positividade completa de um kernel")
    p.add_argument("--alpha", type=float)
    p.add_argument("--scheme", choices=["l1", "integral", "cn", "external"])
    p.add_argument("--kernel-file", "--kernel", dest="kernel_file", help="kernel em CSV; sem --scheme implica external")
    p.add_argument("--kernel-form", dest="kernel_form", choices=["integral", "differential"])
    p.add_argument("--lambdas", type=_float_list)
    _add_mesh_flags(p)

    p = sub.add_parser("solve", help="integra D^α u = f(t, u)")
    p.add_argument("--alpha", type=float)
    p.add_argument("--scheme", choices=["l1", "integral", "cn", "external"])
    p.add_argument("--kernel-file", "--kernel", dest="kernel_file", help="kernel em CSV; sem --scheme implica external")
    p.add_argument("--kernel-form", dest="kernel_form", choices=["integral", "differential"])
    p.add_argument("--rhs", help="'affine:beta,c' ou 'poly:a0,a1,...'")
    p.add_argument("--u0", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--variant", choices=["convex_combo", "combo_point"])
    p.add_argument("--lipschitz", type=float)
    p.add_argument("--no-envelopes", dest="envelopes", action="store_const", const=False)
    p.add_argument("--out", dest="out_file", help="grava o CSV da trajetória neste caminho")
    _add_mesh_flags(p)

    p = sub.add_parser("gronwall-check", help="verifica uma trajetória contra envelopes de Grönwall")
    p.add_argument("trajectory_file", nargs="?", help="trajectory.csv produzido por solve")
    p.add_argument("--alpha", type=float)
    p.add_argument(
        "--variant",
        choices=["sandwich", "uniform", "decay_lower", "decay_upper", "decay_upper_restricted", "growing", "lambda_zero"],
    )
    p.add_argument("--direction", choices=["upper", "lower"])
    for name in ("lam", "c", "v0", "nu", "rho1", "sigma", "mu"):
        p.add_argument(f"--{name}", type=float)

    p = sub.add_parser("ml-eval", help="avalia E_{α,β}(z)")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--z", type=float)
    p.add_argument("--z-min", type=float, dest="z_min")
    p.add_argument("--z-max", type=float, dest="z_max")
    p.add_argument("--points", type=int)

    p = sub.add_parser("subdiffusion", help="subdifusão 1D com Dirichlet homogêneo")
    p.add_argument("--alpha", type=float)
    p.add_argument("--X", type=float, dest="X")
    p.add_argument("--h", type=float)
    p.add_argument("--rhs", choices=["zero", "sine", "bump"])
    p.add_argument("--u0", choices=["zero", "sine", "bump"])
    p.add_argument("--amplitude", type=float)
    _add_mesh_flags(p)

    p = sub.add_parser("allen-cahn", help="Allen–Cahn fracionário 1D no toro")
    p.add_argument("--alpha", type=float)
    p.add_argument("--kappa2", type=float)
    p.add_argument("--modes", type=int)
    p.add_argument("--u0", choices=["zero", "sine", "sine3"])
    p.add_argument("--amplitude", type=float)
    _add_mesh_flags(p)

    p = sub.add_parser("convergence", help="tabela de refinamento da subdifusão")
    p.add_argument("--alpha", type=float)
    p.add_argument("--refine", choices=["time", "space"])
    p.add_argument("--levels", type=_int_list)
    p.add_argument("--X", type=float, dest="X")
    p.add_argument("--h", type=float)
    p.add_argument("--amplitude", type=float)
    _add_mesh_flags(p)
    return parser


_GLOBAL_DESTS = {"command", "verbose", "out_dir", "config", "out_file", "graded"}


def _check_args(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    graded = getattr(args, "graded", None)
    if graded is None:
        return
    if args.T is not None or args.N is not None:
        parser.error("--graded T N r não combina com --T/--N")
    if not float(graded[1]).is_integer():
        parser.error(f"--graded: N precisa ser inteiro, recebido {graded[1]!r}")


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    values = {k: v for k, v in vars(args).items() if k not in _GLOBAL_DESTS and v is not None}
    graded = getattr(args, "graded", None)
    if graded is not None:
        T, N, r = graded
        values.update(T=T, N=int(N), grading_r=r)
    if values.get("kernel_file") and "scheme" not in values:
        values["scheme"] = "external"
    return values


def resolve_config(args: argparse.Namespace) -> Dict[str, Any]:
    """defaults < --config < flags; a chave `steps.<id>` do subcomando recebe os overrides."""
    step_id = STEP_FOR_COMMAND[args.command]
    config = load_config()
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"Arquivo de configuração não encontrado: {path}")
        data = load_file(path)
        if is_flat_config(path):
            data = {"steps": {step_id: data}}
        config = deep_merge(config, data)
    config = deep_merge(config, {"steps": {step_id: _overrides(args)}})
    config = deep_merge(config, {"steps": {step_id: {"enabled": True}}})
    return config


def exit_code(result: StepResult) -> int:
    if result.status == StepStatus.FAILED:
        err = (result.payload or {}).get("error") or {}
        return EXIT_USAGE if err.get("type") in _USAGE_ERRORS else EXIT_FAILED
    if result.status == StepStatus.SUCCESS and result.payload.get("passed") is False:
        return EXIT_FAILED
    return EXIT_OK


def _print_result(result: StepResult, ctx: RunContext) -> None:
    print(f"[{result.status.value}] {result.step_id}: {result.summary}")
    for key in REPORT_FILES:
        art = f"report.{key}"
        if ctx.has_artifact(art) and isinstance(ctx.get_artifact(art), list):
            for line in ctx.get_artifact(art):
                print(line)
    if "passed" in result.payload:
        print(f"passed: {str(result.payload['passed']).lower()}")
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    err = (result.payload or {}).get("error")
    if err:
        print(f"error: {err.get('type')}: {err.get('message')}", file=sys.stderr)
        if err.get("hint"):
            print(f"hint: {err['hint']}", file=sys.stderr)


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _check_args(parser, args)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    step_id = STEP_FOR_COMMAND[args.command]
    try:
        config = resolve_config(args)
    except ConfigError as exc:
        print(f"error: CONFIG_INVALID: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    started = datetime.now(timezone.utc)
    run_id = run_id_from_config(config)
    manifest = create_manifest(
        run_id=run_id,
        started_at=started,
        fracgrid_version=__version__,
        config_hash=compute_config_hash(config),
        command=args.command,
    )
    ctx = RunContext(
        run_id=run_id,
        created_at=started,
        config=config,
        meta={"out_dir": args.out_dir, "command": args.command},
        manifest=manifest,
    )
    step = build_registry().get(step_id)
    result = Engine(steps=[step], ctx=ctx).run().steps[step_id]

    _print_result(result, ctx)
    if args.verbose:
        for event in ctx.events:
            print(json.dumps(event, default=str, sort_keys=True), file=sys.stderr)

    if args.out_dir:
        results = {
            key: ctx.get_artifact(f"report.{key}") for key in REPORT_FILES if ctx.has_artifact(f"report.{key}")
        }
        try:
            emit_report(results, args.out_dir, manifest=manifest)
        except ReportWriteError as exc:
            print(f"error: {exc.error_type}: {exc.message}", file=sys.stderr)
            return EXIT_USAGE
    out_file = getattr(args, "out_file", None)
    if out_file and ctx.has_artifact("report.trajectory"):
        try:
            write_table(ctx.get_artifact("report.trajectory"), out_file)
        except ReportWriteError as exc:
            print(f"error: {exc.error_type}: {exc.message}", file=sys.stderr)
            return EXIT_USAGE
    return exit_code(result)


def main() -> None:  # pragma: no cover
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    sys.exit(run())
