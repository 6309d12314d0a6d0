"""
Command-line front end: parses a subcommand, resolves its configuration,
dispatches to the experiment runner and writes the run manifest.

Exit codes: 0 when the run passes its checks, 1 when a check fails, 2 on
usage errors. Configuration errors are caught before any artifact is written.
"""

import argparse
import time
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence

from pydantic import ValidationError

from src.cli_runner.config import RunConfig, resolve_config
from src.core_tools.errors import BudgetExceededError, LabError, ParameterRangeError, UsageError, VerificationFailure
from src.core_tools.logger import LabLogger, configure_logging
from src.core_tools.settings import get_settings
from src.chaos_calculus.main import run_verify_chaos
from src.counting_lab.main import run_verify_counting
from src.counting_lab.sine_cancellation import DECAY_SCALES
from src.gibbs_invariance.main import run_gibbs_sample, run_invariance
from src.potential_renorm.main import run_dump_renorm
from src.spacetime_norms.main import run_norms
from src.tensor_lab.main import run_verify_tensors
from src.wave_dynamics.main import run_regularity, run_simulate

logger = LabLogger("CLI")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _scales(text: str) -> tuple:
    try:
        values = tuple(int(x) for x in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"scales look like 4x4x4, got {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"scales must be positive, got {text!r}")
    return values


def _ladder_item(text: str) -> tuple:
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"ladder overrides look like eta=0.01, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"ladder value for {name!r} is not a number") from None


def _add(parser: argparse.ArgumentParser, *names: str, **kwargs):
    parser.add_argument(*names, default=argparse.SUPPRESS, **kwargs)


def _common(parser: argparse.ArgumentParser):
    _add(parser, "--seed", type=int, help="seed of the root random stream (env HARTREE_LAB_SEED)")
    _add(parser, "--out", type=Path, help="output directory (default <output_dir>/<command>-s<seed>)")
    _add(parser, "--workers", type=int, help="worker threads")
    parser.add_argument("--config", type=Path, default=None, help="flat key = value TOML file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hartree-lab", description="Truncated Hartree wave equation lab")
    parser.add_argument("--log-level", default=None, type=str.upper,
                        choices=("DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"),
                        help="override HARTREE_LAB_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate one trajectory and record the energy")
    _common(p)
    for flag, kind in (("--N", int), ("--beta", float), ("--h", float), ("--T", float), ("--record-every", int)):
        _add(p, flag, type=kind)

    p = sub.add_parser("regularity", help="ensemble C^s fits of the free field, cubic object and remainder")
    _common(p)
    for flag, kind in (("--N", int), ("--beta", float), ("--h", float), ("--T", float), ("--samples", int),
                       ("--gff-radius", int)):
        _add(p, flag, type=kind)

    p = sub.add_parser("verify-counting", help="counting estimates, frequency scales and sine cancellation")
    _common(p)
    _add(p, "--lemma", dest="lemmas", action="append", help="catalogue id (repeatable)")
    _add(p, "--scales", type=_scales, action="append", help="scale tuple such as 4x4x4 (repeatable)")
    _add(p, "--sine-scales", type=int, nargs="+")
    _add(p, "--trials", type=int)
    _add(p, "--budget", type=int)

    p = sub.add_parser("verify-chaos", help="Ito isometry, product formulas and hypercontractivity")
    _common(p)
    _add(p, "--samples", type=int)

    p = sub.add_parser("verify-tensors", help="deterministic tensor estimates and the moment method")
    _common(p)
    _add(p, "--which", action="append", choices=("first", "second"))
    _add(p, "--scales", type=_scales, action="append")
    _add(p, "--ps", type=int, nargs="*")
    for flag, kind in (("--beta", float), ("--trials", int), ("--samples", int), ("--budget", int)):
        _add(p, flag, type=kind)
    _add(p, "--ladder", type=_ladder_item, action="append", help="parameter override such as eta=0.01")

    p = sub.add_parser("norms", help="windowed X^{s,b} norms")
    _common(p)
    for flag, kind in (("--grid-radius", int), ("--T", float), ("--h", float), ("--padding", int)):
        _add(p, flag, type=kind)
    _add(p, "--s-values", type=float, nargs="+")
    _add(p, "--b-values", type=float, nargs="+")

    p = sub.add_parser("gibbs-sample", help="pCN chain on the truncated Gibbs measure")
    _common(p)
    for flag, kind in (("--N", int), ("--beta", float), ("--count", int), ("--burnin", int), ("--thin", int),
                       ("--step-size", float)):
        _add(p, flag, type=kind)
    _add(p, "--no-adapt", dest="adapt", action="store_false")

    p = sub.add_parser("invariance", help="empirical invariance of the Gibbs measure under the flow")
    _common(p)
    for flag, kind in (("--N", int), ("--beta", float), ("--T", float), ("--ensemble", int), ("--burnin", int),
                       ("--thin", int), ("--step-size", float), ("--coupling", float), ("--chains", int)):
        _add(p, flag, type=kind)
    _add(p, "--observable", dest="observables", action="append")

    p = sub.add_parser("dump-renorm", help="write the renormalization table")
    _common(p)
    for flag, kind in (("--N", int), ("--beta", float), ("--grid-radius", int)):
        _add(p, flag, type=kind)
    return parser


def _simulate(cfg: RunConfig, out: Path):
    return run_simulate(cfg.run_id, cfg.N, cfg.beta, cfg.h, cfg.T, cfg.seed, out, cfg.record_every)


def _regularity(cfg: RunConfig, out: Path):
    return run_regularity(cfg.run_id, cfg.N, cfg.beta, cfg.T, cfg.samples, cfg.seed, out,
                          gff_radius=cfg.gff_radius, h=cfg.h, workers=cfg.workers)


def _verify_counting(cfg: RunConfig, out: Path):
    return run_verify_counting(cfg.run_id, out, cfg.lemmas, cfg.scales, cfg.trials, cfg.budget, cfg.seed,
                               cfg.workers, tuple(cfg.sine_scales or DECAY_SCALES))


def _verify_chaos(cfg: RunConfig, out: Path):
    return run_verify_chaos(cfg.run_id, cfg.samples, cfg.seed, out, workers=cfg.workers)


def _verify_tensors(cfg: RunConfig, out: Path):
    if cfg.scales and any(len(sc) != 3 for sc in cfg.scales):
        raise UsageError("tensor scales are (N1, N2, N3) triples such as 4x4x8")
    return run_verify_tensors(cfg.run_id, out, cfg.which, cfg.scales, cfg.trials, cfg.ps, cfg.samples, cfg.seed,
                              cfg.beta, cfg.budget, cfg.workers, ladder=cfg.parameter_ladder())


def _norms(cfg: RunConfig, out: Path):
    return run_norms(cfg.run_id, cfg.grid_radius, cfg.T, cfg.h, cfg.seed, out,
                     s_values=cfg.s_values, b_values=cfg.b_values, padding=cfg.padding)


def _gibbs_sample(cfg: RunConfig, out: Path):
    return run_gibbs_sample(cfg.run_id, cfg.N, cfg.beta, cfg.count, cfg.seed, out, cfg.chain_settings())


def _invariance(cfg: RunConfig, out: Path):
    return run_invariance(cfg.run_id, cfg.N, cfg.T, cfg.ensemble, cfg.seed, out, beta=cfg.beta,
                          coupling=cfg.coupling, chain=cfg.chain_settings(), observables=cfg.observables,
                          chains=cfg.chains, workers=cfg.workers)


def _dump_renorm(cfg: RunConfig, out: Path):
    return run_dump_renorm(cfg.run_id, cfg.N, cfg.beta, out, cfg.grid_radius)


DISPATCH: Dict[str, Callable[[RunConfig, Path], Dict[str, Any]]] = {
    "simulate": _simulate,
    "regularity": _regularity,
    "verify-counting": _verify_counting,
    "verify-chaos": _verify_chaos,
    "verify-tensors": _verify_tensors,
    "norms": _norms,
    "gibbs-sample": _gibbs_sample,
    "invariance": _invariance,
    "dump-renorm": _dump_renorm,
}


def _flags(args: argparse.Namespace) -> Dict[str, Any]:
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "log_level")}
    if "ladder" in flags:
        flags["ladder"] = dict(flags["ladder"])
    return flags


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Entry point of the lab CLI.

    Args:
        argv: Arguments without the program name.

    Returns:
        The process exit code.
    """
    settings = get_settings()
    configure_logging(settings.log_level, settings.use_colors)
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    if args.log_level:
        configure_logging(args.log_level, settings.use_colors)

    try:
        cfg = resolve_config(args.command, _flags(args), args.config, settings)
    except UsageError as e:
        logger.error("Invalid configuration", data={"reason": str(e)})
        return EXIT_USAGE

    start_time = time.time()
    out = cfg.out_dir(settings)
    try:
        result = DISPATCH[cfg.command](cfg, out)
    except (UsageError, ParameterRangeError, BudgetExceededError, ValidationError) as e:
        logger.error("Run rejected", data={"command": cfg.command, "reason": str(e)})
        return EXIT_USAGE
    except VerificationFailure as e:
        logger.error("Verification failed", error=e)
        return EXIT_FAILED
    except LabError as e:
        logger.critical("Run aborted", error=e)
        return EXIT_FAILED

    manifest = result["store"].write_manifest(cfg.command, cfg.model_dump(mode="json"), cfg.seed,
                                              time.time() - start_time)
    logger.info("Manifest written", data={"path": str(manifest)})
    return EXIT_OK if result["passed"] else EXIT_FAILED
