import argparse
import logging
import os
import sys
from typing import Any, Dict, List, Optional

from . import __version__
from .config import OUTPUT_CONFIG, SWEEP_CONFIG, load_env, reload
from .errors import ConfigError, HyperMTError
from .geometry import make_context
from .precision import Precision
from .reporting import ReportWriter
from .reporting.report_writer import FORMATS
from .studies import STUDIES, RunConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class ConfigValidator:
    """Per-command parameter checks, run before any computation"""

    @staticmethod
    def validate(config: RunConfig) -> RunConfig:
        ConfigValidator._validate_common(config)
        validators = {
            "verify-lemma": ConfigValidator._validate_lemma,
            "verify-comparison": ConfigValidator._validate_comparison,
            "psi-k": ConfigValidator._validate_psi_k,
            "moser": ConfigValidator._validate_moser,
            "lower-bound": ConfigValidator._validate_lower_bound,
            "profile-report": ConfigValidator._validate_profile_report,
        }
        validator = validators.get(config.command)
        if validator is None:
            raise ConfigError("command", f"unknown command '{config.command}'")
        validator(config)
        return config

    @staticmethod
    def _require(config: RunConfig, fields: List[str]) -> None:
        for field in fields:
            if getattr(config, field, None) is None:
                raise ConfigError(field, "missing required field")

    @staticmethod
    def _validate_common(config: RunConfig) -> None:
        ConfigValidator._require(config, ["command", "n", "precision", "fmt"])
        if isinstance(config.n, bool) or not isinstance(config.n, int) or config.n < 2:
            raise ConfigError("n", f"dimension must be an integer >= 2, got {config.n!r}")
        try:
            config.precision = Precision.parse(config.precision)
        except ValueError:
            raise ConfigError("precision", f"expected one of double/extended, got {config.precision!r}")
        if config.fmt not in FORMATS:
            raise ConfigError("format", f"expected one of {FORMATS}, got {config.fmt!r}")
        if config.workers < 1:
            raise ConfigError("workers", "must be at least 1")

    @staticmethod
    def _validate_lambda(config: RunConfig, closed: bool) -> None:
        hardy = make_context(config.n).hardy
        upper_ok = config.lam <= hardy if closed else config.lam < hardy
        if config.lam < 0.0 or not upper_ok:
            bracket = "]" if closed else ")"
            raise ConfigError("lambda", f"must lie in [0, {hardy:.6g}{bracket}, got {config.lam}")

    @staticmethod
    def _validate_k(config: RunConfig, minimum: float) -> None:
        for k in config.k_values:
            if k < minimum:
                raise ConfigError("k", f"every k must be >= {minimum}, got {k}")

    @staticmethod
    def _validate_lemma(config: RunConfig) -> None:
        ConfigValidator._require(config, ["t_min", "t_max", "points", "spacing"])
        if config.spacing not in ("log", "linear"):
            raise ConfigError("spacing", f"expected log or linear, got {config.spacing!r}")
        if not 0.0 <= config.t_min < config.t_max:
            raise ConfigError("t_max", f"need 0 <= t_min < t_max, got ({config.t_min}, {config.t_max}]")
        if config.spacing == "log" and config.t_min <= 0.0:
            raise ConfigError("t_min", "log spacing needs t_min > 0")
        if config.points < 2:
            raise ConfigError("points", "need at least 2 grid points")
        if config.derivative_chain and config.n < 3:
            raise ConfigError("derivative_chain", "G and H exist for n >= 3 only")

    @staticmethod
    def _validate_comparison(config: RunConfig) -> None:
        ConfigValidator._require(config, ["seed", "count"])
        if config.count < 1:
            raise ConfigError("count", "need at least one profile")
        ConfigValidator._validate_lambda(config, closed=True)

    @staticmethod
    def _validate_psi_k(config: RunConfig) -> None:
        ConfigValidator._validate_lambda(config, closed=False)
        ConfigValidator._validate_k(config, 1)

    @staticmethod
    def _validate_moser(config: RunConfig) -> None:
        ConfigValidator._validate_k(config, 2)
        if config.alpha_factor <= 0.0:
            raise ConfigError("alpha_factor", "must be positive")
        if config.p is not None and config.p < 0.0:
            raise ConfigError("p", "must be non-negative")

    @staticmethod
    def _validate_lower_bound(config: RunConfig) -> None:
        ConfigValidator._validate_lambda(config, closed=False)
        ConfigValidator._validate_k(config, 1)

    @staticmethod
    def _validate_profile_report(config: RunConfig) -> None:
        if config.profile is not None and not os.path.exists(config.profile):
            raise ConfigError("profile", f"file not found: {config.profile}")
        if config.alpha_factor <= 0.0:
            raise ConfigError("alpha_factor", "must be positive")
        if config.p is not None and config.p < 0.0:
            raise ConfigError("p", "must be non-negative")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=2, help="Dimension (default: 2)")
    common.add_argument("--precision", default="double", choices=[p.value for p in Precision])
    common.add_argument("--workers", type=int, default=1, help="Threads for independent items")
    common.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("--format", dest="fmt", default=None, choices=FORMATS)
    common.add_argument("--output", default=None, help="Report path (default: $HYPERMT_OUTPUT_DIR)")
    common.add_argument("--env-file", default=None, help="Load environment overrides from this file")

    parser = argparse.ArgumentParser(
        prog="hypermt",
        description="Numerical checks of hyperbolic rearrangement and Moser-Trudinger inequalities",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    lemma = commands.add_parser("verify-lemma", parents=[common], help="Sweep the kernel lemma F, G, H")
    lemma.add_argument("--t-min", type=float, default=None)
    lemma.add_argument("--t-max", type=float, default=None)
    lemma.add_argument("--points", type=int, default=None)
    lemma.add_argument("--spacing", choices=["log", "linear"], default=None)
    lemma.add_argument("--derivative-chain", action="store_true", help="Also check F' and G' numerically")

    comparison = commands.add_parser(
        "verify-comparison", parents=[common], help="Energy comparison on seeded random profiles"
    )
    comparison.add_argument("--count", type=int, default=None)
    comparison.add_argument("--seed", type=int, default=None)
    comparison.add_argument("--lambda", dest="lam", type=float, default=0.0)

    psi_k = commands.add_parser("psi-k", parents=[common], help="psi_k closed forms and limits")
    psi_k.add_argument("--k", dest="k_values", type=float, nargs="+", default=None)
    psi_k.add_argument("--lambda", dest="lam", type=float, default=0.0)

    moser = commands.add_parser("moser", parents=[common], help="Moser sequence normalization and blow-up")
    moser.add_argument("--k", dest="k_values", type=float, nargs="+", default=None)
    moser.add_argument("--alpha-factor", type=float, default=1.0, help="alpha / alpha_n")
    moser.add_argument("--p", type=float, default=None, help="Denominator power (default: n/(n-1))")

    bound = commands.add_parser("lower-bound", parents=[common], help="Lower bound of the MT supremum")
    bound.add_argument("--lambda", dest="lam", type=float, default=0.0)
    bound.add_argument("--k", dest="k_values", type=float, nargs="+", default=None)

    profile = commands.add_parser("profile-report", parents=[common], help="All functionals of one profile")
    profile.add_argument("--profile", default=None, help="Profile JSON file")
    profile.add_argument("--seed", type=int, default=None)
    profile.add_argument("--alpha-factor", type=float, default=1.0)
    profile.add_argument("--p", type=float, default=None)
    return parser


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """RunConfig from parsed flags; unset flags fall back to the env-backed defaults"""
    grid = SWEEP_CONFIG["lemma_grid"]
    values: Dict[str, Any] = vars(args)

    def pick(name: str, default: Any) -> Any:
        value = values.get(name)
        return default if value is None else value

    return RunConfig(
        command=args.command,
        n=args.n,
        lam=pick("lam", 0.0),
        alpha_factor=pick("alpha_factor", 1.0),
        p=values.get("p"),
        t_min=pick("t_min", grid["t_min"]),
        t_max=pick("t_max", grid["t_max"]),
        points=pick("points", grid["points"]),
        spacing=pick("spacing", grid["spacing"]),
        k_values=list(pick("k_values", [])),
        seed=pick("seed", SWEEP_CONFIG["seed"]),
        count=pick("count", SWEEP_CONFIG["comparison_count"]),
        precision=args.precision,
        workers=args.workers,
        fmt=pick("fmt", OUTPUT_CONFIG["format"]),
        output=args.output,
        profile=values.get("profile"),
        derivative_chain=bool(values.get("derivative_chain", False)),
    )


def run(config: RunConfig, writer: Optional[ReportWriter] = None):
    """Validate, execute the study and write its report; returns (report, path)"""
    ConfigValidator.validate(config)
    study = STUDIES[config.command](config)
    report = study.execute()
    path = (writer or ReportWriter()).write(report, config.output, config.fmt)
    return report, path


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    )
    try:
        if args.env_file is not None or os.path.exists(".env"):
            load_env(args.env_file)
            reload()
        config = build_run_config(args)
        report, path = run(config)
    except ConfigError as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_USAGE
    except FileNotFoundError as e:
        logger.error(f"{e}")
        return EXIT_USAGE
    except HyperMTError as e:
        logger.error(f"Numerical failure in {args.command}: {e}")
        return EXIT_NUMERIC
    except ArithmeticError as e:
        logger.error(f"Arithmetic failure in {args.command}: {e!r}")
        return EXIT_NUMERIC
    if not report.passed:
        logger.warning(f"{args.command}: checks failed, see {path}")
        return EXIT_CHECK_FAILED
    logger.info(f"{args.command}: all checks passed")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
