# The MIT License (MIT)
# Copyright © 2023 Yuma Rao
# Copyright © 2023 Opentensor Foundation

# Permission is hereby granted, free of charge, to any person obtaining a copy of this software and associated
# documentation files (the “Software”), to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense, and/or sell copies of the Software,
# and to permit persons to whom the Software is furnished to do so, subject to the following conditions:

# The above copyright notice and this permission notice shall be included in all copies or substantial portions of
# the Software.

# THE SOFTWARE IS PROVIDED “AS IS”, WITHOUT WARRANTY OF ANY KIND, EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO
# THE WARRANTIES OF MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL
# THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION
# OF CONTRACT, TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER
# DEALINGS IN THE SOFTWARE.

import argparse
import os
import typing as ty

import pydantic
from dotenv import load_dotenv

from PrimeBound.base.exact_compare import DEFAULT_PRECISION_BITS, DEFAULT_PRECISION_CAP
from PrimeBound.base.prime_table import DEFAULT_MEMORY_BUDGET_MIB
from PrimeBound.bounds.threshold import DEFAULT_HI_CAP_BITS, DEFAULT_TOLERANCE
from PrimeBound.errors import ConfigError
from PrimeBound.verify.inequalities import InequalityId

from .logging import DEFAULT_EVENTS_RETENTION_SIZE, setup_events_logger

PRECISION_CAP_ENV = "PRIMEBOUND_PRECISION_CAP"
COMMANDS = ("check", "scan", "threshold", "root", "constants", "chain")
FORMATS = ("json", "csv", "text")
FUNCTIONS = ("fk", "appendix")


class PrecisionConfig(pydantic.BaseModel):
    bits: int = DEFAULT_PRECISION_BITS
    cap: int = DEFAULT_PRECISION_CAP


class SieveConfig(pydantic.BaseModel):
    limit: ty.Optional[int] = None
    memory_budget: int = DEFAULT_MEMORY_BUDGET_MIB


class ScanConfig(pydantic.BaseModel):
    workers: int = 1
    chunk_size: int = 2000


class RootConfig(pydantic.BaseModel):
    hi_cap_bits: int = DEFAULT_HI_CAP_BITS


class LoggingConfig(pydantic.BaseModel):
    debug: bool = False
    trace: bool = False
    events_dir: ty.Optional[str] = None
    events_retention_size: int = DEFAULT_EVENTS_RETENTION_SIZE


class RunConfig(pydantic.BaseModel):
    """Validated command line. Dotted flags land in the nested sections."""

    command: str
    ineq: ty.Optional[str] = None
    n: ty.Optional[int] = None
    n_lo: ty.Optional[int] = None
    n_hi: ty.Optional[int] = None
    cap: ty.Optional[int] = None
    c: ty.Optional[str] = None
    k: ty.Optional[int] = None
    fn: ty.Optional[str] = None
    tol: float = DEFAULT_TOLERANCE
    format: str = "json"

    precision: PrecisionConfig = pydantic.Field(default_factory=PrecisionConfig)
    sieve: SieveConfig = pydantic.Field(default_factory=SieveConfig)
    scan: ScanConfig = pydantic.Field(default_factory=ScanConfig)
    root: RootConfig = pydantic.Field(default_factory=RootConfig)
    logging: LoggingConfig = pydantic.Field(default_factory=LoggingConfig)

    @property
    def inequality(self) -> ty.Optional[InequalityId]:
        return None if self.ineq is None else InequalityId.parse(self.ineq)


def _require(config: RunConfig, *names: str) -> None:
    missing = [name for name in names if getattr(config, name) is None]
    if missing:
        flags = ", ".join(f"--{name.replace('_', '-')}" for name in missing)
        raise ConfigError(f"{config.command} needs {flags}")


def check_config(config: RunConfig) -> None:
    r"""Checks/validates the config and attaches the events logger if asked to."""
    if config.command not in COMMANDS:
        raise ConfigError(f"unknown command {config.command!r}")
    if config.format not in FORMATS:
        raise ConfigError(f"--format must be one of {', '.join(FORMATS)}")
    if config.precision.bits < 2:
        raise ConfigError("--precision.bits must be >= 2")
    if config.precision.cap < config.precision.bits:
        raise ConfigError("--precision.cap must be >= --precision.bits")
    if config.tol <= 0:
        raise ConfigError("--tol must be > 0")
    if config.scan.workers < 1 or config.scan.chunk_size < 1:
        raise ConfigError("--scan.workers and --scan.chunk_size must be >= 1")
    if config.k is not None and config.k < 0:
        raise ConfigError("--k must be >= 0")

    inequality = None
    if config.ineq is not None:
        try:
            inequality = config.inequality
        except ValueError as e:
            raise ConfigError(str(e)) from e

    if config.command in ("check", "scan", "threshold"):
        _require(config, "ineq")
        if inequality.takes_parameters:
            _require(config, "c", "k")
    if config.command == "check":
        _require(config, "n")
    elif config.command == "scan":
        _require(config, "n_lo", "n_hi")
        if config.n_lo > config.n_hi:
            raise ConfigError("--n-lo must not exceed --n-hi")
    elif config.command == "threshold" and not inequality.takes_parameters:
        _require(config, "cap")
    elif config.command == "root":
        _require(config, "fn")
        if config.fn not in FUNCTIONS:
            raise ConfigError(f"--fn must be one of {', '.join(FUNCTIONS)}")
        if config.fn == "fk":
            _require(config, "c", "k")
    elif config.command == "chain":
        _require(config, "n", "c", "k")

    if config.logging.events_dir:
        full_path = os.path.expanduser(config.logging.events_dir)
        os.makedirs(full_path, exist_ok=True)
        setup_events_logger(full_path, config.logging.events_retention_size)


def add_args(parser):
    """
    Adds the arguments every command shares.
    """

    parser.add_argument(
        "--precision.bits",
        type=int,
        help="Starting interval precision in bits.",
        default=DEFAULT_PRECISION_BITS,
    )

    parser.add_argument(
        "--precision.cap",
        type=int,
        help=f"Precision cap in bits (also read from {PRECISION_CAP_ENV}).",
        default=_precision_cap_default(),
    )

    parser.add_argument(
        "--sieve.limit",
        type=int,
        help="Sieve limit override; sized automatically when omitted.",
        default=None,
    )

    parser.add_argument(
        "--sieve.memory_budget",
        type=int,
        help="Refuse sieve limits whose tables exceed this many MiB.",
        default=DEFAULT_MEMORY_BUDGET_MIB,
    )

    parser.add_argument(
        "--scan.workers",
        type=int,
        help="Number of scan worker processes.",
        default=1,
    )

    parser.add_argument(
        "--scan.chunk_size",
        type=int,
        help="Consecutive n values handed to a worker at once.",
        default=2000,
    )

    parser.add_argument(
        "--root.hi_cap_bits",
        type=int,
        help="Give up bracketing once the upper end passes 2^hi_cap_bits.",
        default=DEFAULT_HI_CAP_BITS,
    )

    parser.add_argument(
        "--logging.debug",
        action="store_true",
        help="Log progress to standard error.",
        default=False,
    )

    parser.add_argument(
        "--logging.trace",
        action="store_true",
        help="Log everything, with tracebacks.",
        default=False,
    )

    parser.add_argument(
        "--logging.events_dir",
        type=str,
        help="If set, one EVENT line per scan, threshold, root and audit goes to events.log here.",
        default=None,
    )

    parser.add_argument(
        "--logging.events_retention_size",
        type=int,
        help="Events retention size.",
        default=DEFAULT_EVENTS_RETENTION_SIZE,
    )

    parser.add_argument(
        "--format",
        choices=FORMATS,
        help="Report format.",
        default="json",
    )


def _precision_cap_default() -> int:
    raw = os.environ.get(PRECISION_CAP_ENV)
    if raw is None:
        return DEFAULT_PRECISION_CAP
    try:
        return int(raw)
    except ValueError as e:
        raise ConfigError(f"{PRECISION_CAP_ENV} must be an integer, got {raw!r}") from e


def _add_c_k(parser):
    parser.add_argument("--c", type=str, help="Constant c in (1, e): 2, 3/2, 2.5, e-1/1000, ...")
    parser.add_argument("--k", type=int, help="Index shift k >= 0.")


def add_check_args(parser):
    """Add arguments for checking one inequality at one n."""
    parser.add_argument("--ineq", type=str, help="Inequality name, e.g. zhang.")
    parser.add_argument("--n", type=int, help="Point to check.")
    _add_c_k(parser)


def add_scan_args(parser):
    parser.add_argument("--ineq", type=str, help="Inequality name, e.g. panaitopol.")
    parser.add_argument("--n-lo", type=int, help="First n of the range.")
    parser.add_argument("--n-hi", type=int, help="Last n of the range.")
    _add_c_k(parser)


def add_threshold_args(parser):
    parser.add_argument("--ineq", type=str, help="Inequality name, e.g. corollary1.")
    parser.add_argument(
        "--cap",
        type=int,
        help="Scan cap; THEOREM1 and COROLLARY1 scan to the analytic threshold when omitted.",
    )
    parser.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE, help="Root tolerance.")
    _add_c_k(parser)


def add_root_args(parser):
    parser.add_argument("--fn", type=str, choices=FUNCTIONS, help="Threshold function.")
    parser.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE, help="Root tolerance.")
    _add_c_k(parser)


def add_constants_args(parser):
    parser.add_argument(
        "--c", type=str, default="2", help="Constant for the limit audit (default 2)."
    )


def add_chain_args(parser):
    parser.add_argument("--n", type=int, help="Point to evaluate the argument at.")
    _add_c_k(parser)


_COMMAND_ARGS = {
    "check": add_check_args,
    "scan": add_scan_args,
    "threshold": add_threshold_args,
    "root": add_root_args,
    "constants": add_constants_args,
    "chain": add_chain_args,
}


def _nest(flat: dict) -> dict:
    """{'precision.bits': 64} -> {'precision': {'bits': 64}}"""
    nested: dict = {}
    for key, value in flat.items():
        head, _, tail = key.partition(".")
        if tail:
            nested.setdefault(head, {})[tail] = value
        else:
            nested[key] = value
    return nested


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="primebound",
        description="Certify explicit prime inequalities and their thresholds.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command, add_command_args in _COMMAND_ARGS.items():
        subparser = subparsers.add_parser(command)
        add_args(subparser)
        add_command_args(subparser)
    return parser


def config(argv: ty.Optional[list[str]] = None) -> RunConfig:
    """
    Parse the command line into a validated RunConfig.

    Raises:
        ConfigError: on any missing or inconsistent argument.
    """
    load_dotenv()
    args = build_parser().parse_args(argv)
    try:
        run_config = RunConfig.model_validate(_nest(vars(args)))
    except pydantic.ValidationError as e:
        raise ConfigError(str(e).splitlines()[0]) from e
    check_config(run_config)
    return run_config
