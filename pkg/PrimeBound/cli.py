"""
Command-line front end.

Every command writes exactly one report to standard output and logs to
standard error. Exit status is 0 whenever the computation ran, whatever the
verdicts; 1 on a PrimeBoundError; 2 on a bad command line.
"""

import io
import logging
import sys
import typing as ty

import pandas as pd
from rich.console import Console
from rich.table import Table

from PrimeBound.base.exact_compare import ExactConstant, parse_constant
from PrimeBound.base.prime_table import PrimeTable, build_prime_table
from PrimeBound.bounds.audit import audit_constants, audit_limit
from PrimeBound.bounds.threshold import ThresholdFunction, find_root
from PrimeBound.errors import ConfigError, PrimeBoundError, TableRangeError
from PrimeBound.protocol import (
    AuditPayload,
    ChainPayload,
    Report,
    RootPayload,
    ScanPayload,
    ThresholdPayload,
    VerdictPayload,
)
from PrimeBound.utils.config import RunConfig, config
from PrimeBound.utils.logging import log_event, setup_logging
from PrimeBound.utils.misc import flatten, fmt_real
from PrimeBound.verify.inequalities import (
    InequalityId,
    InequalityParams,
    check_inequality,
    proof_chain,
)
from PrimeBound.verify.scan import (
    ROSSER_PN_VALID_FROM,
    minimal_threshold,
    scan_range,
    table_limit_for,
)

logger = logging.getLogger(__name__)

MAX_TABLE_REBUILDS = 8
# Sieve size used to start a threshold search whose cap comes from the analytic root.
INITIAL_THRESHOLD_INDEX = 1000
TEXT_WIDTH = 120


class _Run:
    """State of one invocation: the parsed constant and the current prime table."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.table: ty.Optional[PrimeTable] = None
        self.c: ty.Optional[ExactConstant] = None
        self.csv_rows: ty.Optional[pd.DataFrame] = None
        if config.c is not None and config.command != "constants":
            self.c = self.parse_c(config.c)

    def parse_c(self, text: str) -> ExactConstant:
        return parse_constant(
            text,
            check_range=True,
            precision_bits=self.config.precision.bits,
            precision_cap=self.config.precision.cap,
        )

    def params(self) -> InequalityParams:
        return InequalityParams(
            table=self.table,
            c=self.c,
            k=self.config.k,
            precision_bits=self.config.precision.bits,
            precision_cap=self.config.precision.cap,
        )

    def build_table(self, limit: int) -> None:
        logger.info(f"Building prime table up to {limit}")
        self.table = build_prime_table(limit, self.config.sieve.memory_budget)

    def with_table(self, initial_limit: int, compute: ty.Callable[[], ty.Any]):
        """
        Run ``compute`` against a table of at least ``initial_limit``, rebuilding
        it larger whenever the computation runs off its end.
        """
        limit = self.config.sieve.limit or initial_limit
        self.build_table(limit)
        for _ in range(MAX_TABLE_REBUILDS):
            try:
                return compute()
            except TableRangeError as e:
                if self.config.sieve.limit is not None or e.required_limit is None:
                    raise
                limit = max(e.required_limit, 2 * self.table.limit)
                logger.info(f"{e}; rebuilding")
                self.build_table(limit)
        return compute()


def _base_params(config: RunConfig, run: _Run) -> dict:
    params = {
        "precision_bits": config.precision.bits,
        "precision_cap": config.precision.cap,
    }
    if run.c is not None:
        params["c"] = run.c.label
    if config.k is not None:
        params["k"] = config.k
    return params


def _check(config: RunConfig, run: _Run) -> Report:
    inequality = config.inequality
    k = config.k or 0
    verdict = run.with_table(
        table_limit_for(inequality, config.n, k),
        lambda: check_inequality(inequality, config.n, run.params()),
    )
    diagnostics = []
    if inequality is InequalityId.ROSSER_PN and config.n < ROSSER_PN_VALID_FROM:
        diagnostics.append(
            f"p_n < n log(n log n) is only known for n >= {ROSSER_PN_VALID_FROM}"
        )
    return Report(
        command="check",
        params={"ineq": inequality.value, "n": config.n, **_base_params(config, run)},
        result=VerdictPayload.build(config.n, verdict).model_dump(),
        diagnostics=diagnostics,
    )


def _scan(config: RunConfig, run: _Run) -> Report:
    inequality = config.inequality
    keep = config.format == "csv"
    summary = run.with_table(
        table_limit_for(inequality, config.n_hi, config.k or 0),
        lambda: scan_range(
            inequality,
            config.n_lo,
            config.n_hi,
            run.params(),
            workers=config.scan.workers,
            chunk_size=config.scan.chunk_size,
            keep_verdicts=keep,
        ),
    )
    if keep:
        run.csv_rows = pd.DataFrame(
            {
                "n": [n for n, _ in summary.verdicts],
                "verdict": [v.status.value for _, v in summary.verdicts],
                "margin": [fmt_real(v.margin) for _, v in summary.verdicts],
            },
            columns=["n", "verdict", "margin"],
        )
    return Report(
        command="scan",
        params={
            "ineq": inequality.value,
            "n_lo": config.n_lo,
            "n_hi": config.n_hi,
            **_base_params(config, run),
        },
        result=ScanPayload.build(summary).model_dump(),
    )


def _threshold(config: RunConfig, run: _Run) -> Report:
    inequality = config.inequality
    k = config.k or 0
    initial = table_limit_for(inequality, config.cap or INITIAL_THRESHOLD_INDEX, k)
    report = run.with_table(
        initial,
        lambda: minimal_threshold(
            inequality,
            run.params(),
            scan_cap=config.cap,
            workers=config.scan.workers,
            chunk_size=config.scan.chunk_size,
            tolerance=config.tol,
            hi_cap_bits=config.root.hi_cap_bits,
        ),
    )
    params = {"ineq": inequality.value, "cap": config.cap, **_base_params(config, run)}
    return Report(
        command="threshold",
        params=params,
        result=ThresholdPayload.build(report).model_dump(),
        diagnostics=report.diagnostics,
    )


def _root(config: RunConfig, run: _Run) -> Report:
    if config.fn == "appendix":
        fn = ThresholdFunction.appendix()
    else:
        fn = ThresholdFunction.fk(run.c, config.k)
    result = find_root(
        fn,
        tolerance=config.tol,
        precision_bits=config.precision.bits,
        precision_cap=config.precision.cap,
        hi_cap_bits=config.root.hi_cap_bits,
    )
    log_event(f"root {fn.label} = {result.root_float:.12g}")
    diagnostics = []
    if result.monotonicity_violated:
        diagnostics.append("sign change found below the bracketed root; leftmost root reported")
    if not result.floor_certain:
        diagnostics.append("floor of the root could not be certified at the precision cap")
    return Report(
        command="root",
        params={"fn": config.fn, "tol": config.tol, **_base_params(config, run)},
        result=RootPayload.build(result).model_dump(),
        diagnostics=diagnostics,
    )


def _constants(config: RunConfig, run: _Run) -> Report:
    audit = audit_constants(precision_bits=config.precision.bits)
    c = run.parse_c(config.c)
    limit = audit_limit(c, precision_bits=config.precision.bits)
    log_event(f"audit constants passed={audit.passed} limit passed={limit.passed}")
    diagnostics = [
        f"finding {f.name} does not pass: {f.description}"
        for f in audit.findings + limit.findings
        if not f.passed
    ]
    return Report(
        command="constants",
        params={"c": c.label, "precision_bits": config.precision.bits},
        result={
            "constants": AuditPayload.build(audit).model_dump(),
            "limit": AuditPayload.build(limit).model_dump(),
        },
        diagnostics=diagnostics,
    )


def _chain(config: RunConfig, run: _Run) -> Report:
    chain = run.with_table(
        table_limit_for(InequalityId.THEOREM1, config.n, config.k),
        lambda: proof_chain(config.n, run.params()),
    )
    diagnostics = [f"{name} does not hold at n = {config.n}" for name in chain.broken_links]
    return Report(
        command="chain",
        params={"n": config.n, **_base_params(config, run)},
        result=ChainPayload.build(chain).model_dump(),
        diagnostics=diagnostics,
    )


_COMMANDS = {
    "check": _check,
    "scan": _scan,
    "threshold": _threshold,
    "root": _root,
    "constants": _constants,
    "chain": _chain,
}


def render(report: Report, fmt: str, csv_rows: ty.Optional[pd.DataFrame] = None) -> str:
    """Serialize a report; identical reports always give identical text."""
    if fmt == "json":
        return report.model_dump_json(indent=2) + "\n"
    if fmt == "csv":
        frame = csv_rows
        if frame is None:
            rows = list(flatten(report.model_dump(include={"command", "params", "result"})))
            frame = pd.DataFrame(rows, columns=["key", "value"])
        return frame.to_csv(index=False, lineterminator="\n")

    buffer = io.StringIO()
    console = Console(file=buffer, width=TEXT_WIDTH, color_system=None)
    table = Table(title=f"primebound {report.command}")
    table.add_column("key")
    table.add_column("value")
    for key, value in flatten(report.model_dump(include={"params", "result"})):
        table.add_row(key, str(value))
    console.print(table)
    for line in report.diagnostics:
        console.print(f"note: {line}")
    return buffer.getvalue()


def run(config: RunConfig) -> int:
    """Execute one command and write its report to standard output."""
    setup_logging(config.logging.debug, config.logging.trace)
    try:
        state = _Run(config)
        report = _COMMANDS[config.command](config, state)
    except PrimeBoundError as e:
        if config.logging.trace:
            logger.exception(e)
        print(f"primebound: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    sys.stdout.write(render(report, config.format, state.csv_rows))
    return 0


def main(argv: ty.Optional[list[str]] = None) -> int:
    try:
        run_config = config(argv)
    except ConfigError as e:
        print(f"primebound: {e}", file=sys.stderr)
        return 2
    return run(run_config)
