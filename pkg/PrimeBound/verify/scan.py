import logging
from dataclasses import dataclass, field
from multiprocessing import Pool

import numpy as np

from PrimeBound.base.exact_compare import CheckVerdict, VerdictStatus
from PrimeBound.base.prime_table import required_sieve_limit
from PrimeBound.bounds.threshold import (
    DEFAULT_HI_CAP_BITS,
    DEFAULT_TOLERANCE,
    RootResult,
    ThresholdFunction,
    find_root,
)
from PrimeBound.errors import BracketError, DomainError
from PrimeBound.utils.logging import log_event
from PrimeBound.verify.inequalities import (
    InequalityId,
    InequalityParams,
    check_inequality,
)

logger = logging.getLogger(__name__)

DEFAULT_CHUNK_SIZE = 2000
# p_m < m log(m log m) is a theorem for m >= 6.
ROSSER_PN_VALID_FROM = 6


@dataclass
class ScanSummary:
    """Fails and Undecided points of one scan, in increasing n."""

    inequality: InequalityId
    n_lo: int
    n_hi: int
    holds: int = 0
    failures: list[int] = field(default_factory=list)
    undecided: list[int] = field(default_factory=list)
    verdicts: list[tuple[int, CheckVerdict]] | None = None

    @property
    def checked(self) -> int:
        return self.n_hi - self.n_lo + 1

    @property
    def clean(self) -> bool:
        return not self.failures and not self.undecided


# Per-process state for pool workers, set once by the initializer.
_worker_state: dict = {}


def _init_worker(inequality: InequalityId, params: InequalityParams, keep: bool):
    _worker_state.update(inequality=inequality, params=params, keep=keep)


def _scan_chunk(bounds: tuple[int, int]):
    lo, hi = bounds
    inequality = _worker_state["inequality"]
    params = _worker_state["params"]
    keep = _worker_state["keep"]
    holds, odd, kept = 0, [], []
    for n in range(lo, hi + 1):
        verdict = check_inequality(inequality, n, params)
        if verdict.holds:
            holds += 1
        else:
            odd.append((n, verdict.status))
        if keep:
            kept.append((n, verdict))
    return holds, odd, kept


def _chunks(n_lo: int, n_hi: int, chunk_size: int) -> list[tuple[int, int]]:
    return [
        (lo, min(lo + chunk_size - 1, n_hi)) for lo in range(n_lo, n_hi + 1, chunk_size)
    ]


def scan_range(
    inequality: InequalityId,
    n_lo: int,
    n_hi: int,
    params: InequalityParams,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    keep_verdicts: bool = False,
) -> ScanSummary:
    """
    Check every n in [n_lo, n_hi] and collect the points that do not hold.

    The range is cut into chunks; with ``workers > 1`` the chunks go to a
    process pool whose results are consumed in chunk order, so the summary is
    the same for any worker count.

    Args:
        keep_verdicts (bool): Also return every (n, verdict) pair, for tabular output.

    Raises:
        DomainError: n_lo > n_hi or n_lo below the predicate's domain.
        TableRangeError: the table cannot reach n_hi.
    """
    if n_lo > n_hi:
        raise DomainError(f"empty range [{n_lo}, {n_hi}]")
    if chunk_size < 1:
        raise DomainError(f"chunk size must be >= 1, got {chunk_size}")
    params.require_for(inequality)
    if n_lo < inequality.domain_start:
        raise DomainError(f"{inequality.value} needs n >= {inequality.domain_start}, got {n_lo}")

    # Fail before fanning out if the table is too small.
    table = params.table
    table.require_index(inequality.max_prime_index(n_hi, params.offset))
    if inequality not in (InequalityId.ROSSER_PN,):
        table.require_value(n_hi)

    chunks = _chunks(n_lo, n_hi, chunk_size)
    initargs = (inequality, params, keep_verdicts)
    if workers > 1 and len(chunks) > 1:
        logger.debug(f"Scanning {len(chunks)} chunks on {workers} workers")
        with Pool(processes=workers, initializer=_init_worker, initargs=initargs) as pool:
            results = list(pool.imap(_scan_chunk, chunks))
    else:
        _init_worker(*initargs)
        results = [_scan_chunk(chunk) for chunk in chunks]

    summary = ScanSummary(
        inequality=inequality,
        n_lo=n_lo,
        n_hi=n_hi,
        verdicts=[] if keep_verdicts else None,
    )
    for holds, odd, kept in results:
        summary.holds += holds
        for n, status in odd:
            if status is VerdictStatus.FAILS:
                summary.failures.append(n)
            else:
                summary.undecided.append(n)
        if keep_verdicts:
            summary.verdicts.extend(kept)

    logger.info(
        f"{inequality.value} on [{n_lo}, {n_hi}]: {len(summary.failures)} fails, "
        f"{len(summary.undecided)} undecided"
    )
    log_event(
        f"scan {inequality.value} [{n_lo}, {n_hi}] holds={summary.holds} "
        f"fails={len(summary.failures)} undecided={len(summary.undecided)}"
    )
    return summary


@dataclass
class ThresholdReport:
    """
    Smallest N such that the predicate holds on [N, scan_cap], with the
    analytic root when one exists and whether the two together cover every n.
    """

    inequality: InequalityId
    params: InequalityParams
    minimal_n: int
    failures_below: list[int]
    scan_cap: int
    analytic_root: RootResult | None = None
    certified: bool = False
    undecided: list[int] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)

    @property
    def analytic_threshold(self) -> int | None:
        return None if self.analytic_root is None else self.analytic_root.analytic_threshold


def _smallest_clean_start(summary: ScanSummary) -> int:
    bad = summary.failures + summary.undecided
    return max(bad) + 1 if bad else summary.n_lo


def _rosser_pn_valid_from(params: InequalityParams, upto: int, workers, chunk_size) -> int:
    """First m such that p_j < j log(j log j) for every j in [m, upto]."""
    summary = scan_range(InequalityId.ROSSER_PN, 1, upto, params, workers, chunk_size)
    return _smallest_clean_start(summary)


def _analytic_root(params, tolerance, hi_cap_bits, diagnostics) -> RootResult | None:
    fn = ThresholdFunction.fk(params.c, params.k)
    try:
        return find_root(
            fn,
            tolerance=tolerance,
            precision_bits=params.precision_bits,
            precision_cap=params.precision_cap,
            hi_cap_bits=hi_cap_bits,
        )
    except BracketError as e:
        diagnostics.append(f"no analytic root: {e}")
        return None


def _annotate_conventions(report: ThresholdReport, valid_from: int) -> None:
    """Spell out both readings of the analytic threshold and where the p_n bound applies."""
    root = report.analytic_root
    big_n = root.analytic_threshold
    k = report.params.k
    report.diagnostics.append(
        f"analytic threshold N_{k} = floor(x_{k}) = {big_n}: "
        f"guaranteed for n > N_{k}, i.e. n >= N_{k} + 1 = {big_n + 1}"
    )
    if 2 <= big_n <= report.scan_cap:
        bad = big_n in report.failures_below or big_n in report.undecided
        at_big_n = "does not hold" if bad else "holds"
    else:
        at_big_n = "lies outside the scanned range"
    report.diagnostics.append(
        f"reading the threshold inclusively (n >= N_{k} = {big_n}): the predicate at N_{k} {at_big_n}"
    )
    c = report.params.c
    report.diagnostics.append(
        f"the threshold function scales p_(n+k) by log c = {c.log_float():.12g}; "
        "only for c = 2 does this factor read log 2"
    )
    smallest_index = big_n + 1 + k
    in_region = smallest_index >= valid_from
    report.diagnostics.append(
        f"p_m < m log(m log m) holds from m = {valid_from} on the scanned range; "
        f"every n > N_{k} uses m = n + k >= {smallest_index}, "
        + ("inside the valid region" if in_region else "partly outside the valid region")
    )
    if not root.floor_certain:
        report.diagnostics.append("floor of the analytic root could not be certified")
    if root.monotonicity_violated:
        report.diagnostics.append(
            "threshold function changes sign before the bracketed root; monotonicity failed"
        )


def minimal_threshold(
    inequality: InequalityId,
    params: InequalityParams,
    scan_cap: int | None = None,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    tolerance: float = DEFAULT_TOLERANCE,
    hi_cap_bits: int = DEFAULT_HI_CAP_BITS,
) -> ThresholdReport:
    """
    Find the smallest N with the predicate holding on [N, scan_cap].

    For THEOREM1 and COROLLARY1 the zero x_k of f_k is located as well, and
    the report is certified when the scan reaches ceil(x_k) (and the region
    where p_m < m log(m log m) is used), since beyond x_k the inequality is
    guaranteed analytically. COROLLARY1 additionally needs PANAITOPOL to hold
    on the whole scanned range. Leaving ``scan_cap`` unset scans exactly as
    far as certification needs.
    """
    params.require_for(inequality)
    diagnostics: list[str] = []
    root = None
    if inequality.takes_parameters:
        root = _analytic_root(params, tolerance, hi_cap_bits, diagnostics)

    if scan_cap is None:
        if root is None:
            raise DomainError(f"{inequality.value} needs an explicit scan cap")
        scan_cap = max(root.ceiling, ROSSER_PN_VALID_FROM - params.offset, inequality.domain_start)
    if scan_cap < inequality.domain_start:
        raise DomainError(f"scan cap must be >= {inequality.domain_start}, got {scan_cap}")

    summary = scan_range(
        inequality, inequality.domain_start, scan_cap, params, workers, chunk_size
    )
    minimal_n = _smallest_clean_start(summary)
    report = ThresholdReport(
        inequality=inequality,
        params=params,
        minimal_n=minimal_n,
        failures_below=summary.failures,
        scan_cap=scan_cap,
        analytic_root=root,
        undecided=summary.undecided,
        diagnostics=diagnostics,
    )
    if minimal_n > scan_cap:
        diagnostics.append(f"predicate does not hold at the scan cap {scan_cap}")

    if inequality is InequalityId.ZHANG:
        appendix = find_root(ThresholdFunction.appendix(), tolerance=tolerance)
        diagnostics.append(
            f"appendix route: f has its zero at {appendix.root_float:.12g}, "
            f"so the bound holds analytically for n > {appendix.analytic_threshold} "
            "(not used for certification)"
        )

    if root is not None:
        valid_from = _rosser_pn_valid_from(
            params, scan_cap + params.offset, workers, chunk_size
        )
        _annotate_conventions(report, valid_from)
        report.certified = _certify(report, valid_from, workers, chunk_size)
    elif inequality.takes_parameters:
        diagnostics.append("no analytic guarantee is available beyond the scan cap")

    logger.info(
        f"{inequality.value}: minimal n {minimal_n} on [.., {scan_cap}], certified={report.certified}"
    )
    log_event(
        f"threshold {inequality.value} minimal_n={minimal_n} scan_cap={scan_cap} "
        f"certified={report.certified}"
    )
    return report


def _certify(report: ThresholdReport, valid_from: int, workers, chunk_size) -> bool:
    root = report.analytic_root
    k = report.params.offset
    needed = max(root.ceiling, valid_from - k)
    reasons = []
    if report.scan_cap < needed:
        reasons.append(
            f"scan cap {report.scan_cap} is below {needed}, the start of the analytic guarantee"
        )
    if not root.floor_certain or root.monotonicity_violated:
        reasons.append("the analytic root is not certified")
    if report.undecided:
        reasons.append(f"{len(report.undecided)} undecided points")
    if report.minimal_n > report.scan_cap:
        reasons.append("the predicate fails at the scan cap")
    late = [n for n in report.failures_below if n > root.analytic_threshold]
    if late:
        logger.error(f"{report.inequality.value} fails above the analytic threshold at {late[:5]}")
        reasons.append(f"fails above the analytic threshold at n = {late[0]}")

    if report.inequality is InequalityId.COROLLARY1 and not reasons:
        panaitopol = scan_range(
            InequalityId.PANAITOPOL, 2, report.scan_cap, report.params, workers, chunk_size
        )
        if not panaitopol.clean:
            reasons.append("PANAITOPOL does not hold on the whole scanned range")

    for reason in reasons:
        report.diagnostics.append(f"not certified: {reason}")
    return not reasons


def sample_points(lo: int, hi: int, count: int, seed: int = 0) -> list[int]:
    """Deterministic sample of distinct integers from [lo, hi], sorted."""
    span = hi - lo + 1
    if span <= count:
        return list(range(lo, hi + 1))
    rng = np.random.default_rng(seed)
    picks = rng.choice(span, size=count, replace=False)
    return sorted(int(lo + p) for p in picks)


def table_limit_for(inequality: InequalityId, n_hi: int, k: int = 0) -> int:
    """Sieve limit that scans of ``inequality`` up to n_hi need, with a 2x margin."""
    return required_sieve_limit(inequality.max_prime_index(n_hi, k), value=2 * n_hi)
