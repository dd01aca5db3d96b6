import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from sympy import primepi

from PrimeBound.base.exact_compare import ExactConstant
from PrimeBound.base.prime_table import PrimeTable, build_prime_table
from PrimeBound.bounds.audit import audit_constants, audit_limit
from PrimeBound.bounds.threshold import ThresholdFunction, find_root
from PrimeBound.verify.inequalities import (
    InequalityId,
    InequalityParams,
    check_inequality,
)
from PrimeBound.verify.scan import minimal_threshold, sample_points, scan_range

logger = logging.getLogger(__name__)


@dataclass
class ClaimResult:
    name: str
    passed: bool
    detail: str


class Reproduction:
    """
    Runs the headline claims end to end against one shared prime table.

    ``scale`` shrinks the large ranges (the 10^6 appendix scan, the 10^4 scans)
    so a quick run finishes in seconds; scale 1 is the full reproduction.
    """

    def __init__(self, scale: int = 1, workers: int = 1, limit: int = 2_000_000):
        self.scale = scale
        self.workers = workers
        self.table: PrimeTable = build_prime_table(limit)

    def params(self, c: str | None = None, k: int | None = None) -> InequalityParams:
        constant = None if c is None else ExactConstant.rational(Fraction(c))
        return InequalityParams(table=self.table, c=constant, k=k)

    def span(self, full: int) -> int:
        return max(100, full // self.scale)

    def zhang(self) -> ClaimResult:
        n_hi = self.span(10**4)
        summary = scan_range(InequalityId.ZHANG, 2, n_hi, self.params(), self.workers)
        late = [n for n in summary.failures if n >= 20]
        early = [n for n in summary.failures if n < 20]
        return ClaimResult(
            "zhang",
            not late and bool(early),
            f"failures below 20: {early}; at or above 20: {late} (n <= {n_hi})",
        )

    def corollary(self) -> ClaimResult:
        cap = self.span(10**4)
        report = minimal_threshold(
            InequalityId.COROLLARY1, self.params("2", 1), scan_cap=cap, workers=self.workers
        )
        return ClaimResult(
            "corollary",
            report.minimal_n == 10,
            f"minimal n {report.minimal_n} on [2, {cap}], certified={report.certified}",
        )

    def panaitopol(self) -> ClaimResult:
        n_hi = self.span(5000)
        summary = scan_range(InequalityId.PANAITOPOL, 2, n_hi, self.params(), self.workers)
        return ClaimResult("panaitopol", summary.clean, f"{len(summary.failures)} failures on [2, {n_hi}]")

    def appendix_root(self) -> ClaimResult:
        result = find_root(ThresholdFunction.appendix(), tolerance=1e-9)
        lo, hi = result.bracket
        return ClaimResult(
            "appendix root",
            Fraction("74.38") <= lo and hi <= Fraction("74.40"),
            f"root {result.root_float:.12g}, N = {result.analytic_threshold}",
        )

    def constants(self) -> list[ClaimResult]:
        audit = audit_constants()
        return [
            ClaimResult(f"audit {f.name}", f.passed, f"{f.description}: deviation {f.deviation}")
            for f in audit.findings
        ]

    def appendix_scan(self) -> ClaimResult:
        n_hi = self.span(10**6)
        summary = scan_range(InequalityId.APPENDIX_A, 2, n_hi, self.params(), self.workers)
        return ClaimResult("appendix bound", summary.clean, f"{len(summary.failures)} failures on [2, {n_hi}]")

    def limit(self) -> list[ClaimResult]:
        audit = audit_limit(ExactConstant.rational(2))
        return [
            ClaimResult(f"limit {f.name}", f.passed, f"deviation {f.deviation:.6g}")
            for f in audit.findings
        ]

    def theorem1(self, c: str, k: int, samples: int = 50) -> ClaimResult:
        params = self.params(c, k)
        root = find_root(ThresholdFunction.fk(params.c, k))
        if root.ceiling > self.table.prime_total - k:
            return ClaimResult(
                f"theorem1 c={c} k={k}",
                False,
                f"analytic root {root.root_float:.6g} is beyond desk-scale scanning",
            )
        report = minimal_threshold(InequalityId.THEOREM1, params, workers=self.workers)
        checks = sample_points(report.minimal_n + 1, 10 * report.minimal_n, samples)
        checks = [n for n in checks if n + k <= self.table.prime_total and n <= self.table.limit]
        held = all(check_inequality(InequalityId.THEOREM1, n, params).holds for n in checks)
        return ClaimResult(
            f"theorem1 c={c} k={k}",
            report.certified and held,
            f"minimal n {report.minimal_n}, N_k {report.analytic_threshold}, "
            f"certified={report.certified}, {len(checks)} samples held={held}",
        )

    def oracle(self) -> ClaimResult:
        limit = 10**5
        table = build_prime_table(limit)
        points = [10, 100, 1000, 10**4, limit]
        agree = all(table.prime_count(x) == int(primepi(x)) for x in points)
        return ClaimResult("prime counting oracle", agree, f"pi(x) against sympy at {points}")

    def run(self) -> list[ClaimResult]:
        results = [
            self.zhang(),
            self.corollary(),
            self.panaitopol(),
            self.appendix_root(),
            *self.constants(),
            self.appendix_scan(),
            *self.limit(),
        ]
        for c in ("3/2", "2", "5/2"):
            for k in (0, 1, 3):
                results.append(self.theorem1(c, k))
        results.append(self.oracle())
        return results


def score(results: list[ClaimResult]) -> float:
    return sum(r.passed for r in results) / len(results) if results else math.nan
