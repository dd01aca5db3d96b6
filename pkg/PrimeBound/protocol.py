# The MIT License (MIT)
# Copyright © 2023 Yuma Rao

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

import typing as ty

import pydantic

from PrimeBound import REPORT_SCHEMA_VERSION
from PrimeBound.base.exact_compare import CheckVerdict
from PrimeBound.bounds.audit import AuditReport
from PrimeBound.bounds.threshold import RootResult
from PrimeBound.utils.misc import fmt_real
from PrimeBound.verify.inequalities import ProofChain
from PrimeBound.verify.scan import ScanSummary, ThresholdReport

# Every command writes exactly one Report. Payload models build the ``result``
# section; the report keeps it as a plain mapping so it parses back unchanged.
#
# Example usage:
#   report = Report(command="check", params={"ineq": "zhang", "n": 20},
#                   result=VerdictPayload.build(20, verdict).model_dump())
#   text = report.model_dump_json()
#   assert Report.model_validate_json(text) == report


class VerdictPayload(pydantic.BaseModel):
    """
    Attributes:
    - margin: log-scale gap, left side minus right side.
    - width: width of the enclosure around ``margin``; None on the exact path.
    """

    n: int
    status: str
    margin: ty.Optional[float] = None
    width: ty.Optional[float] = None
    precision_used: ty.Optional[int] = None

    @classmethod
    def build(cls, n: int, verdict: CheckVerdict) -> "VerdictPayload":
        return cls(
            n=n,
            status=verdict.status.value,
            margin=fmt_real(verdict.margin),
            width=fmt_real(verdict.width),
            precision_used=verdict.precision_used,
        )


class ScanPayload(pydantic.BaseModel):
    inequality: str
    n_lo: int
    n_hi: int
    checked: int
    holds: int
    fails: int
    undecided: int
    failures: list[int]
    undecided_n: list[int]

    @classmethod
    def build(cls, summary: ScanSummary) -> "ScanPayload":
        return cls(
            inequality=summary.inequality.value,
            n_lo=summary.n_lo,
            n_hi=summary.n_hi,
            checked=summary.checked,
            holds=summary.holds,
            fails=len(summary.failures),
            undecided=len(summary.undecided),
            failures=summary.failures,
            undecided_n=summary.undecided,
        )


class RootPayload(pydantic.BaseModel):
    """
    Attributes:
    - root: midpoint of the final bracket, 12 significant digits.
    - width: bracket width, so consumers can judge how tight the root is.
    """

    function: str
    root: float
    bracket: list[float]
    width: float
    analytic_threshold: int
    iterations: int
    tolerance: float
    precision_used: int
    floor_certain: bool
    monotonicity_violated: bool
    samples_checked: int

    @classmethod
    def build(cls, result: RootResult) -> "RootPayload":
        lo, hi = result.bracket
        return cls(
            function=result.function,
            root=fmt_real(result.root),
            bracket=[fmt_real(lo), fmt_real(hi)],
            width=fmt_real(result.width),
            analytic_threshold=result.analytic_threshold,
            iterations=result.iterations,
            tolerance=result.tolerance,
            precision_used=result.precision_used,
            floor_certain=result.floor_certain,
            monotonicity_violated=result.monotonicity_violated,
            samples_checked=result.samples_checked,
        )


class ThresholdPayload(pydantic.BaseModel):
    inequality: str
    minimal_n: int
    failures_below: list[int]
    scan_cap: int
    analytic_root: ty.Optional[RootPayload] = None
    analytic_threshold: ty.Optional[int] = None
    certified: bool
    undecided: list[int]

    @classmethod
    def build(cls, report: ThresholdReport) -> "ThresholdPayload":
        root = report.analytic_root
        return cls(
            inequality=report.inequality.value,
            minimal_n=report.minimal_n,
            failures_below=report.failures_below,
            scan_cap=report.scan_cap,
            analytic_root=None if root is None else RootPayload.build(root),
            analytic_threshold=report.analytic_threshold,
            certified=report.certified,
            undecided=report.undecided,
        )


class FindingPayload(pydantic.BaseModel):
    name: str
    description: str
    passed: bool
    value: float
    reference: ty.Optional[float] = None
    deviation: ty.Optional[float] = None
    tolerance: ty.Optional[float] = None
    extra: dict[str, ty.Any] = pydantic.Field(default_factory=dict)


class AuditPayload(pydantic.BaseModel):
    passed: bool
    precision_bits: int
    findings: list[FindingPayload]

    @classmethod
    def build(cls, report: AuditReport) -> "AuditPayload":
        return cls(
            passed=report.passed,
            precision_bits=report.precision_bits,
            findings=[
                FindingPayload(
                    name=f.name,
                    description=f.description,
                    passed=f.passed,
                    value=fmt_real(f.value),
                    reference=fmt_real(f.reference),
                    deviation=fmt_real(f.deviation),
                    tolerance=fmt_real(f.tolerance),
                    extra=f.extra,
                )
                for f in report.findings
            ],
        )


class ChainLinkPayload(pydantic.BaseModel):
    name: str
    statement: str
    status: str
    margin: ty.Optional[float] = None
    width: ty.Optional[float] = None
    precision_used: ty.Optional[int] = None


class ChainPayload(pydantic.BaseModel):
    n: int
    links: list[ChainLinkPayload]
    premises_hold: bool
    broken_links: list[str]
    consistent: bool

    @classmethod
    def build(cls, chain: ProofChain) -> "ChainPayload":
        return cls(
            n=chain.n,
            links=[
                ChainLinkPayload(
                    name=link.name,
                    statement=link.statement,
                    status=link.verdict.status.value,
                    margin=fmt_real(link.verdict.margin),
                    width=fmt_real(link.verdict.width),
                    precision_used=link.verdict.precision_used,
                )
                for link in chain.links
            ],
            premises_hold=chain.premises_hold,
            broken_links=chain.broken_links,
            consistent=chain.consistent,
        )


class Report(pydantic.BaseModel):
    """
    The single document a command writes to standard output.

    Attributes:
    - command: the command that produced it.
    - params: the effective inputs, including defaults that were filled in.
    - result: the command's payload.
    - diagnostics: human-readable notes; never used for pass/fail.
    - versions: schema version of this layout.
    """

    command: str
    params: dict[str, ty.Any]
    result: dict[str, ty.Any]
    diagnostics: list[str] = pydantic.Field(default_factory=list)
    versions: dict[str, str] = pydantic.Field(
        default_factory=lambda: {"spec": REPORT_SCHEMA_VERSION}
    )
