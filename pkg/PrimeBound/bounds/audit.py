"""Numerical audit of the explicit constants the threshold functions rely on."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from mpmath import iv

from PrimeBound.base.exact_compare import (
    ExactConstant,
    certainly_negative,
    certainly_positive,
    iv_fraction,
    working_precision,
)
from PrimeBound.bounds.threshold import (
    APPENDIX_CONSTANT,
    ROSSER_PI_CONSTANT,
    ThresholdFunction,
)

logger = logging.getLogger(__name__)

CONSTANT_TOLERANCE = Fraction(5, 10**6)
GRID_LOW, GRID_HIGH = 2, 10**6
# 10^12 is where the limit is usually quoted; by 10^400 the gap is inside 1e-2.
LIMIT_EXPONENTS = (12, 400)
LIMIT_TOLERANCE = Fraction(1, 100)


@dataclass(frozen=True)
class AuditFinding:
    name: str
    description: str
    passed: bool
    value: float
    reference: float | None = None
    deviation: float | None = None
    tolerance: float | None = None
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class AuditReport:
    findings: list[AuditFinding]
    precision_bits: int

    @property
    def passed(self) -> bool:
        return all(f.passed for f in self.findings)

    def finding(self, name: str) -> AuditFinding:
        return next(f for f in self.findings if f.name == name)


def _within(value, reference, tolerance: Fraction) -> bool:
    """Certainly |value - reference| < tolerance."""
    tol = iv_fraction(tolerance)
    deviation = value - reference
    return certainly_positive(tol - deviation) and certainly_positive(tol + deviation)


def _closeness(name, description, value, reference, tolerance) -> AuditFinding:
    return AuditFinding(
        name=name,
        description=description,
        passed=_within(value, reference, tolerance),
        value=float(value.mid),
        reference=float(reference.mid),
        deviation=float((value - reference).mid),
        tolerance=float(tolerance),
    )


def _log_ratio(x):
    """g(x) = 1 + log(log x) / log x."""
    log_x = iv.log(x)
    return 1 + iv.log(log_x) / log_x


def _audit_maximum(grid_size: int) -> list[AuditFinding]:
    grid = np.unique(
        np.concatenate(
            [
                np.geomspace(GRID_LOW, GRID_HIGH, grid_size),
                np.linspace(GRID_LOW, 40, grid_size),
            ]
        )
    )
    bound = 1 + 1 / iv.e
    e_to_e = iv.exp(iv.e)
    exceeded = []
    wrong_slope = []
    best_x, best_value = None, None
    for x_float in grid.tolist():
        x = iv_fraction(Fraction(x_float))
        value = _log_ratio(x)
        if certainly_positive(value - bound):
            exceeded.append(x_float)
        mid = float(value.mid)
        if best_value is None or mid > best_value:
            best_x, best_value = x_float, mid
        # g'(x) has the sign of 1 - log(log x): positive before e^e, negative after.
        slope = 1 - iv.log(iv.log(x))
        before = certainly_negative(x - e_to_e)
        after = certainly_positive(x - e_to_e)
        if (before and certainly_negative(slope)) or (after and certainly_positive(slope)):
            wrong_slope.append(x_float)

    spacing = (40 - GRID_LOW) / (grid_size - 1)
    peak = float(e_to_e.mid)
    return [
        AuditFinding(
            name="iii",
            description="1 + loglog x / log x never exceeds 1 + 1/e on [2, 10^6]",
            passed=not exceeded and not wrong_slope,
            value=best_value,
            reference=float(bound.mid),
            deviation=best_value - float(bound.mid),
            extra={
                "grid_points": int(grid.size),
                "exceeding_points": len(exceeded),
                "slope_violations": len(wrong_slope),
            },
        ),
        AuditFinding(
            name="iii-argmax",
            description="the sampled maximum sits at e^e",
            passed=abs(best_x - peak) <= spacing,
            value=best_x,
            reference=peak,
            deviation=best_x - peak,
            tolerance=spacing,
        ),
    ]


def audit_constants(precision_bits: int = 64, grid_size: int = 4000) -> AuditReport:
    """
    Check the explicit constants with certified enclosures.

    (i)    |1.25506 - 30*log(113)/113| < 5e-6
    (ii)   |1.25506*(1 + 1/e) - 1.71678| < 5e-6
    (ii-b) 1.25506*(1 + 1/e) <= 1.71678, the direction the appendix bound needs
    (iii)  1 + loglog x / log x peaks at e^e with value 1 + 1/e

    Failures are findings, not errors.
    """
    with working_precision(precision_bits):
        rosser = iv_fraction(ROSSER_PI_CONSTANT)
        appendix = iv_fraction(APPENDIX_CONSTANT)
        from_113 = 30 * iv.log(113) / 113
        product = rosser * (1 + 1 / iv.e)
        findings = [
            _closeness(
                "i",
                "1.25506 matches 30*log(113)/113",
                from_113,
                rosser,
                CONSTANT_TOLERANCE,
            ),
            _closeness(
                "ii",
                "1.25506*(1+1/e) matches 1.71678",
                product,
                appendix,
                CONSTANT_TOLERANCE,
            ),
            AuditFinding(
                name="ii-b",
                description="1.71678 is an upper bound for 1.25506*(1+1/e)",
                passed=certainly_positive(appendix - product),
                value=float(product.mid),
                reference=float(appendix.mid),
                deviation=float((appendix - product).mid),
            ),
        ]
        findings.extend(_audit_maximum(grid_size))

    report = AuditReport(findings=findings, precision_bits=precision_bits)
    for finding in findings:
        log = logger.info if finding.passed else logger.warning
        log(f"audit {finding.name}: passed={finding.passed} value={finding.value:.12g}")
    return report


def audit_limit(
    c: ExactConstant,
    ks: tuple[int, ...] = (0, 1, 5, 10),
    exponents: tuple[int, ...] = LIMIT_EXPONENTS,
    tolerance: Fraction = LIMIT_TOLERANCE,
    precision_bits: int = 64,
) -> AuditReport:
    """
    Check |f_k(10^e) - (1 - log c)| < tolerance for each k and exponent e.

    The gap shrinks like (log c * loglog x + 1.25506) / log x whatever k is, so
    it is still about 0.13 at 10^12 for c = 2 and only drops below 1e-2 near
    10^300. Both points are reported.
    """
    findings = []
    with working_precision(precision_bits):
        limit = 1 - c.log_enclosure(precision_bits)
        for k in ks:
            fn = ThresholdFunction.fk(c, k)
            for exponent in exponents:
                value = fn.enclose(Fraction(10) ** exponent, precision_bits)
                findings.append(
                    _closeness(
                        f"limit-k{k}-1e{exponent}",
                        f"f_{k}(10^{exponent}) is within {float(tolerance)} of 1 - log c",
                        value,
                        limit,
                        tolerance,
                    )
                )
    return AuditReport(findings=findings, precision_bits=precision_bits)
