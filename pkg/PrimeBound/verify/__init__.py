from .inequalities import (
    InequalityId,
    InequalityParams,
    check_inequality,
    proof_chain,
)
from .scan import ThresholdReport, minimal_threshold, scan_range
