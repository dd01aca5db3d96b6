from .audit import audit_constants, audit_limit
from .threshold import ThresholdFunction, eval_f_appendix, eval_fk, find_root
