"""Clearing payments: split, regime solver, proper filter, CDS loop, verifier."""
from clearing.cds import cds_clear, proportional_clear
from clearing.proper import proper_filter
from clearing.result import ClearingResult, Direction, PaymentMatrix
from clearing.solver import inner_fixed_point, mcp_clear
from clearing.split import pp_split
from clearing.verify import VerificationReport, Violation, verify_clearing

__all__ = [
    "ClearingResult",
    "Direction",
    "PaymentMatrix",
    "VerificationReport",
    "Violation",
    "cds_clear",
    "inner_fixed_point",
    "mcp_clear",
    "pp_split",
    "proper_filter",
    "proportional_clear",
    "verify_clearing",
]
