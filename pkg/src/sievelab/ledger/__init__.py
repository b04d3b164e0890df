from .intervals import (
    IntervalNumber,
    euler_gamma_interval,
    exp_gamma_interval,
    exp_interval,
    log_interval,
    pi_interval,
    sin_interval,
)
from .entries import (
    Comparison,
    LedgerEntry,
    all_pass,
    ledger_table,
    run_ledger,
    threshold_exponent,
)

__all__ = [
    "IntervalNumber",
    "euler_gamma_interval",
    "exp_gamma_interval",
    "exp_interval",
    "log_interval",
    "pi_interval",
    "sin_interval",
    "Comparison",
    "LedgerEntry",
    "all_pass",
    "ledger_table",
    "run_ledger",
    "threshold_exponent",
]
