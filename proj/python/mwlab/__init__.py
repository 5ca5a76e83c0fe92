"""Walsh correlation and bilinear-sum laboratory."""

import json

from ._mwlab import (
    ArgumentError,
    ResourceError,
    __version__,
    bilinear_sum,
    carry_truncation_rate,
    dispatch,
    frequency_test_count,
    fwht,
    l1_norm,
    max_correlation,
    shifted_quadratic_form,
    sieve,
    spectral_split,
    sup_norm,
    trig_coefficient,
    type1_sum,
    walsh_eval,
)
from . import _mwlab


def theorem_scan(kind, lambda_min, lambda_max):
    """Per-lambda reports of the maximal Walsh correlation against the bound."""
    return json.loads(_mwlab._theorem_scan(kind, lambda_min, lambda_max))


def lemma_check(lemma, lam, mask, r=0, a=0, interval=(0, 0)):
    return json.loads(_mwlab._lemma_check(lemma, lam, mask, r, a, interval[0], interval[1]))


def check_lemma5(lam, sigma, ts, mask):
    return json.loads(_mwlab._check_lemma5(lam, sigma, list(ts), mask))


def run_scan(config=None):
    """Batch grid; config keys follow the scan JSON file format."""
    return json.loads(_mwlab._run_scan(json.dumps(config or {})))


def emit_csv(reports):
    return _mwlab._emit_csv(json.dumps(list(reports)))


__all__ = [
    "ArgumentError",
    "ResourceError",
    "__version__",
    "bilinear_sum",
    "carry_truncation_rate",
    "check_lemma5",
    "dispatch",
    "emit_csv",
    "frequency_test_count",
    "fwht",
    "l1_norm",
    "lemma_check",
    "max_correlation",
    "run_scan",
    "shifted_quadratic_form",
    "sieve",
    "spectral_split",
    "sup_norm",
    "theorem_scan",
    "trig_coefficient",
    "type1_sum",
    "walsh_eval",
]
