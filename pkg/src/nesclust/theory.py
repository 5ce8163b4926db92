"""Graph-side variance, covariance, RSE and RB of the NES counters.

Inputs are exact graph statistics (:class:`~nesclust.oracle.ExactStats`).
Each moment comes in a full form and a small-``p`` approximation; the
approximations of ``var(Lambda_g)`` and ``cov(Delta_g, Lambda_g)`` drop the
``Lambda (p - p^2)`` and ``2 Delta (p^2 - p^3)`` terms entirely, and
:func:`dropped_terms` reports those magnitudes.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import asdict, dataclass

log = logging.getLogger(__name__)


def _check_p(p):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")


def var_delta_g(stats, p: float) -> float:
    _check_p(p)
    return (stats.Delta * (p**2 - p**4 / 3) + 8 * stats.Phi * (2 / 5 * p**3 - p**4 / 3)) / 3


def var_delta_g_approx(stats, p: float) -> float:
    _check_p(p)
    return stats.Delta * p**2 / 3 + 16 / 15 * stats.Phi * p**3


def var_lambda_g(stats, p: float) -> float:
    _check_p(p)
    return (stats.Lambda + 2 / 3 * stats.Psi) * (p - p**2)


def var_lambda_g_approx(stats, p: float) -> float:
    _check_p(p)
    return 2 / 3 * stats.Psi * p


def cov_delta_lambda(stats, p: float) -> float:
    _check_p(p)
    return (2 * stats.Delta + 5 / 12 * stats.OmegaPrime) * (p**2 - p**3)


def cov_delta_lambda_approx(stats, p: float) -> float:
    _check_p(p)
    return 5 / 12 * stats.OmegaPrime * p**2


def dropped_terms(stats, p: float) -> dict:
    """Terms the approximations omit besides the ``(1 - p)`` factors."""
    _check_p(p)
    return {
        "var_lambda_g": stats.Lambda * (p - p**2),
        "cov_dl": 2 * stats.Delta * (p**2 - p**3),
    }


def rse_bracket(stats, p: float) -> float:
    d, lam = stats.Delta, stats.Lambda
    return (3 / (d * p**2)
            + 48 * stats.Phi * p**3 / (5 * d**2 * p**4)
            + 2 * stats.Psi * p / (3 * lam**2 * p**2)
            - 5 * stats.OmegaPrime * p**2 / (2 * d * lam * p**3))


def rse_theory_with_flag(stats, p: float) -> tuple:
    if stats.Delta <= 0 or stats.Lambda <= 0:
        raise ValueError("theoretical RSE needs Delta > 0 and Lambda > 0")
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must be in (0, 1], got {p}")
    b = rse_bracket(stats, p)
    if b < 0:
        log.warning("negative theoretical RSE bracket at p=%g; using sqrt(3/(Delta p^2))", p)
        return math.sqrt(3 / (stats.Delta * p**2)), True
    return math.sqrt(b), False


def rse_theory(stats, p: float) -> float:
    return rse_theory_with_flag(stats, p)[0]


def rb_theory(stats, p: float) -> float:
    if stats.Delta <= 0 or stats.Lambda <= 0:
        raise ValueError("theoretical RB needs Delta > 0 and Lambda > 0")
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must be in (0, 1], got {p}")
    d, lam = stats.Delta, stats.Lambda
    return (2 * stats.Psi / (3 * lam**2) - 5 * stats.OmegaPrime / (4 * d * lam)) / p


@dataclass
class TheoryReport:
    p: float
    var_delta_g: float
    var_lambda_g: float
    cov_dl: float
    var_delta_g_approx: float
    var_lambda_g_approx: float
    cov_dl_approx: float
    dropped_var_lambda_g: float
    dropped_cov_dl: float
    rse_theory: float
    rse_fallback: bool
    rb_theory: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_csv(self, header: bool = True) -> str:
        d = self.to_dict()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(d.keys())
        w.writerow(d.values())
        return buf.getvalue()


def theory_report(stats, p: float) -> TheoryReport:
    rse, fb = rse_theory_with_flag(stats, p)
    dropped = dropped_terms(stats, p)
    return TheoryReport(
        p=p,
        var_delta_g=var_delta_g(stats, p),
        var_lambda_g=var_lambda_g(stats, p),
        cov_dl=cov_delta_lambda(stats, p),
        var_delta_g_approx=var_delta_g_approx(stats, p),
        var_lambda_g_approx=var_lambda_g_approx(stats, p),
        cov_dl_approx=cov_delta_lambda_approx(stats, p),
        dropped_var_lambda_g=dropped["var_lambda_g"],
        dropped_cov_dl=dropped["cov_dl"],
        rse_theory=rse,
        rse_fallback=fb,
        rb_theory=rb_theory(stats, p),
    )
