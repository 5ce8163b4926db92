"""Sample-side estimates computed from the NES counters.

The ``*_from_counts`` helpers take raw counters and work elementwise on
numpy arrays as well as on scalars; the harness uses them over thousands of
runs at once. The NesState wrappers add the error handling.

The RSE estimate is the square root of
``1/Dg + 2 Phig/Dg^2 + 2 Psig/Lg^2 - 2 Opg/(Dg Lg)``; its first term alone
gives ``Dg^{-1/2}``.
"""
from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import CorrectionOverflowError, UndefinedEstimateError

log = logging.getLogger(__name__)


def delta_hat_from_counts(delta_g, p):
    return 3.0 * np.asarray(delta_g, dtype=np.float64) / (p * p)


def lambda_hat_from_counts(lambda_g, p):
    return np.asarray(lambda_g, dtype=np.float64) / p


def c_hat_from_counts(delta_g, lambda_g, p):
    return 3.0 * np.asarray(delta_g, dtype=np.float64) / (p * np.asarray(lambda_g, dtype=np.float64))


def rse_bracket_from_counts(delta_g, lambda_g, phi_g, psi_g, omega_prime_g):
    d = np.asarray(delta_g, dtype=np.float64)
    lam = np.asarray(lambda_g, dtype=np.float64)
    return (1.0 / d + 2.0 * np.asarray(phi_g, dtype=np.float64) / d**2
            + 2.0 * np.asarray(psi_g, dtype=np.float64) / lam**2
            - 2.0 * np.asarray(omega_prime_g, dtype=np.float64) / (d * lam))


def rb_hat_from_counts(delta_g, lambda_g, psi_g, omega_prime_g):
    d = np.asarray(delta_g, dtype=np.float64)
    lam = np.asarray(lambda_g, dtype=np.float64)
    return (2.0 * np.asarray(psi_g, dtype=np.float64) / lam**2
            - np.asarray(omega_prime_g, dtype=np.float64) / (d * lam))


def _p_ok(p):
    if not 0.0 < p <= 1.0:
        raise ValueError(f"sampling probability must be in (0, 1], got {p}")


def estimate_delta(state, p: Optional[float] = None) -> float:
    p = state.p if p is None else p
    _p_ok(p)
    return float(delta_hat_from_counts(state.delta_g, p))


def estimate_lambda(state, p: Optional[float] = None) -> float:
    p = state.p if p is None else p
    _p_ok(p)
    return float(lambda_hat_from_counts(state.lambda_g, p))


def estimate_c(state, p: Optional[float] = None) -> float:
    p = state.p if p is None else p
    _p_ok(p)
    if state.lambda_g == 0:
        raise UndefinedEstimateError("no wedges identified (sample too small); C_hat undefined")
    return float(c_hat_from_counts(state.delta_g, state.lambda_g, p))


def estimate_rse_simple(state) -> float:
    if state.delta_g == 0:
        raise UndefinedEstimateError("no closed wedges identified; RSE estimate undefined")
    return state.delta_g ** -0.5


def rse_full_with_flag(state) -> tuple:
    """``(rse, fell_back)``; falls back to ``Dg^{-1/2}`` on a negative bracket."""
    if state.delta_g == 0 or state.lambda_g == 0:
        raise UndefinedEstimateError("RSE estimate needs Dg > 0 and Lg > 0")
    if not state.track_aux:
        raise ValueError("full RSE estimate needs auxiliary counters (track_aux)")
    b = float(rse_bracket_from_counts(state.delta_g, state.lambda_g, state.phi_g,
                                      state.psi_g, state.omega_prime_g))
    if b < 0:
        log.warning("negative RSE bracket %.3g; falling back to Dg^-1/2", b)
        return estimate_rse_simple(state), True
    return b ** 0.5, False


def estimate_rse_full(state) -> float:
    return rse_full_with_flag(state)[0]


def estimate_rb(state) -> float:
    if state.delta_g == 0 or state.lambda_g == 0:
        raise UndefinedEstimateError("RB estimate needs Dg > 0 and Lg > 0")
    if not state.track_aux:
        raise ValueError("RB estimate needs auxiliary counters (track_aux)")
    return float(rb_hat_from_counts(state.delta_g, state.lambda_g, state.psi_g,
                                    state.omega_prime_g))


def bias_corrected_c(state, p: Optional[float] = None) -> float:
    c = estimate_c(state, p)
    rb = estimate_rb(state)
    if 1.0 + rb <= 0:
        raise CorrectionOverflowError(f"1 + RB_hat = {1.0 + rb:.3g} <= 0")
    return c / (1.0 + rb)


@dataclass
class EstimateReport:
    p: float
    seed: int
    delta_g: int
    lambda_g: int
    phi_g: Optional[int]
    psi_g: Optional[int]
    omega_prime_g: Optional[int]
    sample_size: int
    delta_hat: float
    lambda_hat: float
    c_hat: float
    c_hat_plus: Optional[float]
    rse_full: Optional[float]
    rse_simple: Optional[float]
    rb_hat: Optional[float]
    rse_fallback: bool = False
    correction_overflow: bool = False

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def to_csv(self, header: bool = True) -> str:
        d = self.to_dict()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(d.keys())
        w.writerow(["" if v is None else v for v in d.values()])
        return buf.getvalue()


def estimate_report(state) -> EstimateReport:
    """All estimates for a finished run. Raises if ``C_hat`` is undefined."""
    c_hat = estimate_c(state)
    rse_simple = rse_full = rb = c_plus = None
    fallback = overflow = False
    if state.delta_g > 0:
        rse_simple = estimate_rse_simple(state)
        if state.track_aux:
            rse_full, fallback = rse_full_with_flag(state)
            rb = estimate_rb(state)
            if 1.0 + rb > 0:
                c_plus = c_hat / (1.0 + rb)
            else:
                log.warning("1 + RB_hat <= 0; reporting raw C_hat")
                c_plus, overflow = c_hat, True
    aux = state.track_aux
    return EstimateReport(
        p=state.p, seed=state.seed,
        delta_g=state.delta_g, lambda_g=state.lambda_g,
        phi_g=state.phi_g if aux else None,
        psi_g=state.psi_g if aux else None,
        omega_prime_g=state.omega_prime_g if aux else None,
        sample_size=state.sample_size,
        delta_hat=estimate_delta(state), lambda_hat=estimate_lambda(state),
        c_hat=c_hat, c_hat_plus=c_plus, rse_full=rse_full, rse_simple=rse_simple,
        rb_hat=rb, rse_fallback=fallback, correction_overflow=overflow,
    )
