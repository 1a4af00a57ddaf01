"""Scaling analysis: critical-exponent predictions and log-log fits.

Conventions: quench rate nu = 1/T, quench time tau_Q = T.  All fitting
operations return the slope of log(n) against log(nu); for data obeying
n ~ tau_Q^(-alpha) that slope is +alpha, the positive decay exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares power law n = exp(intercept) * rate**exponent."""

    exponent: float
    intercept: float
    r_squared: float
    window: tuple[float, float]


def kz_exponent(nu: float, z: float, r: float, d: int, p: int) -> float:
    """Defect-scaling decay exponent nu*r*(d - p) / (1 + r*z*nu) for a quench
    with ramp power r across a transition with correlation-length exponent nu,
    dynamical exponent z, spatial dimension d, and defect dimension p."""
    if not d >= p >= 0:
        raise ValueError(f"need d >= p >= 0, got d={d}, p={p}")
    denom = 1.0 + r * z * nu
    if denom == 0:
        raise ValueError("degenerate denominator 1 + r*z*nu = 0")
    return nu * r * (d - p) / denom


def fit_power_law(points, window: tuple[float, float]) -> ScalingFit:
    """Ordinary least squares of log(n) on log(rate) over points strictly
    inside the window.

    points: iterable of (rate, n) pairs, all strictly positive.  Input order
    does not affect the result (points are sorted before fitting).
    """
    pts = sorted((float(r), float(n)) for r, n in points)
    lo, hi = float(window[0]), float(window[1])
    sel = [(r, n) for r, n in pts if lo < r < hi]
    if len(sel) < 3:
        raise ValueError(f"need at least 3 points strictly inside {window}, got {len(sel)}")
    rates = np.array([r for r, _ in sel])
    ns = np.array([n for _, n in sel])
    if np.any(rates <= 0) or np.any(ns <= 0):
        raise ValueError("rates and defect densities must be positive for a log-log fit")
    lx, ly = np.log(rates), np.log(ns)
    xbar, ybar = lx.mean(), ly.mean()
    sxx = np.sum((lx - xbar) ** 2)
    if sxx == 0:
        raise ValueError("all in-window rates coincide")
    slope = np.sum((lx - xbar) * (ly - ybar)) / sxx
    intercept = ybar - slope * xbar
    resid = ly - (intercept + slope * lx)
    ss_tot = np.sum((ly - ybar) ** 2)
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2) / ss_tot)
    return ScalingFit(float(slope), float(intercept), r2, (lo, hi))


def plateau_asymptotic(gamma: float, h_i: float, h_f: float) -> float:
    """Closed-form large-kick-count defect plateau (pi^4/32) gamma^2 (h_f-h_i)^2.

    This is a leading-order commutator estimate; it is only meaningful for
    small sweeps (small transverse excitation amplitude), and the exact kick
    product can depart from it substantially -- compare against
    freefermion.evolve_modes before trusting it in a new regime.
    """
    return (math.pi**4 / 32.0) * gamma**2 * (h_f - h_i) ** 2


def phi_y_amplitude(k: float, gamma: float, h_i: float, h_f: float) -> float:
    """Leading transverse rotation amplitude (pi^2/2) sin^2(k) gamma (h_f-h_i)
    synthesized by commutators of successive kicks (same caveat as
    plateau_asymptotic: leading order only)."""
    return (math.pi**2 / 2.0) * math.sin(k) ** 2 * gamma * (h_f - h_i)
