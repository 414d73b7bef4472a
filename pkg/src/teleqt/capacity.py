"""Quantum-capacity formulas and squeezing thresholds.

Rates are in bits per channel use. Gains are linear unless a name ends in
``_db``; decibels are ``10 log10(G)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.optimize import bisect, brentq

from .protocol import ProtocolParams, teleport_channel

INV_LN2 = 1.0 / math.log(2.0)
GAIN_BRACKET = (1.0, 1e6)
GAIN_XTOL = 1e-9


class ThresholdNotFound(RuntimeError):
    """No sign change of the rate-minus-target function inside the gain bracket.

    Attributes:
        closest_gain_db: gain at which the function comes closest to the target.
        residual: rate minus target at that gain (positive means never reached).
    """

    def __init__(self, message: str, closest_gain_db: float, residual: float):
        super().__init__(message)
        self.closest_gain_db = closest_gain_db
        self.residual = residual


@dataclass(frozen=True)
class CapacityBounds:
    lower: float
    upper: float

    def __post_init__(self):
        if not 0.0 <= self.lower <= self.upper:
            raise ValueError(f"invalid bounds ({self.lower}, {self.upper})")


@dataclass(frozen=True)
class ThresholdQuery:
    eta: float
    target: Literal["positive_rate", "advantage_over_direct"] = "positive_rate"
    bound: Literal["lower", "upper"] = "lower"

    def __post_init__(self):
        if not 0.0 < self.eta < 1.0:
            raise ValueError("eta must lie in (0, 1)")
        if self.target not in ("positive_rate", "advantage_over_direct"):
            raise ValueError(f"unknown target {self.target!r}")
        if self.bound not in ("lower", "upper"):
            raise ValueError(f"unknown bound {self.bound!r}")


def to_db(gain):
    return 10.0 * np.log10(gain)


def from_db(gain_db):
    return 10.0 ** (np.asarray(gain_db) / 10.0)


def pure_loss_capacity(eta: float) -> float:
    """Capacity of the pure-loss channel; ``math.inf`` at eta = 1."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    if eta == 1.0:
        return math.inf
    if eta <= 0.5:
        return 0.0
    return math.log2(eta / (1.0 - eta))


def sym_variance(var_q: float, var_p: float) -> float:
    """Symmetric noise variance with the same capacity as (var_q, var_p).

    Local squeezing before and after the channel rescales the two variances
    by reciprocal factors, so only their product matters.
    """
    if var_q <= 0 or var_p <= 0:
        raise ValueError("variances must be positive")
    return math.sqrt(var_q * var_p)


def entropy_h(x):
    """Von Neumann entropy (bits) of a thermal mode with symplectic eigenvalue x."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 1.0):
        raise ValueError("h(x) is defined for x >= 1")
    a = (x + 1.0) / 2.0
    b = (x - 1.0) / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = np.where(b > 0, b * np.log2(np.where(b > 0, b, 1.0)), 0.0)
    out = a * np.log2(a) - tail
    return float(out) if out.ndim == 0 else out


def q_lb_raw(v):
    """Unclamped lower-bound expression ``−log2(v/2) − 1/ln 2``."""
    return -np.log2(np.asarray(v, dtype=float) / 2.0) - INV_LN2


def q_ub_raw(v):
    """Unclamped upper-bound expression; not monotone in v (see :func:`q_ub`)."""
    v = np.asarray(v, dtype=float)
    return q_lb_raw(v) + 2.0 * entropy_h(np.sqrt(1.0 + v * v / 4.0))


def _q_ub_raw_slope(v: float) -> float:
    x = math.sqrt(1.0 + v * v / 4.0)
    return -INV_LN2 / v + math.log2((x + 1.0) / (x - 1.0)) * v / (4.0 * x)


# turning point of q_ub_raw: decreasing below, increasing above
V_UB_TURN = brentq(_q_ub_raw_slope, 0.5, 5.0, xtol=1e-15)
Q_UB_FLOOR = float(q_ub_raw(V_UB_TURN))


def _check_v(v):
    if np.any(np.asarray(v) <= 0):
        raise ValueError("noise variance must be positive")


def q_lb(v):
    """Lower bound on the capacity of the additive-noise channel of variance v."""
    _check_v(v)
    out = np.maximum(q_lb_raw(v), 0.0)
    return float(out) if np.ndim(out) == 0 else out


def q_ub(v):
    """Upper bound on the capacity of the additive-noise channel of variance v.

    The bare expression turns upward past ``V_UB_TURN`` (about 1.519).
    Capacity cannot grow with added noise, so the running minimum over
    smaller variances is still an upper bound; beyond the turning point the
    bound is held at ``Q_UB_FLOOR`` (about 0.1046 bits).
    """
    _check_v(v)
    out = np.maximum(q_ub_raw(np.minimum(v, V_UB_TURN)), 0.0)
    return float(out) if np.ndim(out) == 0 else out


def g_star(eta: float) -> float:
    """Smallest gain with a non-negative capacity lower bound."""
    if not 0.0 < eta < 1.0:
        raise ValueError("eta must lie in (0, 1)")
    return math.e / (2.0 * math.sqrt(eta * (1.0 - eta)))


def g_star_adv(eta: float) -> float:
    """Smallest gain at which the lower bound beats direct transduction."""
    if not 0.0 < eta < 1.0:
        raise ValueError("eta must lie in (0, 1)")
    if eta < 0.5:
        return g_star(eta)
    return math.e * math.sqrt(eta) / (2.0 * (1.0 - eta) ** 1.5)


def eta_min_positive(gain: float) -> float:
    """Smallest device ratio eta giving a positive lower bound at this gain."""
    if gain < math.e:
        raise ValueError("gain must be >= e")
    x = (math.e / gain) ** 2
    # 1 − √(1−x) written without cancellation
    return 0.5 * x / (1.0 + math.sqrt(1.0 - x))


def _threshold_problem(query: ThresholdQuery):
    """Residual ``bound(v(G)) − target`` on the unclamped bound, and v's scale."""
    target = 0.0
    if query.target == "advantage_over_direct":
        target = pure_loss_capacity(query.eta)
    scale = 1.0 / math.sqrt(query.eta * (1.0 - query.eta))
    if query.bound == "lower":
        def f(gain):
            return float(q_lb_raw(scale / gain)) - target
    else:
        def f(gain):
            return float(q_ub_raw(min(scale / gain, V_UB_TURN))) - target
    return f, scale


def gain_threshold(query: ThresholdQuery) -> float:
    """Gain (dB) at which the chosen bound reaches the chosen target rate.

    Bisection over linear G in [1, 1e6]. Both residuals are non-decreasing
    in G, so a root exists exactly when the residual changes sign there.

    Raises:
        ThresholdNotFound: if the residual does not change sign in the bracket.
    """
    f, scale = _threshold_problem(query)
    lo, hi = GAIN_BRACKET
    f_lo, f_hi = f(lo), f(hi)
    if f_lo > 0 or f_hi < 0:
        closest = closest_approach_db(query)
        raise ThresholdNotFound(
            f"{query.bound} bound never reaches the {query.target} target for "
            f"eta={query.eta} within G in [{lo:g}, {hi:g}]",
            closest_gain_db=closest,
            residual=f(float(from_db(closest))),
        )
    if f_lo == 0:
        return float(to_db(lo))
    root = bisect(f, lo, hi, xtol=GAIN_XTOL, maxiter=400)
    return float(to_db(root))


def closest_approach_db(query: ThresholdQuery) -> float:
    """Smallest gain (dB) in the bracket attaining the minimum residual.

    For the upper bound this is where it stops improving with less gain, i.e.
    where the variance equals ``V_UB_TURN``; for the lower bound it is the
    bracket end nearest the target.
    """
    f, scale = _threshold_problem(query)
    lo, hi = GAIN_BRACKET
    if f(lo) > 0:
        if query.bound == "upper":
            return float(to_db(min(max(scale / V_UB_TURN, lo), hi)))
        return float(to_db(lo))
    return float(to_db(hi))


def protocol_rate_bounds(params: ProtocolParams) -> CapacityBounds:
    noise = teleport_channel(params)
    v = sym_variance(noise.var_q, noise.var_p)
    return CapacityBounds(q_lb(v), q_ub(v))
