"""Rectangular GKP qubit against the protocol's asymmetric displacement noise."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf, erfc

BASE_SPACING = 2.0 * math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class GkpLattice:
    l_q: float
    l_p: float

    @property
    def half_widths(self) -> tuple[float, float]:
        """Correctable half-widths per quadrature (half the spacing)."""
        return self.l_q / 2.0, self.l_p / 2.0


def _check(eta: float, gain: float) -> None:
    if not 0.0 < eta < 1.0:
        raise ValueError("eta must lie in (0, 1)")
    if gain < 1.0:
        raise ValueError("gain must be >= 1")


def gkp_spacings(eta: float) -> GkpLattice:
    """Spacings with ratio √((1−η)/η) and product 8π."""
    if not 0.0 < eta < 1.0:
        raise ValueError("eta must lie in (0, 1)")
    r = ((1.0 - eta) / eta) ** 0.25
    return GkpLattice(r * BASE_SPACING, BASE_SPACING / r)


def gkp_error_bound(eta: float, gain: float) -> float:
    """Probability that a displacement escapes the correctable box.

    Equals ``1 − erf(a)²`` with ``a = √(Gπ) (η(1−η))^{1/4}``, evaluated as
    ``erfc(a) (1 + erf(a))`` so it stays accurate when it is tiny.
    """
    _check(eta, gain)
    a = math.sqrt(gain * math.pi) * (eta * (1.0 - eta)) ** 0.25
    return float(erfc(a) * (1.0 + erf(a)))


def gkp_error_mc(eta: float, gain: float, n_samples: int, seed) -> tuple[float, float]:
    """Sampled failure rate of the box decoder and its binomial standard error.

    Displacements are drawn with variances 1/(ηG) and 1/((1−η)G); a shot fails
    when either component falls outside its half-width.
    """
    _check(eta, gain)
    if n_samples < 1000:
        raise ValueError("n_samples must be >= 1000")
    rng = np.random.default_rng(seed)
    wq, wp = gkp_spacings(eta).half_widths
    dq = rng.normal(0.0, math.sqrt(1.0 / (eta * gain)), n_samples)
    dp = rng.normal(0.0, math.sqrt(1.0 / ((1.0 - eta) * gain)), n_samples)
    fail = (np.abs(dq) >= wq) | (np.abs(dp) >= wp)
    p_hat = float(fail.mean())
    se = math.sqrt(p_hat * (1.0 - p_hat) / n_samples)
    return p_hat, se
