"""Gaussian simulation of transduction by generalized CV teleportation."""

from .capacity import (
    CapacityBounds,
    ThresholdNotFound,
    ThresholdQuery,
    g_star,
    g_star_adv,
    gain_threshold,
    protocol_rate_bounds,
    q_lb,
    q_ub,
)
from .gkp import GkpLattice, gkp_error_bound, gkp_error_mc, gkp_spacings
from .phase_space import GaussianState, QuadratureLabel, SymplecticOp
from .protocol import (
    AdditiveNoiseSpec,
    ProtocolParams,
    TrajectoryRecord,
    entanglement_swap,
    estimate_channel_mc,
    make_generalized_epr,
    teleport_channel,
    teleport_trajectory,
    unconditional_output,
)

__version__ = "0.1.0"
