"""
How much squeezing makes transduction useful?
=============================================

The teleported channel adds noise of symmetric variance v = 1/(G sqrt(eta(1-eta))).
Its quantum capacity lies between two closed-form bounds. We tabulate them,
then look for the squeezing needed for a positive rate and for beating direct
transduction through the bare beamsplitter.
"""

# %%
import numpy as np

from teleqt.capacity import (
    V_UB_TURN,
    ThresholdNotFound,
    ThresholdQuery,
    from_db,
    g_star,
    g_star_adv,
    gain_threshold,
    protocol_rate_bounds,
    pure_loss_capacity,
    q_ub,
    q_ub_raw,
    to_db,
)
from teleqt.protocol import ProtocolParams

# %% Rate bounds against eta at 10 dB of squeezing.
g = float(from_db(10.0))
print(" eta   lower   upper   direct")
for eta in (0.1, 0.3, 0.5, 0.7, 0.9):
    b = protocol_rate_bounds(ProtocolParams(eta, g))
    print(f"{eta:4.1f}  {b.lower:6.3f}  {b.upper:6.3f}  {pure_loss_capacity(eta):6.3f}")

# %% Thresholds from bisection agree with the closed forms for the lower bound.
for eta in (0.3, 0.5, 0.6, 0.8):
    pos = gain_threshold(ThresholdQuery(eta, "positive_rate", "lower"))
    adv = gain_threshold(ThresholdQuery(eta, "advantage_over_direct", "lower"))
    print(f"eta={eta}: positive {pos:.4f} dB (closed {to_db(g_star(eta)):.4f}), "
          f"advantage {adv:.4f} dB (closed {to_db(g_star_adv(eta)):.4f})")

# %% The upper-bound expression never reaches zero: it bottoms out near
# v = 1.519, and q_ub holds that floor for noisier channels.
v = np.array([0.5, 1.0, V_UB_TURN, 3.0, 10.0])
print("v      ", v.round(3))
print("raw    ", np.round(q_ub_raw(v), 4))
print("q_ub   ", np.round(q_ub(v), 4))
try:
    gain_threshold(ThresholdQuery(0.5, "positive_rate", "upper"))
except ThresholdNotFound as exc:
    print(f"no upper-bound threshold; floor {exc.residual:.5f} bits reached at "
          f"{exc.closest_gain_db:.4f} dB")
