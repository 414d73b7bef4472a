"""
Teleportation through an unbalanced device
==========================================

The transduction device is a beamsplitter of ratio eta. Feeding it one arm of
a matched entangled pair plus homodyne feedforward turns it into a unit-gain
channel that only adds Gaussian noise. Here we check the closed form against
single shots and a batched Monte Carlo estimate.
"""

# %%
import numpy as np

from teleqt.phase_space import coherent_state
from teleqt.protocol import (
    ProtocolParams,
    estimate_channel_mc,
    teleport_channel,
    teleport_trajectory,
    unconditional_output,
)

np.set_printoptions(precision=4, suppress=True)
params = ProtocolParams(eta=0.6, gain=10.0)

# %% Closed form: var_q = 1/(eta G), var_p = 1/((1 - eta) G).
noise = teleport_channel(params)
print(f"added noise  q: {noise.var_q:.5f}  p: {noise.var_p:.5f}")

# %% A few single shots of a coherent input at (2, 3). The displacement
# lands near the input; the scatter is the added noise.
rng = np.random.default_rng(11)
inp = coherent_state(2.0, 3.0)
for _ in range(4):
    rec = teleport_trajectory(params, inp, rng)
    print(f"q~={rec.q_tilde:+.3f} p~={rec.p_tilde:+.3f}  output mean {rec.output.mean}")

# %% Averaging over outcomes gives the input plus the closed-form noise.
avg = unconditional_output(params, inp)
print("unconditional mean", avg.mean, "excess cov diag", np.diag(avg.cov) - 1)

# %% Monte Carlo estimate over 1e5 shots per probe.
est = estimate_channel_mc(params, 100_000, seed=2024)
print("gain", est["mean_map_gain"], "+/-", est["mean_map_gain_se"])
print("noise cov\n", est["noise_cov"])

# %% With loss the noise grows: (kk/G + 1 - kk)/(eta kappa_h) with kk = kappa_h kappa_s.
for kh, ks in [(1.0, 1.0), (0.95, 1.0), (1.0, 0.9), (0.9, 0.9)]:
    n = teleport_channel(ProtocolParams(0.6, 10.0, kh, ks))
    print(f"kappa_h={kh:.2f} kappa_s={ks:.2f}  var_q={n.var_q:.4f} var_p={n.var_p:.4f}")
