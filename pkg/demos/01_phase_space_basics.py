"""
Gaussian states in phase space
==============================

Covariance matrices use vacuum variance 1 and quadratures ordered
(q1, p1, q2, p2, ...). This walk-through builds a squeezed state, sends it
through loss, and measures one half of an entangled pair.
"""

# %%
import numpy as np

from teleqt.phase_space import (
    QuadratureLabel,
    apply_loss,
    homodyne,
    min_symplectic_eigenvalue,
    squeezed_vacuum,
)
from teleqt.protocol import epr_variances, make_generalized_epr

np.set_printoptions(precision=4, suppress=True)

# %% A 10 dB position-squeezed vacuum has variances 1/G and G.
sq = squeezed_vacuum(10.0, "position")
print("squeezed cov:\n", sq.cov)

# %% Loss mixes in vacuum: the squeezed variance drifts back towards 1.
for kappa in (1.0, 0.9, 0.5):
    lossy = apply_loss(sq, 0, kappa)
    print(f"kappa={kappa:.1f}  var q = {lossy.cov[0, 0]:.4f}  "
          f"min symplectic eigenvalue = {min_symplectic_eigenvalue(lossy):.4f}")

# %% An unbalanced entangled pair: both joint quadratures have variance 1/G.
pair = make_generalized_epr(eta=0.3, gain=10.0)
print("joint variances:", epr_variances(pair, 0.3))

# %% Measuring q on mode A steers mode B; the conditional covariance does not
# depend on the outcome, only the mean does.
rng = np.random.default_rng(7)
for _ in range(3):
    outcome, rest = homodyne(pair, QuadratureLabel(0, "position"), rng)
    print(f"q_A = {outcome:+.3f}  ->  mean of B = {rest.mean}, var q_B = {rest.cov[0, 0]:.4f}")
