"""Generalized CV teleportation used as a quantum transducer.

Mode layout of the full simulation: the input modes first (the signal ``S``
plus any spectators it is entangled with), then the entangled pair ``A, B``.
After the device beamsplitter the slot of ``A`` holds ``S'`` and the slot of
``S`` holds ``A'``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .phase_space import (
    GaussianState,
    QuadratureLabel,
    apply_loss,
    apply_symplectic,
    beamsplitter_op,
    coherent_state,
    displace,
    homodyne,
    homodyne_batch,
    passive_op,
    squeezed_vacuum,
    tensor,
)

PROBES = ((0.0, 0.0), (2.0, 0.0), (0.0, 2.0))


@dataclass(frozen=True)
class ProtocolParams:
    """One protocol configuration.

    Attributes:
        eta: ratio of the transduction-device beamsplitter, in (0, 1).
        gain: linear squeezing gain G >= 1.
        kappa_h: combined device and homodyne efficiency, in (0, 1].
        kappa_s: squeezing-generation efficiency, in (0, 1].
    """

    eta: float
    gain: float
    kappa_h: float = 1.0
    kappa_s: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.eta < 1.0:
            raise ValueError(f"eta must lie in (0, 1), got {self.eta}")
        if not self.gain >= 1.0:
            raise ValueError(f"gain must be >= 1, got {self.gain}")
        if not 0.0 < self.kappa_h <= 1.0:
            raise ValueError(f"kappa_h must lie in (0, 1], got {self.kappa_h}")
        if not 0.0 < self.kappa_s <= 1.0:
            raise ValueError(f"kappa_s must lie in (0, 1], got {self.kappa_s}")


@dataclass(frozen=True)
class AdditiveNoiseSpec:
    var_q: float
    var_p: float

    def __post_init__(self):
        if self.var_q < 0 or self.var_p < 0:
            raise ValueError("noise variances must be non-negative")


@dataclass(frozen=True)
class TrajectoryRecord:
    q_tilde: float
    p_tilde: float
    output: GaussianState


def _epr_mixer(eta: float) -> np.ndarray:
    # A = √(1−η) in1 + √η in2,  B = −√η in1 + √(1−η) in2
    return np.array(
        [[np.sqrt(1 - eta), np.sqrt(eta)], [-np.sqrt(eta), np.sqrt(1 - eta)]]
    )


def make_generalized_epr(eta: float, gain: float, kappa_s: float = 1.0) -> GaussianState:
    """Two-mode state (A, B) squeezed along the unbalanced EPR quadratures.

    A position-squeezed and a momentum-squeezed vacuum, each sent through a
    loss ``kappa_s``, are mixed so that ``√(1−η) q_A − √η q_B`` and
    ``√η p_A + √(1−η) p_B`` both have variance ``kappa_s/G + 1 − kappa_s``.
    """
    ProtocolParams(eta, gain, 1.0, kappa_s)
    pair = tensor(squeezed_vacuum(gain, "position"), squeezed_vacuum(gain, "momentum"))
    pair = apply_loss(apply_loss(pair, 0, kappa_s), 1, kappa_s)
    return apply_symplectic(pair, passive_op(_epr_mixer(eta), [0, 1], 2))


def epr_variances(state: GaussianState, eta: float) -> tuple[float, float]:
    """Variances of ``√(1−η) q_A − √η q_B`` and ``√η p_A + √(1−η) p_B``."""
    if state.num_modes != 2:
        raise ValueError("EPR variances need a two-mode state")
    a, b = np.sqrt(1 - eta), np.sqrt(eta)
    u_q = np.array([a, 0.0, -b, 0.0])
    u_p = np.array([0.0, b, 0.0, a])
    return float(u_q @ state.cov @ u_q), float(u_p @ state.cov @ u_p)


def epr_antisqueezed_variances(state: GaussianState, eta: float) -> tuple[float, float]:
    """Variances of the orthogonal combinations ``q_{+,η}`` and ``p_{-,η}``."""
    a, b = np.sqrt(1 - eta), np.sqrt(eta)
    u_q = np.array([b, 0.0, a, 0.0])
    u_p = np.array([0.0, a, 0.0, -b])
    return float(u_q @ state.cov @ u_q), float(u_p @ state.cov @ u_p)


def teleport_channel(params: ProtocolParams) -> AdditiveNoiseSpec:
    """Closed-form added noise of the (possibly lossy) protocol."""
    kk = params.kappa_h * params.kappa_s
    # numerator scaled by G so that kappa = 1 gives exactly 1/(ηG), 1/((1−η)G)
    num = kk + (1.0 - kk) * params.gain
    return AdditiveNoiseSpec(
        num / (params.eta * params.gain * params.kappa_h),
        num / ((1.0 - params.eta) * params.gain * params.kappa_h),
    )


# --- simulation -------------------------------------------------------------


def _pre_measurement(
    params: ProtocolParams, inp: GaussianState, signal: int
) -> tuple[GaussianState, int, int, int]:
    """Joint state right before the homodynes.

    Returns the state and the indices of the S' slot, the A' slot and B.
    """
    n_in = inp.num_modes
    if not 0 <= signal < n_in:
        raise IndexError("signal mode out of range")
    a, b = n_in, n_in + 1
    state = tensor(inp, make_generalized_epr(params.eta, params.gain, params.kappa_s))
    # homodyne loss commutes back through the device when equal on both arms
    state = apply_loss(state, signal, params.kappa_h)
    state = apply_loss(state, a, params.kappa_h)
    state = apply_symplectic(state, beamsplitter_op(params.eta, a, signal, n_in + 2))
    return state, a, signal, b


def _feedforward(params: ProtocolParams) -> tuple[float, float]:
    """Gains (q_B per q̃, p_B per p̃) of the corrective displacement."""
    return (
        -1.0 / np.sqrt(params.kappa_h * params.eta),
        1.0 / np.sqrt(params.kappa_h * (1.0 - params.eta)),
    )


def _after_removal(index: int, removed: list[int]) -> int:
    return index - sum(1 for r in removed if r < index)


def teleport_trajectory(
    params: ProtocolParams, inp: GaussianState, rng, signal: int = 0
) -> TrajectoryRecord:
    """Run one stochastic shot of the protocol.

    Args:
        params: protocol configuration.
        inp: input state; ``signal`` selects the mode to teleport. Other input
            modes are carried along untouched, ahead of the output mode.
        rng: numpy Generator used for both homodyne outcomes.
        signal: index of the teleported mode within ``inp``.

    Returns:
        Outcomes and the conditional state after feedforward.
    """
    state, s_prime, a_prime, b = _pre_measurement(params, inp, signal)
    p_tilde, state = homodyne(state, QuadratureLabel(s_prime, "momentum"), rng)
    a_idx = _after_removal(a_prime, [s_prime])
    q_tilde, state = homodyne(state, QuadratureLabel(a_idx, "position"), rng)
    b_idx = _after_removal(b, [s_prime, a_prime])
    gq, gp = _feedforward(params)
    state = displace(state, b_idx, gq * q_tilde, gp * p_tilde)
    return TrajectoryRecord(q_tilde=q_tilde, p_tilde=p_tilde, output=state)


def unconditional_output(
    params: ProtocolParams, inp: GaussianState, signal: int = 0
) -> GaussianState:
    """Outcome-averaged output state, from the conditioning algebra.

    Conditioning on the outcome pair x = (p̃, q̃) gives an outcome-independent
    covariance and a mean linear in x; adding the feedforward turns the mean
    into ``μ + M (x − μ_x) + F μ_x``. Averaging over x ~ N(μ_x, Σ_x) yields
    covariance ``cond_cov + M Σ_x Mᵀ``.
    """
    state, s_prime, a_prime, b = _pre_measurement(params, inp, signal)
    n = state.num_modes
    meas = [2 * s_prime + 1, 2 * a_prime]
    rest = [i for i in range(2 * n) if i // 2 not in (s_prime, a_prime)]
    cov, mu = state.cov, state.mean
    sxx = cov[np.ix_(meas, meas)]
    srx = cov[np.ix_(rest, meas)]
    k = srx @ np.linalg.inv(sxx)
    cond_cov = cov[np.ix_(rest, rest)] - k @ srx.T

    gq, gp = _feedforward(params)
    b_pos = rest.index(2 * b)
    f = np.zeros((len(rest), 2))
    f[b_pos, 1] = gq
    f[b_pos + 1, 0] = gp
    m = k + f
    mean = mu[rest] + f @ mu[meas]
    return GaussianState(mean, cond_cov + m @ sxx @ m.T)


def estimate_channel_mc(params: ProtocolParams, n_samples: int, seed) -> dict:
    """Monte Carlo estimate of the teleportation channel from sampled shots.

    Each probe coherent state in ``PROBES`` is teleported ``n_samples`` times.
    Outcomes are drawn with the same homodyne sampling rule as
    :func:`teleport_trajectory`, batched over shots.

    Returns:
        dict with ``mean_map_gain`` (q gain from the (2, 0) probe, p gain from
        the (0, 2) probe), ``noise_cov`` (pooled added-noise covariance),
        ``probe_means``, and standard errors for each.
    """
    if n_samples < 100:
        raise ValueError("n_samples must be >= 100")
    children = np.random.SeedSequence(seed).spawn(len(PROBES))
    gq, gp = _feedforward(params)
    out_means, cond_cov = [], None
    for (q0, p0), child in zip(PROBES, children):
        rng = np.random.default_rng(child)
        state, s_prime, a_prime, b = _pre_measurement(params, coherent_state(q0, p0), 0)
        means = np.broadcast_to(state.mean, (n_samples, state.mean.size))
        p_t, means, cov = homodyne_batch(
            means, state.cov, QuadratureLabel(s_prime, "momentum"), rng
        )
        a_idx = _after_removal(a_prime, [s_prime])
        q_t, means, cov = homodyne_batch(means, cov, QuadratureLabel(a_idx, "position"), rng)
        means = means.copy()
        means[:, 0] += gq * q_t
        means[:, 1] += gp * p_t
        out_means.append(means)
        cond_cov = cov

    excess = cond_cov - np.eye(2)
    covs = np.array([np.cov(m, rowvar=False) for m in out_means])
    pooled = covs.mean(axis=0)
    noise_cov = pooled + excess
    # var of a sample covariance entry: (s_ii s_jj + s_ij²)/(n−1), pooled over probes
    se_cov = np.sqrt(
        (np.outer(np.diag(pooled), np.diag(pooled)) + pooled**2)
        / (len(PROBES) * (n_samples - 1))
    )
    probe_means = np.array([m.mean(axis=0) for m in out_means])
    probe_se = np.array([m.std(axis=0, ddof=1) / np.sqrt(n_samples) for m in out_means])
    gain = np.array([probe_means[1, 0] / 2.0, probe_means[2, 1] / 2.0])
    gain_se = np.array([probe_se[1, 0] / 2.0, probe_se[2, 1] / 2.0])
    return {
        "mean_map_gain": gain,
        "mean_map_gain_se": gain_se,
        "noise_cov": noise_cov,
        "noise_cov_se": se_cov,
        "probe_inputs": np.array(PROBES),
        "probe_means": probe_means,
        "probe_means_se": probe_se,
    }


def entanglement_swap(
    params: ProtocolParams, gain_in: float
) -> tuple[GaussianState, tuple[float, float]]:
    """Teleport one arm of a balanced two-mode squeezed vacuum.

    Returns the unconditional (I, B') state and the variances of
    ``(q_I − q_B')/√2`` and ``(p_I + p_B')/√2``.
    """
    if gain_in < 1:
        raise ValueError("input gain must be >= 1")
    tmsv = make_generalized_epr(0.5, gain_in, 1.0)
    out = unconditional_output(params, tmsv, signal=1)
    return out, epr_variances(out, 0.5)
