"""Gaussian states of bosonic modes in phase space.

Conventions: hbar = 2, so the vacuum has ``var(q) = var(p) = 1``. Quadratures
are ordered mode by mode, ``(q1, p1, q2, p2, ...)``, which makes the
symplectic form block diagonal with 2x2 blocks ``[[0, 1], [-1, 0]]``.

Every operation returns a new state; nothing is mutated in place.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np

Axis = Literal["position", "momentum"]

SYMMETRY_TOL = 1e-12
PHYSICALITY_TOL = 1e-9

_AXIS_OFFSET = {"position": 0, "momentum": 1, "q": 0, "p": 1}


def omega(n: int) -> np.ndarray:
    """Symplectic form for ``n`` modes in (q1, p1, ...) ordering."""
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _sym(cov: np.ndarray) -> np.ndarray:
    return 0.5 * (cov + cov.T)


@dataclass(frozen=True)
class GaussianState:
    """First and second moments of an N-mode Gaussian state.

    Attributes:
        mean: length-2N vector of quadrature means.
        cov: 2N x 2N real symmetric covariance matrix.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = np.array(self.cov, dtype=float)
        if mean.size == 0 or mean.size % 2:
            raise ValueError("mean must have even, nonzero length")
        if cov.shape != (mean.size, mean.size):
            raise ValueError(f"cov shape {cov.shape} does not match mean length {mean.size}")
        if not np.all(np.isfinite(cov)) or not np.all(np.isfinite(mean)):
            raise ValueError("state moments must be finite")
        mean.setflags(write=False)
        cov = _sym(cov)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def num_modes(self) -> int:
        return self.mean.size // 2

    def is_physical(self, tol: float = PHYSICALITY_TOL) -> bool:
        return min_symplectic_eigenvalue(self) >= 1.0 - tol

    def to_dict(self) -> dict:
        return {
            "num_modes": self.num_modes,
            "mean": self.mean.tolist(),
            "cov": self.cov.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GaussianState":
        state = cls(np.asarray(data["mean"]), np.asarray(data["cov"]))
        if int(data["num_modes"]) != state.num_modes:
            raise ValueError("num_modes inconsistent with mean/cov sizes")
        return state


@dataclass(frozen=True)
class SymplecticOp:
    """Affine phase-space map ``x -> matrix @ x + displacement``."""

    matrix: np.ndarray
    displacement: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        d = np.array(self.displacement, dtype=float).reshape(-1)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise ValueError("matrix must be square with even dimension")
        if d.size != m.shape[0]:
            raise ValueError("displacement length does not match matrix")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "displacement", d)

    @property
    def num_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def symplectic_residual(self) -> float:
        """Max-norm of ``S Ω Sᵀ - Ω``."""
        w = omega(self.num_modes)
        return float(np.max(np.abs(self.matrix @ w @ self.matrix.T - w)))


@dataclass(frozen=True)
class QuadratureLabel:
    mode: int
    axis: Axis

    def __post_init__(self):
        if self.axis not in ("position", "momentum"):
            raise ValueError(f"unknown axis {self.axis!r}")
        if self.mode < 0:
            raise ValueError("mode index must be non-negative")

    @property
    def index(self) -> int:
        return 2 * self.mode + _AXIS_OFFSET[self.axis]


def _check_mode(state: GaussianState, mode: int) -> None:
    if not 0 <= mode < state.num_modes:
        raise IndexError(f"mode {mode} out of range for {state.num_modes}-mode state")


# --- states -----------------------------------------------------------------


def vacuum_state(n: int) -> GaussianState:
    if n < 1:
        raise ValueError("number of modes must be >= 1")
    return GaussianState(np.zeros(2 * n), np.eye(2 * n))


def squeezed_vacuum(gain: float, axis: Axis = "position") -> GaussianState:
    """Single-mode squeezed vacuum with linear gain ``G >= 1``.

    The squeezed quadrature has variance ``1/G`` and the conjugate one ``G``.
    """
    if gain < 1:
        raise ValueError("squeezing gain must be >= 1; choose the axis to orient it")
    if axis == "position":
        diag = [1.0 / gain, gain]
    elif axis == "momentum":
        diag = [gain, 1.0 / gain]
    else:
        raise ValueError(f"unknown axis {axis!r}")
    return GaussianState(np.zeros(2), np.diag(diag))


def coherent_state(q_mean: float, p_mean: float) -> GaussianState:
    return GaussianState(np.array([q_mean, p_mean]), np.eye(2))


def tensor(a: GaussianState, b: GaussianState) -> GaussianState:
    """Product state; ``a``'s modes come first."""
    n = a.mean.size
    cov = np.zeros((n + b.mean.size,) * 2)
    cov[:n, :n] = a.cov
    cov[n:, n:] = b.cov
    return GaussianState(np.concatenate([a.mean, b.mean]), cov)


# --- linear maps ------------------------------------------------------------


def passive_op(unitary: np.ndarray, modes: Iterable[int], n: int) -> SymplecticOp:
    """Real orthogonal mode mixing applied identically to q and p.

    ``unitary[k, l]`` is the coefficient of input mode ``modes[l]`` in output
    mode ``modes[k]``. Modes not listed are untouched.
    """
    modes = list(modes)
    u = np.asarray(unitary, dtype=float)
    if u.shape != (len(modes), len(modes)):
        raise ValueError("unitary size does not match mode list")
    if len(set(modes)) != len(modes):
        raise ValueError("duplicate mode indices")
    if any(not 0 <= m < n for m in modes):
        raise IndexError("mode index out of range")
    mat = np.eye(2 * n)
    for k, mk in enumerate(modes):
        for l, ml in enumerate(modes):
            mat[2 * mk : 2 * mk + 2, 2 * ml : 2 * ml + 2] = u[k, l] * np.eye(2)
    return SymplecticOp(mat, np.zeros(2 * n))


def beamsplitter_op(eta: float, mode_i: int, mode_j: int, n: int) -> SymplecticOp:
    """Beamsplitter with ratio ``eta``.

    out_i = √η in_i + √(1−η) in_j
    out_j = √(1−η) in_i − √η in_j
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError("beamsplitter ratio must lie in [0, 1]")
    if mode_i == mode_j:
        raise ValueError("beamsplitter needs two distinct modes")
    t, r = np.sqrt(eta), np.sqrt(1.0 - eta)
    return passive_op([[t, r], [r, -t]], [mode_i, mode_j], n)


def apply_symplectic(state: GaussianState, op: SymplecticOp) -> GaussianState:
    if op.num_modes != state.num_modes:
        raise ValueError("operation and state have different mode counts")
    s = op.matrix
    return GaussianState(s @ state.mean + op.displacement, s @ state.cov @ s.T)


def apply_loss(state: GaussianState, mode: int, kappa: float) -> GaussianState:
    """Pure-loss channel with transmissivity ``kappa`` on one mode."""
    _check_mode(state, mode)
    if not 0.0 <= kappa <= 1.0:
        raise ValueError("transmissivity must lie in [0, 1]")
    scale = np.ones(state.mean.size)
    scale[2 * mode : 2 * mode + 2] = np.sqrt(kappa)
    cov = state.cov * np.outer(scale, scale)
    sl = slice(2 * mode, 2 * mode + 2)
    cov[sl, sl] += (1.0 - kappa) * np.eye(2)
    return GaussianState(state.mean * scale, cov)


def apply_additive_noise(
    state: GaussianState, mode: int, var_q: float, var_p: float
) -> GaussianState:
    """Random-displacement channel adding ``var_q``/``var_p`` to one mode."""
    _check_mode(state, mode)
    if var_q < 0 or var_p < 0:
        raise ValueError("added variances must be non-negative")
    cov = state.cov.copy()
    cov[2 * mode, 2 * mode] += var_q
    cov[2 * mode + 1, 2 * mode + 1] += var_p
    return GaussianState(state.mean, cov)


def displace(state: GaussianState, mode: int, dq: float, dp: float) -> GaussianState:
    _check_mode(state, mode)
    mean = state.mean.copy()
    mean[2 * mode] += dq
    mean[2 * mode + 1] += dp
    return GaussianState(mean, state.cov)


# --- measurement and marginals ---------------------------------------------


def _keep_indices(num_modes: int, drop_mode: int) -> np.ndarray:
    return np.array(
        [i for i in range(2 * num_modes) if i // 2 != drop_mode], dtype=int
    )


def condition_on_quadrature(
    mean: np.ndarray, cov: np.ndarray, index: int, outcome
) -> tuple[np.ndarray, np.ndarray]:
    """Condition Gaussian moments on a quadrature outcome and drop that mode.

    ``mean`` may carry leading batch dimensions, with ``outcome`` broadcasting
    against them; the conditional covariance does not depend on the outcome.

    Returns:
        (conditional means, conditional covariance) over the remaining modes.
    """
    cov = np.asarray(cov)
    mean = np.asarray(mean)
    var_t = cov[index, index]
    assert var_t > 0, "measured quadrature has non-positive variance"
    keep = _keep_indices(cov.shape[0] // 2, index // 2)
    c = cov[keep, index]
    cov_post = cov[np.ix_(keep, keep)] - np.outer(c, c) / var_t
    resid = (np.asarray(outcome) - mean[..., index]) / var_t
    mean_post = mean[..., keep] + resid[..., None] * c
    return mean_post, _sym(cov_post)


def homodyne(
    state: GaussianState, target: QuadratureLabel, rng
) -> tuple[float, GaussianState]:
    """Sample a homodyne outcome and return the conditioned remaining modes.

    ``rng`` needs a numpy-style ``normal(loc, scale)``. Measuring the last
    mode of a single-mode state is rejected since nothing would remain.
    """
    _check_mode(state, target.mode)
    if state.num_modes < 2:
        raise ValueError("homodyne needs at least one unmeasured mode to remain")
    i = target.index
    var_t = state.cov[i, i]
    assert var_t > 0, "measured quadrature has non-positive variance"
    outcome = float(rng.normal(state.mean[i], np.sqrt(var_t)))
    mean, cov = condition_on_quadrature(state.mean, state.cov, i, outcome)
    return outcome, GaussianState(mean, cov)


def homodyne_batch(
    means: np.ndarray, cov: np.ndarray, target: QuadratureLabel, rng
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised :func:`homodyne` over a batch of states sharing one covariance.

    Args:
        means: array of shape (n, 2N), one mean vector per trajectory.
        cov: common 2N x 2N covariance.
        target: quadrature to measure.
        rng: numpy Generator.

    Returns:
        outcomes (n,), conditional means (n, 2N-2), conditional covariance.
    """
    means = np.atleast_2d(means)
    i = target.index
    sd = np.sqrt(cov[i, i])
    outcomes = means[:, i] + sd * rng.standard_normal(means.shape[0])
    post_means, post_cov = condition_on_quadrature(means, cov, i, outcomes)
    return outcomes, post_means, post_cov


def partial_trace(state: GaussianState, keep: Iterable[int]) -> GaussianState:
    """Marginal state on the modes in ``keep`` (returned in ascending order)."""
    modes = sorted(set(keep))
    if not modes:
        raise ValueError("must keep at least one mode")
    for m in modes:
        _check_mode(state, m)
    idx = np.array([2 * m + k for m in modes for k in (0, 1)])
    return GaussianState(state.mean[idx], state.cov[np.ix_(idx, idx)])


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Symplectic spectrum, from the moduli of the eigenvalues of iΩV."""
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0] // 2
    ev = np.abs(np.linalg.eigvals(1j * omega(n) @ cov))
    # eigenvalues come in ± pairs
    return np.sort(ev)[::2]


def min_symplectic_eigenvalue(state: GaussianState) -> float:
    return float(symplectic_eigenvalues(state.cov).min())
