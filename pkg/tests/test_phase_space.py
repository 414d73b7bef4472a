import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from teleqt.phase_space import (
    GaussianState,
    QuadratureLabel,
    SymplecticOp,
    apply_additive_noise,
    apply_loss,
    apply_symplectic,
    beamsplitter_op,
    coherent_state,
    displace,
    homodyne,
    homodyne_batch,
    min_symplectic_eigenvalue,
    omega,
    partial_trace,
    squeezed_vacuum,
    symplectic_eigenvalues,
    tensor,
    vacuum_state,
)
from teleqt.protocol import make_generalized_epr

from conftest import random_state


class ForcedMean:
    """Stand-in generator that always returns the distribution mean."""

    def normal(self, loc, scale):
        return loc


def test_vacuum():
    for n in (1, 3):
        v = vacuum_state(n)
        assert v.num_modes == n
        np.testing.assert_array_equal(v.mean, np.zeros(2 * n))
        np.testing.assert_array_equal(v.cov, np.eye(2 * n))
        np.testing.assert_allclose(symplectic_eigenvalues(v.cov), np.ones(n))
    with pytest.raises(ValueError):
        vacuum_state(0)


def test_vacuum_marginals():
    v = vacuum_state(2)
    for m in (0, 1):
        np.testing.assert_array_equal(partial_trace(v, [m]).cov, vacuum_state(1).cov)


def test_squeezed_vacuum():
    np.testing.assert_array_equal(squeezed_vacuum(1, "momentum").cov, np.eye(2))
    np.testing.assert_allclose(squeezed_vacuum(10, "position").cov, np.diag([0.1, 10]))
    np.testing.assert_allclose(squeezed_vacuum(10, "momentum").cov, np.diag([10, 0.1]))
    assert np.linalg.det(squeezed_vacuum(7.3).cov) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        squeezed_vacuum(0.5)


def test_coherent_and_tensor():
    c = coherent_state(2, -3)
    np.testing.assert_array_equal(c.mean, [2, -3])
    np.testing.assert_array_equal(c.cov, np.eye(2))
    t = tensor(coherent_state(1, 0), coherent_state(0, 1))
    np.testing.assert_array_equal(t.mean, [1, 0, 0, 1])
    np.testing.assert_array_equal(tensor(vacuum_state(1), vacuum_state(1)).cov, np.eye(4))
    s = tensor(squeezed_vacuum(4, "position"), squeezed_vacuum(4, "momentum"))
    np.testing.assert_allclose(s.cov, np.diag([0.25, 4, 4, 0.25]))


def test_coherent_homodyne_distribution(rng):
    state = tensor(coherent_state(2, -3), vacuum_state(1))
    outs = [homodyne(state, QuadratureLabel(0, "position"), rng)[0] for _ in range(4000)]
    assert np.mean(outs) == pytest.approx(2.0, abs=4 / np.sqrt(4000))
    assert np.var(outs) == pytest.approx(1.0, abs=0.1)


def test_beamsplitter_boundaries():
    swap = beamsplitter_op(0.0, 0, 1, 2).matrix
    np.testing.assert_allclose(swap, [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]])
    ident = beamsplitter_op(1.0, 0, 1, 2).matrix
    np.testing.assert_allclose(ident, np.diag([1, 1, -1, -1]))


def test_beamsplitter_half():
    s = beamsplitter_op(0.5, 0, 1, 2)
    h = np.sqrt(0.5)
    # q rows
    np.testing.assert_allclose(s.matrix[0, [0, 2]], [h, h])
    np.testing.assert_allclose(s.matrix[2, [0, 2]], [h, -h])
    assert s.symplectic_residual() < 1e-12


def test_beamsplitter_errors():
    with pytest.raises(ValueError):
        beamsplitter_op(1.2, 0, 1, 2)
    with pytest.raises(ValueError):
        beamsplitter_op(0.3, 1, 1, 2)


def test_beamsplitter_leaves_other_modes():
    s = beamsplitter_op(0.3, 0, 2, 3).matrix
    np.testing.assert_array_equal(s[2:4, :], np.eye(6)[2:4, :])


def test_apply_symplectic_identity_and_vacuum():
    st_ = random_state(np.random.default_rng(1), 2)
    same = apply_symplectic(st_, SymplecticOp(np.eye(4), np.zeros(4)))
    np.testing.assert_allclose(same.cov, st_.cov)
    vac = apply_symplectic(vacuum_state(2), beamsplitter_op(0.5, 0, 1, 2))
    np.testing.assert_allclose(vac.cov, np.eye(4), atol=1e-15)


def test_beamsplitter_on_squeezed_pair():
    eta, g = 0.35, 8.0
    pair = tensor(squeezed_vacuum(g, "position"), squeezed_vacuum(g, "momentum"))
    # mixing with eta' = 1 - eta puts √(1−η) in1 + √η in2 on mode 0
    out = apply_symplectic(pair, beamsplitter_op(1 - eta, 0, 1, 2))
    u = np.array([np.sqrt(1 - eta), 0, np.sqrt(eta), 0])
    assert u @ out.cov @ u == pytest.approx(1 / g)


def test_loss():
    st_ = random_state(np.random.default_rng(2), 2)
    np.testing.assert_allclose(apply_loss(st_, 1, 1.0).cov, st_.cov)
    gone = apply_loss(st_, 0, 0.0)
    np.testing.assert_allclose(gone.cov[:2, :2], np.eye(2))
    np.testing.assert_allclose(gone.cov[:2, 2:], 0)
    np.testing.assert_allclose(gone.mean[:2], 0)
    half = apply_loss(coherent_state(2, 0), 0, 0.5)
    np.testing.assert_allclose(half.mean, [1.41421356, 0], atol=1e-8)
    np.testing.assert_allclose(half.cov, np.eye(2))


def test_loss_matches_beamsplitter_dilation(rng):
    # oracle: couple to a vacuum ancilla on a beamsplitter and trace it out
    st_ = random_state(rng, 2)
    kappa = 0.37
    big = tensor(st_, vacuum_state(1))
    big = apply_symplectic(big, beamsplitter_op(kappa, 1, 2, 3))
    ref = partial_trace(big, [0, 1])
    got = apply_loss(st_, 1, kappa)
    np.testing.assert_allclose(got.cov, ref.cov, atol=1e-12)
    np.testing.assert_allclose(got.mean, ref.mean, atol=1e-12)


def test_additive_noise():
    v = vacuum_state(1)
    np.testing.assert_array_equal(apply_additive_noise(v, 0, 0, 0).cov, v.cov)
    np.testing.assert_allclose(apply_additive_noise(v, 0, 1, 1).cov, 2 * np.eye(2))
    np.testing.assert_allclose(
        apply_additive_noise(v, 0, 1 / 6, 1 / 4).cov, np.diag([1.16666667, 1.25]), atol=1e-8
    )
    with pytest.raises(ValueError):
        apply_additive_noise(v, 0, -0.1, 0)


def test_displace():
    v = vacuum_state(1)
    np.testing.assert_array_equal(displace(v, 0, 0, 0).mean, v.mean)
    d = displace(v, 0, 3, -1)
    assert d == d and np.allclose(d.mean, coherent_state(3, -1).mean)
    dd = displace(displace(v, 0, 1, 2), 0, -0.5, 1)
    np.testing.assert_allclose(dd.mean, [0.5, 3])


def test_homodyne_uncorrelated(rng):
    out, post = homodyne(vacuum_state(2), QuadratureLabel(1, "position"), rng)
    assert post.num_modes == 1
    np.testing.assert_array_equal(post.cov, np.eye(2))
    np.testing.assert_array_equal(post.mean, [0, 0])


def test_homodyne_tracks_epr_partner():
    epr = make_generalized_epr(0.5, 1e6)
    rng = np.random.default_rng(5)
    outs, qb = [], []
    for _ in range(300):
        o, post = homodyne(epr, QuadratureLabel(0, "position"), rng)
        outs.append(o)
        qb.append(post.mean[0])
    assert np.corrcoef(outs, qb)[0, 1] > 0.999


def test_homodyne_forced_outcome_covariance_independent():
    st_ = random_state(np.random.default_rng(3), 3)
    shifted = GaussianState(st_.mean + 5.0, st_.cov)
    _, a = homodyne(st_, QuadratureLabel(1, "momentum"), ForcedMean())
    _, b = homodyne(shifted, QuadratureLabel(1, "momentum"), ForcedMean())
    np.testing.assert_allclose(a.cov, b.cov)


def test_homodyne_consistency_with_marginal(rng):
    # averaging conditional moments over outcomes reproduces the marginal
    st_ = random_state(rng, 3)
    n = 100_000
    target = QuadratureLabel(1, "position")
    means = np.broadcast_to(st_.mean, (n, 6))
    _, post_means, post_cov = homodyne_batch(means, st_.cov, target, rng)
    marg = partial_trace(st_, [0, 2])
    avg_mean = post_means.mean(axis=0)
    se = post_means.std(axis=0) / np.sqrt(n)
    assert np.all(np.abs(avg_mean - marg.mean) < 5 * se + 1e-9)
    total = post_cov + np.cov(post_means, rowvar=False)
    scale = np.sqrt(np.outer(np.diag(marg.cov), np.diag(marg.cov)) * 2 / n)
    assert np.all(np.abs(total - marg.cov) < 5 * scale)


def test_homodyne_batch_matches_single():
    st_ = random_state(np.random.default_rng(8), 2)
    t = QuadratureLabel(0, "momentum")
    o1, post = homodyne(st_, t, np.random.default_rng(0))
    cov = st_.cov
    from teleqt.phase_space import condition_on_quadrature

    m2, c2 = condition_on_quadrature(st_.mean, cov, t.index, o1)
    np.testing.assert_allclose(post.mean, m2)
    np.testing.assert_allclose(post.cov, c2)


def test_partial_trace():
    st_ = random_state(np.random.default_rng(4), 3)
    full = partial_trace(st_, [0, 1, 2])
    np.testing.assert_array_equal(full.cov, st_.cov)
    a, b = coherent_state(1, 2), squeezed_vacuum(3)
    np.testing.assert_allclose(partial_trace(tensor(a, b), [1]).cov, b.cov)
    with pytest.raises(ValueError):
        partial_trace(st_, [])


def test_partial_trace_of_epr_arm():
    eta, g = 0.3, 10.0
    a = partial_trace(make_generalized_epr(eta, g), [0])
    assert a.cov[0, 0] == pytest.approx((1 - eta) / g + eta * g)
    assert a.cov[1, 1] == pytest.approx((1 - eta) * g + eta / g)
    bal = partial_trace(make_generalized_epr(0.5, g), [1])
    assert bal.cov[0, 0] == pytest.approx(bal.cov[1, 1])


def test_symplectic_eigenvalues():
    assert min_symplectic_eigenvalue(vacuum_state(1)) == pytest.approx(1)
    assert min_symplectic_eigenvalue(squeezed_vacuum(13)) == pytest.approx(1)
    noisy = apply_additive_noise(vacuum_state(1), 0, 1, 1)
    assert min_symplectic_eigenvalue(noisy) == pytest.approx(2)


def test_symplectic_eigenvalues_single_mode_det(rng):
    for _ in range(20):
        st_ = random_state(rng, 1)
        assert symplectic_eigenvalues(st_.cov)[0] == pytest.approx(np.sqrt(np.linalg.det(st_.cov)))


def test_state_validation():
    with pytest.raises(ValueError):
        GaussianState(np.zeros(3), np.eye(3))
    with pytest.raises(ValueError):
        GaussianState(np.zeros(2), np.eye(4))
    with pytest.raises(IndexError):
        displace(vacuum_state(1), 1, 0, 0)


def test_cov_symmetrised():
    c = np.array([[1.0, 0.2 + 1e-9], [0.2, 1.0]])
    s = GaussianState(np.zeros(2), c)
    assert np.max(np.abs(s.cov - s.cov.T)) == 0


def test_json_roundtrip():
    st_ = random_state(np.random.default_rng(6), 2)
    back = GaussianState.from_dict(st_.to_dict())
    np.testing.assert_array_equal(back.cov, st_.cov)
    np.testing.assert_array_equal(back.mean, st_.mean)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1))
def test_loss_composition(k1, k2):
    st_ = random_state(np.random.default_rng(11), 2)
    a = apply_loss(apply_loss(st_, 0, k1), 0, k2)
    b = apply_loss(st_, 0, k1 * k2)
    np.testing.assert_allclose(a.cov, b.cov, atol=1e-12)
    np.testing.assert_allclose(a.mean, b.mean, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1))
def test_beamsplitter_symplectic(eta):
    op = beamsplitter_op(eta, 0, 1, 2)
    assert op.symplectic_residual() < 1e-12


def test_omega_antisymmetric():
    w = omega(3)
    np.testing.assert_array_equal(w, -w.T)
    np.testing.assert_array_equal(w @ w, -np.eye(6))
