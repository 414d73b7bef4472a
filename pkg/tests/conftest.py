import numpy as np
import pytest

_ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def criterion():
    """Record a one-line PASS/FAIL verdict for the acceptance summary."""

    def record(name, ok, detail=""):
        _ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip())
        print(_ACCEPTANCE_LINES[-1])
        return ok

    return record


def random_state(rng, n_modes=1, spread=2.0):
    """Random physical Gaussian state: thermal noise dressed by a random symplectic."""
    from teleqt.phase_space import (
        GaussianState,
        apply_symplectic,
        passive_op,
        squeezed_vacuum,
        tensor,
        vacuum_state,
    )

    state = None
    for _ in range(n_modes):
        g = 10 ** rng.uniform(0, 1)
        mode = squeezed_vacuum(g, rng.choice(["position", "momentum"]))
        nu = 1 + rng.exponential(0.5)
        mode = GaussianState(rng.normal(0, spread, 2), nu * mode.cov)
        state = mode if state is None else tensor(state, mode)
    if n_modes > 1:
        q, _ = np.linalg.qr(rng.normal(size=(n_modes, n_modes)))
        state = apply_symplectic(state, passive_op(q, range(n_modes), n_modes))
    return state


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
