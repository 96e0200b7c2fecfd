import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lossy_cavity import measures
from lossy_cavity.dynamics import (
    COMPONENTS,
    ClosedState,
    DegeneracyError,
    IntegrationError,
    default_step,
    integrate,
    integrate_full,
    kernel_dimension,
    rhs_closed,
    steady_state,
)
from lossy_cavity.linalg import ContractError
from lossy_cavity.model import InitialState, SystemParams, liouvillian

SQRT2 = np.sqrt(2)


def closed_with(**entries):
    """ClosedState with rhoIJ=value keywords, e.g. closed_with(r22=1)."""
    y = np.zeros(17, complex)
    slot = {pair: n for n, pair in enumerate(COMPONENTS)}
    for key, v in entries.items():
        y[slot[(int(key[1]), int(key[2]))]] = v
    return ClosedState(y)


def nonzero(ds, tol=0.0):
    return {COMPONENTS[n]: v for n, v in enumerate(ds.y) if abs(v) > tol}


def test_rhs_from_ee0():
    p = SystemParams(0.8, 1.3, 5, -5, 0.6)
    d = nonzero(rhs_closed(p, ClosedState.initial("ee0")))
    assert d == {(1, 2): pytest.approx(1j * p.g2), (1, 4): pytest.approx(1j * p.g1)}


def test_rhs_from_eg1():
    p = SystemParams(0.8, 1.3, 5, 5, 0.6)
    d = nonzero(rhs_closed(p, closed_with(r22=1)))
    assert d == {
        (2, 2): pytest.approx(-p.kappa),
        (3, 3): pytest.approx(p.kappa),
        (1, 2): pytest.approx(-1j * p.g2),
        (2, 6): pytest.approx(1j * SQRT2 * p.g1),
    }


def _random_closed(seed):
    """A physical closed state: random density matrix on the two coupled sectors."""
    rng = np.random.default_rng(seed)
    rho = np.zeros((12, 12), complex)
    from lossy_cavity.model import LABEL_TO_FLAT as f

    for labels in ((1, 2, 4, 6), (3, 5, 7), (8,)):
        idx = [f[k] for k in labels]
        a = rng.normal(size=(len(idx), len(idx))) + 1j * rng.normal(size=(len(idx), len(idx)))
        rho[np.ix_(idx, idx)] = a @ a.conj().T
    rho /= np.trace(rho)
    return ClosedState.from_full(rho), rho


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 20), st.floats(-8, 8), st.floats(-8, 8))
def test_rhs_conserves_trace(seed, kappa, d1, d2):
    s, _ = _random_closed(seed)
    ds = rhs_closed(SystemParams(1, 1, d1, d2, kappa), s)
    assert abs(ds.y[:8].sum()) < 1e-12
    assert np.max(np.abs(ds.y[:8].imag)) < 1e-14


@pytest.mark.parametrize("seed", range(5))
def test_rhs_matches_liouvillian_on_random_states(seed):
    s, rho = _random_closed(seed)
    p = SystemParams(0.9, 1.2, 3.0, -4.5, 1.7)
    drho = (liouvillian(p) @ rho.reshape(-1)).reshape(12, 12)
    expected = ClosedState.from_full(drho).y
    np.testing.assert_allclose(rhs_closed(p, s).y, expected, atol=1e-12)


def test_closed_state_accessors():
    s = closed_with(r11=0.5, r22=0.5, r12=0.3 + 0.1j)
    assert s.rho(2, 1) == pytest.approx(0.3 - 0.1j)
    assert s.rho(3, 6) == 0
    assert s.trace() == pytest.approx(1.0)
    full = s.to_full()
    np.testing.assert_allclose(full, full.conj().T)


def test_default_step():
    assert default_step(SystemParams(kappa=0)) == 1e-3
    assert default_step(SystemParams(kappa=20)) == pytest.approx(2e-4)


def test_integrate_sampling_and_invariants():
    tr = integrate(SystemParams(1, 1, 5, 5, 0.2), "eg1", t_max=2.0, dt_out=0.05)
    assert len(tr) == 41
    assert np.all(np.diff(tr.times) > 0)
    assert np.max(np.abs(tr.trace() - 1)) < 1e-9
    assert tr.populations.min() >= 0
    for s in tr.states[::10]:
        s.check()


def test_integrate_rejects_bad_grid():
    p = SystemParams()
    with pytest.raises(ContractError):
        integrate(p, "ee0", t_max=-1)
    with pytest.raises(ContractError):
        integrate(p, "ee0", t_max=1.0, dt_out=0.3)


def test_integration_failure_names_invariant():
    # kappa*h far outside the RK4 stability region
    with pytest.raises(IntegrationError, match="violated at gt="):
        integrate(SystemParams(1, 1, 5, 5, 20), "eg1", t_max=50, dt_out=0.5, dt=0.5)


def test_unidentical_ee0_never_entangles():
    tr = integrate(SystemParams.unidentical(5, 0), "ee0", 50)
    c = measures.correlation_series(tr)["C"]
    # exact value is 0; the residue is RK4 error amplified by sqrt(a d) near revivals
    assert c.max() <= 1e-5


def test_identical_eg1_strong_decay_reaches_trapping_state():
    tr = integrate(SystemParams.identical(5, 20), "eg1", 50)
    last = tr.state(-1)
    assert last.rho(8, 8).real == pytest.approx(0.5, abs=0.01)
    assert last.rho(3, 3).real == pytest.approx(0.25, abs=0.01)
    assert last.rho(5, 5).real == pytest.approx(0.25, abs=0.01)
    assert abs(last.rho(3, 5)) == pytest.approx(0.25, abs=0.01)


def test_unidentical_eg1_strong_decay_reaches_ground():
    tr = integrate(SystemParams.unidentical(5, 20), "eg1", 50)
    assert tr.population(8)[-1] == pytest.approx(1.0, abs=0.01)


def test_integrate_full_matches_closed_route():
    p = SystemParams.identical(5, 0.2)
    a = integrate(p, "ee0", 50)
    b = integrate_full(p, "ee0", 50)
    assert np.max(np.abs(a.y - b.y)) < 1e-6


def test_integrate_full_bell_state_stays_pure_without_decay():
    tr = integrate_full(SystemParams.unidentical(5, 0), "bell", 50)
    pur = np.einsum("kij,kji->k", tr.full, tr.full).real
    assert np.max(np.abs(pur - 1)) < 1e-8
    assert np.max(np.abs(np.einsum("kii->k", tr.full) - 1)) < 1e-10


def test_excitation_number_conserved_without_decay():
    tr = integrate(SystemParams.identical(5, 0), "bell", 50)
    assert np.max(np.abs(tr.excitation() - tr.excitation()[0])) < 1e-8


@pytest.mark.parametrize("kappa", [0.02, 2.0, 20.0])
def test_excitation_number_non_increasing_with_decay(kappa):
    tr = integrate(SystemParams.unidentical(5, kappa), "ee0", 20)
    assert np.max(np.diff(tr.excitation())) <= 1e-10


def test_swap_symmetry_for_identical_atoms():
    p = SystemParams.identical(5, 0.2)
    a = integrate(p, "eg1", 50)
    b = integrate(p, "ge1", 50)
    pairs = {
        (2, 2): (4, 4), (3, 3): (5, 5), (2, 6): (4, 6), (3, 7): (5, 7),
        (2, 4): (4, 2), (3, 5): (5, 3), (1, 2): (1, 4),
        (1, 1): (1, 1), (6, 6): (6, 6), (7, 7): (7, 7), (8, 8): (8, 8), (1, 6): (1, 6),
    }
    for src, dst in pairs.items():
        assert np.max(np.abs(a.component(*src) - b.component(*dst))) < 1e-9, (src, dst)


def test_rk4_convergence_order():
    p = SystemParams(1, 1, 5, 5, 2.0)

    def run(h):
        return integrate(p, "eg1", t_max=2.0, dt_out=0.2, dt=h).y

    ref = run(0.1 / 32)
    e1 = np.max(np.abs(run(0.1) - ref))
    e2 = np.max(np.abs(run(0.05) - ref))
    assert 16 * 0.8 <= e1 / e2 <= 16 * 1.2


def test_steady_state_trapping_state():
    ss = steady_state(SystemParams.identical(5, 2), initial="eg1")
    expected = np.zeros((4, 4))
    expected[1, 1] = expected[2, 2] = 0.25
    expected[1, 2] = expected[2, 1] = -0.25
    expected[3, 3] = 0.5
    np.testing.assert_allclose(ss.atomic(), expected, atol=1e-8)


def test_steady_state_independent_of_kappa_and_detuning():
    ref = steady_state(SystemParams.identical(5, 2), "eg1").atomic()
    for p in (SystemParams.identical(5, 0.2), SystemParams.identical(3, 2)):
        np.testing.assert_allclose(steady_state(p, "eg1").atomic(), ref, atol=1e-8)


def test_steady_state_unidentical_is_ground_state():
    ss = steady_state(SystemParams.unidentical(5, 2))
    target = np.zeros((12, 12))
    target[9, 9] = 1
    np.testing.assert_allclose(ss.rho, target, atol=1e-8)
    # slowest relaxation rate here is about 0.036, so gt=400 is deep in the limit
    long_run = integrate_full(SystemParams.unidentical(5, 2), "eg1", 400, dt_out=1.0)
    np.testing.assert_allclose(long_run.full[-1], target, atol=1e-8)


def test_steady_state_selected_by_initial_state_matches_long_time_limit():
    p = SystemParams.identical(4, 1.0)
    for s0 in InitialState:
        ss = steady_state(p, s0)
        late = integrate_full(p, s0, 400, dt_out=1.0).full[-1]
        np.testing.assert_allclose(ss.rho, late, atol=1e-7)


def test_steady_state_degeneracy_errors():
    with pytest.raises(DegeneracyError):
        steady_state(SystemParams.identical(5, 0), "eg1")
    with pytest.raises(DegeneracyError, match="dimension 2"):
        steady_state(SystemParams.identical(5, 2))
    assert kernel_dimension(SystemParams.identical(5, 2)) == 2
    assert kernel_dimension(SystemParams.unidentical(5, 2)) == 1
