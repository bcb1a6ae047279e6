import numpy as np
import pytest

from sun_coherence.coherence_map import (
    coherence_to_rho,
    eom_matrix_al,
    eom_matrix_he,
    random_hermitian,
    rho_to_coherence,
)
from sun_coherence.dynamics import (
    PulseProfile,
    TimeGrid,
    Trajectory,
    check_commuting_family,
    commutator_spread,
    cumulative_integral,
    excited_population,
    ground_state_rho,
    magnus_propagate,
    propagate_coherence_rk4,
    propagate_liouville,
)
from sun_coherence.exceptions import NonCommutingError, NonFiniteStateError, NumericalAbort
from sun_coherence.su_n_algebra import build_generators, structure_constants
from sun_coherence.wei_norman import adjoint_rotation_generators

L = adjoint_rotation_generators()
GAUSS = PulseProfile("gaussian", omega0=2.0, delta0=0.8, detuning_mode="constant", center=5.0, width=1.5)
GAUSS_PROP = PulseProfile("gaussian", omega0=2.0, delta0=0.8, detuning_mode="proportional", center=5.0, width=1.5)


def test_time_grid():
    g = TimeGrid(0.0, 2.0, 4)
    np.testing.assert_allclose(g.times, [0, 0.5, 1, 1.5, 2])
    assert g.dt == 0.5
    assert g.refined().n_steps == 8
    for bad in [(1.0, 1.0, 3), (0.0, 1.0, 0), (0.0, 1.0, 2.5)]:
        with pytest.raises(ValueError):
            TimeGrid(*bad)


@pytest.mark.parametrize("shape", ["constant", "gaussian", "sech", "sin2"])
def test_envelopes_peak_normalised(shape):
    p = PulseProfile(shape, center=3.0, width=1.0)
    t = np.linspace(0, 6, 601)
    q = p.envelope(t)
    assert q.min() >= 0 and q.max() == pytest.approx(1.0)
    assert p.envelope(3.0) == pytest.approx(1.0)
    np.testing.assert_allclose([p.envelope(float(x)) for x in t[::37]], q[::37], atol=1e-15)


def test_sin2_support():
    p = PulseProfile("sin2", center=0.0, width=2.0)
    assert p.envelope(2.5) == 0.0
    assert p.envelope(1.0) == pytest.approx(0.5)


def test_custom_envelope_interpolates():
    p = PulseProfile("custom", samples=[(0.0, 0.0), (1.0, 1.0), (3.0, 0.0)])
    assert p.envelope(0.5) == pytest.approx(0.5)
    assert p.envelope(2.0) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        PulseProfile("custom", samples=[(0.0, 0.0), (1.0, 0.5)])
    with pytest.raises(ValueError):
        PulseProfile("custom", samples=[(1.0, 1.0), (0.0, 0.0)])
    with pytest.raises(ValueError):
        PulseProfile("custom")


def test_pulse_rejects_bad_options():
    with pytest.raises(ValueError):
        PulseProfile("square")
    with pytest.raises(ValueError):
        PulseProfile("gaussian", detuning_mode="chirped")
    with pytest.raises(ValueError):
        PulseProfile("gaussian", width=0.0)


@pytest.mark.parametrize("pulse", [GAUSS, GAUSS_PROP])
def test_pulse_eom_is_he_matrix(pulse, su2):
    gens, f = su2
    for t in [0.0, 3.3, 5.0, 8.1]:
        np.testing.assert_allclose(pulse.eom(t), eom_matrix_he(pulse.torque(t), f), atol=1e-15)
        np.testing.assert_allclose(pulse.eom(t), eom_matrix_al(pulse.hamiltonian(t), gens), atol=1e-15)


def test_zero_hamiltonian_keeps_rho(rng):
    rho0 = coherence_to_rho([0.2, -0.1, 0.5], build_generators(2))
    traj = propagate_liouville(rho0, lambda t: np.zeros((2, 2), dtype=complex), TimeGrid(0, 1, 10))
    for r in traj.rho:
        np.testing.assert_array_equal(r, rho0)


def test_zero_eom_keeps_v():
    traj = propagate_coherence_rk4([0.1, 0.2, 0.3], lambda t: np.zeros((3, 3)), TimeGrid(0, 1, 10))
    assert np.all(traj.states == [0.1, 0.2, 0.3])


def test_rabi_flopping():
    om = 1.7
    p = PulseProfile("constant", omega0=om, delta0=0.0)
    grid = TimeGrid(0.0, 10.0, 10_000)
    traj = propagate_liouville(ground_state_rho(2), p.hamiltonian, grid)
    expected = np.sin(om * grid.times / 2) ** 2
    assert np.max(np.abs(traj.rho[:, 1, 1].real - expected)) < 1e-6
    assert np.max(np.abs(excited_population(traj) - expected)) < 1e-6


@pytest.mark.parametrize("pulse", [GAUSS, GAUSS_PROP, PulseProfile("sech", 1.5, -0.6, "constant", 4.0, 1.0)])
def test_liouville_matches_coherence_rk4(pulse):
    grid = TimeGrid(0.0, 10.0, 10_000)
    lio = propagate_liouville(ground_state_rho(2), pulse.hamiltonian, grid)
    rk = propagate_coherence_rk4([0, 0, 1], pulse.eom, grid)
    assert np.max(np.abs(lio.states - rk.states)) < 1e-8
    for traj in (lio, rk):
        assert traj.norm2_drift() < 1e-8
        assert traj.audits["norm2"][0] == pytest.approx(1.0)
    assert np.max(np.abs(lio.audits["trace"] - 1)) < 1e-8
    assert np.max(np.abs(lio.audits["purity"] - 1)) < 1e-8


def test_liouville_three_level_random(rng):
    gens = build_generators(3)
    h = random_hermitian(3, rng)
    g = eom_matrix_al(h, gens)
    grid = TimeGrid(0.0, 4.0, 4000)
    lio = propagate_liouville(ground_state_rho(3), lambda t: h, grid, gens)
    rk = propagate_coherence_rk4(rho_to_coherence(ground_state_rho(3), gens), lambda t: g, grid)
    assert np.max(np.abs(lio.states - rk.states)) < 1e-8
    assert np.max(np.abs(lio.audits["norm2"] - 4 / 3)) < 1e-8


def test_commuting_family_detection():
    grid = TimeGrid(0.0, 10.0, 100)
    assert check_commuting_family(GAUSS_PROP.eom, grid)
    assert not check_commuting_family(GAUSS.eom, grid)
    assert check_commuting_family(lambda t: L[0] + 2 * L[2], grid)


def test_commutator_of_constant_detuning_matrices():
    # [Om1 L1 - D L3, Om2 L1 - D L3] = D (Om1 - Om2) L2
    om1, om2, de = 0.3, 1.9, 0.7
    g1, g2 = om1 * L[0] - de * L[2], om2 * L[0] - de * L[2]
    np.testing.assert_allclose(g1 @ g2 - g2 @ g1, de * (om1 - om2) * L[1], atol=1e-15)
    p = PulseProfile("gaussian", 1.0, de, "constant", 0.0, 1.0)
    spread = commutator_spread(p.eom, [0.0, 1.0])
    assert spread == pytest.approx(de * (1.0 - np.exp(-0.5)))


def test_cumulative_integral():
    t = np.linspace(0, np.pi, 201)
    np.testing.assert_allclose(cumulative_integral(np.sin(t), t), 1 - np.cos(t), atol=1e-8)
    np.testing.assert_allclose(cumulative_integral(np.array([1.0, 1.0]), np.array([0.0, 2.0])), [0, 2])


def test_magnus_half_turn():
    # constant rate so that the accumulated angle at t = 1 is pi
    grid = TimeGrid(0.0, 1.0, 10)
    traj = magnus_propagate([0.3, 0.4, -0.5], lambda t: np.pi * L[0], grid)
    np.testing.assert_allclose(traj.states[-1], [0.3, -0.4, 0.5], atol=1e-14)


def test_magnus_matches_rk4_proportional(rng):
    grid = TimeGrid(0.0, 10.0, 10_000)
    for _ in range(3):
        om, de = rng.uniform(-3, 3, size=2)
        p = PulseProfile("gaussian", om, de, "proportional", 5.0, rng.uniform(0.8, 2.0))
        v0 = rng.normal(size=3)
        mag = magnus_propagate(v0, p.eom, grid)
        rk = propagate_coherence_rk4(v0, p.eom, grid)
        assert np.max(np.abs(mag.states - rk.states)) < 1e-6
        assert mag.norm2_drift() < 1e-8


def test_magnus_step_halving_is_quadrature_only():
    grid = TimeGrid(0.0, 10.0, 2000)
    coarse = magnus_propagate([0, 0, 1], GAUSS_PROP.eom, grid)
    fine = magnus_propagate([0, 0, 1], GAUSS_PROP.eom, grid.refined())
    assert np.max(np.abs(coarse.states - fine.states[::2])) < 1e-10


def test_magnus_rejects_non_commuting():
    with pytest.raises(NonCommutingError):
        magnus_propagate([0, 0, 1], GAUSS.eom, TimeGrid(0, 10, 100))


def test_non_finite_abort():
    def eom(t):
        return np.full((3, 3), np.nan) if t > 0.45 else np.zeros((3, 3))

    with pytest.raises(NonFiniteStateError, match="step"):
        propagate_coherence_rk4([0, 0, 1], eom, TimeGrid(0, 1, 10))


def test_liouville_instability_abort():
    h = 5e3 * np.array([[0, 1], [1, 0]], dtype=complex)
    with pytest.raises(NumericalAbort):
        propagate_liouville(coherence_to_rho([0.3, 0.2, 0.5], build_generators(2)), lambda t: h, TimeGrid(0, 100, 50))


def test_trajectory_length_checked():
    with pytest.raises(ValueError):
        Trajectory(TimeGrid(0, 1, 3), np.zeros((3, 3)))
