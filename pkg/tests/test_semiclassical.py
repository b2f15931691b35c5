import numpy as np
import pytest

from rwasim.errors import RiccatiPoleError
from rwasim.integrator import IntegratorConfig, fidelity, integrate, sample_grid
from rwasim.linalg import expm_series, is_hermitian, is_unitary, pauli
from rwasim.semiclassical import (
    DisentangleState,
    DriveParams,
    from_rotating_frame,
    generalized_rabi_frequency,
    hamiltonian_full,
    hamiltonian_rwa,
    propagate_rwa_exact,
    propagator_rwa_detuned,
    propagator_rwa_resonance,
    propagator_rwa_rotating,
    reconstruct_disentangled,
    riccati_rhs,
    rotating_frame_generator,
    solve_beyond_rwa,
    to_rotating_frame,
)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)


def random_params(rng):
    return DriveParams(
        delta=rng.uniform(0.5, 2.0),
        g=rng.uniform(0.02, 0.3),
        omega=rng.uniform(0.5, 2.0),
        phi=rng.uniform(0.0, 2 * np.pi),
    )


class TestHamiltonians:
    def test_full_drive_off(self):
        p = DriveParams(delta=1.4, g=0.0, omega=1.0)
        assert np.allclose(hamiltonian_full(0.7, p), -0.7 * pauli(3))

    def test_full_at_cosine_zero(self):
        p = DriveParams(delta=1.0, g=0.2, omega=1.0, phi=0.0)
        h = hamiltonian_full(np.pi / 2, p)  # omega*t + phi = pi/2
        assert abs(h[0, 1]) < 1e-15 and abs(h[1, 0]) < 1e-15

    def test_full_at_cosine_one(self):
        p = DriveParams(delta=1.0, g=0.2, omega=1.0, phi=0.0)
        assert np.allclose(
            hamiltonian_full(0.0, p), np.array([[-0.5, 0.4], [0.4, 0.5]])
        )

    def test_rwa_at_phase_zero(self):
        p = DriveParams(delta=1.0, g=0.2, omega=1.0, phi=0.0)
        assert np.allclose(hamiltonian_rwa(0.0, p), np.array([[-0.5, 0.2], [0.2, 0.5]]))

    def test_rwa_offdiagonal_modulus_constant(self):
        p = DriveParams(delta=1.0, g=0.2, omega=1.3, phi=0.9)
        for t in (0.0, 1.7, 100.3):
            assert abs(hamiltonian_rwa(t, p)[0, 1]) == pytest.approx(p.g)

    def test_hermitian_for_all_t(self):
        rng = np.random.default_rng(0)
        p = random_params(rng)
        for t in rng.uniform(0, 50, size=20):
            assert is_hermitian(hamiltonian_full(t, p))
            assert is_hermitian(hamiltonian_rwa(t, p))


class TestRotatingFrame:
    def test_identity_at_zero_phase(self):
        p = DriveParams(delta=1.0, g=0.1, omega=1.0, phi=0.0)
        psi = np.array([0.6, 0.8j])
        assert np.allclose(to_rotating_frame(psi, 0.0, p), psi)

    def test_round_trip(self):
        rng = np.random.default_rng(4)
        p = random_params(rng)
        psi = rng.normal(size=2) + 1j * rng.normal(size=2)
        psi /= np.linalg.norm(psi)
        back = from_rotating_frame(to_rotating_frame(psi, 3.3, p), 3.3, p)
        assert np.abs(back - psi).max() < 1e-14

    def test_norm_preserved(self):
        p = DriveParams(delta=1.0, g=0.1, omega=1.2, phi=0.5)
        psi = np.array([0.6, 0.8j])
        assert np.linalg.norm(to_rotating_frame(psi, 7.7, p)) == pytest.approx(1.0)

    def test_transformed_dynamics_obey_constant_generator(self):
        # integrating in the lab frame then mapping must match integrating
        # the constant rotating-frame generator directly
        rng = np.random.default_rng(8)
        for _ in range(5):
            p = random_params(rng)
            psi = rng.normal(size=2) + 1j * rng.normal(size=2)
            psi /= np.linalg.norm(psi)
            cfg = IntegratorConfig(dt=0.5, rel_tol=1e-12, abs_tol=1e-14)
            lab = integrate(lambda t: hamiltonian_rwa(t, p), psi, 0.0, 15.0, cfg)
            m = rotating_frame_generator(p)
            rot = integrate(lambda t: m, to_rotating_frame(psi, 0.0, p), 0.0, 15.0, cfg)
            for k in range(lab.times.size):
                mapped = to_rotating_frame(lab.states[k], lab.times[k], p)
                assert fidelity(mapped / np.linalg.norm(mapped), rot.states[k] / rot.norms[k]) >= 1 - 1e-9


class TestResonancePropagator:
    def test_value_at_zero_keeps_relative_phase(self):
        p = DriveParams(delta=1.0, g=0.1, omega=1.0, phi=0.7)
        u = propagator_rwa_resonance(0.0, p)
        assert np.allclose(u, np.diag([1.0, np.exp(-0.7j)]))

    def test_populations_from_ground(self):
        p = DriveParams(delta=1.0, g=0.1, omega=1.0, phi=0.3)
        for t in (0.0, 3.0, 12.5, 40.0):
            psi = propagator_rwa_resonance(t, p) @ KET0
            assert abs(psi[0]) ** 2 == pytest.approx(np.cos(p.g * t) ** 2, abs=1e-12)
            assert abs(psi[1]) ** 2 == pytest.approx(np.sin(p.g * t) ** 2, abs=1e-12)

    def test_half_period_full_transfer(self):
        p = DriveParams(delta=1.0, g=0.1, omega=1.0)
        psi = propagator_rwa_resonance(np.pi / (2 * p.g), p) @ KET0
        assert abs(psi[1]) ** 2 == pytest.approx(1.0)

    def test_population_invariant_sin_squared(self):
        p = DriveParams(delta=1.0, g=0.07, omega=1.0)
        ts = np.linspace(0.0, 2 * np.pi / p.g, 300)
        p1 = np.array([abs((propagator_rwa_resonance(t, p) @ KET0)[1]) ** 2 for t in ts])
        assert np.abs(p1 - np.sin(p.g * ts) ** 2).max() < 1e-10

    def test_rejects_detuned_params(self):
        p = DriveParams(delta=1.2, g=0.1, omega=1.0)
        with pytest.raises(ValueError, match="detuned"):
            propagator_rwa_resonance(1.0, p)


class TestDetunedPropagator:
    def test_reduces_to_resonance(self):
        p = DriveParams(delta=1.0, g=0.1, omega=1.0, phi=0.2)
        for t in (0.0, 2.0, 17.0):
            assert np.abs(
                propagator_rwa_detuned(t, p) - propagator_rwa_resonance(t, p)
            ).max() < 1e-14

    def test_drive_off_rotating_frame_phases(self):
        p = DriveParams(delta=1.5, g=0.0, omega=1.0)
        t = 3.1
        expected = np.diag(
            [np.exp(1j * t * p.detuning / 2), np.exp(-1j * t * p.detuning / 2)]
        )
        assert np.abs(propagator_rwa_rotating(t, p) - expected).max() < 1e-13
        assert np.abs(
            propagator_rwa_rotating(t, p) - expm_series(rotating_frame_generator(p), -1j * t)
        ).max() < 1e-12

    def test_matches_series_exponential(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            p = random_params(rng)
            t = rng.uniform(0.0, 30.0)
            series = expm_series(rotating_frame_generator(p), -1j * t)
            assert np.abs(propagator_rwa_rotating(t, p) - series).max() < 1e-12

    def test_unitarity_over_long_window(self):
        rng = np.random.default_rng(13)
        p = DriveParams(delta=1.3, g=0.08, omega=1.0, phi=0.4)
        for t in rng.uniform(0.0, 100.0 / p.g, size=25):
            assert is_unitary(propagator_rwa_detuned(t, p), tol=1e-10)
            assert is_unitary(propagator_rwa_resonance(t, DriveParams(1.0, p.g, 1.0, p.phi)), tol=1e-10)

    def test_peak_transfer_amplitude(self):
        # generalized Rabi oscillation peaks at g^2 / (g^2 + (detuning/2)^2)
        p = DriveParams(delta=1.2, g=0.1, omega=1.0)
        rabi = generalized_rabi_frequency(p)
        peak = abs((propagator_rwa_detuned(np.pi / (2 * rabi), p) @ KET0)[1]) ** 2
        assert peak == pytest.approx(p.g**2 / rabi**2, abs=1e-12)


class TestExactRwaTrajectory:
    def test_matches_numerical_integration_with_phase(self):
        rng = np.random.default_rng(21)
        p = DriveParams(delta=1.1, g=0.12, omega=0.9, phi=1.1)
        psi0 = rng.normal(size=2) + 1j * rng.normal(size=2)
        psi0 /= np.linalg.norm(psi0)
        ts = sample_grid(0.0, 30.0, 0.5)
        exact = propagate_rwa_exact(p, psi0, ts)
        cfg = IntegratorConfig(dt=0.5, rel_tol=1e-12, abs_tol=1e-14)
        num = integrate(lambda t: hamiltonian_rwa(t, p), psi0, 0.0, 30.0, cfg)
        # entrywise agreement, not just fidelity: the trajectory solves the
        # same equation with the same initial state
        assert np.abs(exact.states - num.states).max() < 1e-9


class TestRiccati:
    def test_initial_slope(self):
        p = DriveParams(delta=1.7, g=0.25, omega=1.0, phi=0.0)
        d = riccati_rhs(DisentangleState(0.0, 0.0, 0.0), 0.0, p)
        assert d.f == pytest.approx(2 * p.g)
        assert d.g_fun == pytest.approx(-p.delta)
        assert d.h == pytest.approx(2 * p.g)

    def test_drive_off_decouples(self):
        p = DriveParams(delta=1.7, g=0.0, omega=1.0)
        d = riccati_rhs(DisentangleState(0.0, 0.0, 0.0), 2.0, p)
        assert d.f == 0 and d.h == 0
        assert d.g_fun == pytest.approx(-p.delta)
        # away from the origin the F equation is linear, so F(0) = 0 pins F = 0
        d = riccati_rhs(DisentangleState(0.3 - 0.1j, -2.0, 0.0), 2.0, p)
        assert d.f == pytest.approx(1j * p.delta * (0.3 - 0.1j))
        assert d.h == 0

    def test_pole_guards(self):
        p = DriveParams(delta=1.0, g=0.1, omega=1.0)
        with pytest.raises(RiccatiPoleError):
            riccati_rhs(DisentangleState(0.0, 1j, 0.0), 0.0, p)  # 1 + iG = 0
        with pytest.raises(RiccatiPoleError):
            riccati_rhs(DisentangleState(1e9, 0.0, 0.0), 0.0, p)

    def test_finite_on_smooth_trajectory(self):
        p = DriveParams(delta=1.0, g=0.05, omega=1.0)
        series = solve_beyond_rwa(p, 20.0, 0.5, KET0)
        assert np.all(np.isfinite(series.states.real))
        assert np.all(np.isfinite(series.states.imag))


class TestReconstruction:
    def test_identity_at_origin(self):
        assert np.allclose(reconstruct_disentangled(DisentangleState(0.0, 0.0, 0.0)), np.eye(2))

    def test_free_evolution_factor(self):
        # with the drive off, G = -delta*t and F = H = 0: the product is the
        # free propagator diag(e^{i delta t/2}, e^{-i delta t/2})
        delta, t = 1.3, 2.7
        u = reconstruct_disentangled(DisentangleState(0.0, -delta * t, 0.0))
        assert np.allclose(u, np.diag([np.exp(0.5j * delta * t), np.exp(-0.5j * delta * t)]))

    def test_matches_exponential_factors(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            f, g_fun, h = (rng.normal() + 1j * rng.normal() for _ in range(3))
            s = DisentangleState(f, g_fun, h)
            product = (
                expm_series(pauli("+"), -1j * f)
                @ expm_series(0.5 * pauli(3), -1j * g_fun)
                @ expm_series(pauli("-"), -1j * h)
            )
            assert np.abs(reconstruct_disentangled(s) - product).max() < 1e-12


class TestBeyondRwa:
    def test_drive_off_reduces_to_free_evolution(self):
        p = DriveParams(delta=1.3, g=0.0, omega=1.0)
        series = solve_beyond_rwa(p, 10.0, 0.25, KET1)
        for k, t in enumerate(series.times):
            free = np.diag([np.exp(0.5j * p.delta * t), np.exp(-0.5j * p.delta * t)]) @ KET1
            assert np.abs(series.states[k] - free).max() < 1e-12

    def test_agrees_with_direct_integration(self):
        p = DriveParams(delta=1.0, g=0.05, omega=1.0, phi=0.0)
        series = solve_beyond_rwa(p, 50.0, 0.25, KET0)
        cfg = IntegratorConfig(dt=0.25, rel_tol=1e-13, abs_tol=1e-15)
        direct = integrate(lambda t: hamiltonian_full(t, p), KET0, 0.0, 50.0, cfg)
        assert np.abs(series.norms - 1.0).max() < 1e-8
        for k in range(series.times.size):
            assert (
                fidelity(series.states[k] / series.norms[k], direct.states[k] / direct.norms[k])
                >= 1 - 1e-8
            )

    def test_blowup_guard_halts_with_partial_trajectory(self):
        # lowering the blow-up guard turns the near-pole at a quarter Rabi
        # period into a hard stop
        p = DriveParams(delta=1.0, g=0.05, omega=1.0, phi=0.0)
        with pytest.raises(RiccatiPoleError) as excinfo:
            solve_beyond_rwa(p, 50.0, 0.25, KET0, f_max=10.0)
        err = excinfo.value
        quarter = np.pi / (2 * p.g)
        assert 0.8 * quarter < err.t_pole < 1.1 * quarter
        assert err.partial is not None
        assert err.partial.times.size > 10
        assert err.partial.times[-1] <= err.t_pole + 1e-9

    def test_rejects_bad_dt(self):
        p = DriveParams(delta=1.0, g=0.05, omega=1.0)
        with pytest.raises(ValueError):
            solve_beyond_rwa(p, 10.0, -0.1, KET0)


class TestDriveParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            DriveParams(delta=0.0, g=0.1, omega=1.0)
        with pytest.raises(ValueError):
            DriveParams(delta=1.0, g=-0.1, omega=1.0)
        with pytest.raises(ValueError):
            DriveParams(delta=1.0, g=0.1, omega=0.0)

    def test_detuning(self):
        assert DriveParams(delta=1.3, g=0.1, omega=1.0).detuning == pytest.approx(0.3)
