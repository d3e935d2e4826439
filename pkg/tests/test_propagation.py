import unittest
import warnings
import numpy as np

from taper_sfwm.exceptions import (CouplingStrengthWarning, DomainError, EnergyConservationError,
                                   PropagationOverflowError)
from taper_sfwm.modes.calc_overlap import ModeSizeModel
from taper_sfwm.propagation.calc_coupling import (build_coupling, build_cw_coupling,
                                                  coupling_functions, delta_kappa, gamma_cw, gamma_pair,
                                                  gamma_pulsed, sampled_offdiag)
from taper_sfwm.propagation.calc_transfer_matrix import (accumulate_phase, element_matrix_cw, element_matrix_pulsed,
                                                         midpoint_phase, propagate,
                                                         uniform_matrix)
from taper_sfwm.propagation.ode_oracle import ode_oracle
from taper_sfwm.pump.pump_source import ContinuousPump, PulsedPump, PumpComponent
from taper_sfwm.dispersion.calc_dispersion import omega_from_nm
from taper_sfwm.waveguide.taper_profile import TaperProfile
from tests.synthetic import N2, TaperedProvider, pair_coupling


class TestElementMatrix(unittest.TestCase):

    def test_zero_coupling_identity(self):
        element = element_matrix_cw(0.0, 0.3, 0.01)
        self.assertEqual([complex(element.t11), complex(element.t12), complex(element.t21), complex(element.t22)],
                         [1, 0, 0, 1], 'gamma = 0 must give the identity')

    def test_zero_phase(self):
        element = element_matrix_cw(2.0, 0.0, 0.01)
        self.assertEqual(complex(element.t12).real, 0.0, 'With no phase T12 must be purely imaginary')
        self.assertAlmostEqual(abs(complex(element.t12)), 0.02, places=15, msg='|T12| must equal gamma dz')
        self.assertEqual(complex(element.t21), complex(element.t12).conjugate(), 'T21 must be the conjugate of T12')

    def test_determinant(self):
        rng = np.random.default_rng(11)
        gamma, phase = 5.0 * rng.random(50), 2 * np.pi * rng.random(50)
        element = element_matrix_cw(gamma, phase, 0.01)
        det = element.t11 * element.t22 - element.t12 * element.t21
        np.testing.assert_allclose(det, 1.0 - np.abs(element.t12) ** 2, rtol=0, atol=1e-15,
                                   err_msg='det must equal 1 - |f|^2')

    def test_pulsed_phasor_cancellation(self):
        element = element_matrix_pulsed([3.0, 3.0], [np.pi / 2, -np.pi / 2], 0.01)
        self.assertLess(abs(complex(element.t12)), 1e-15, 'Opposite phases of equal pairs must cancel')
        np.testing.assert_array_equal(element.t11, 1.0, 'Diagonal must stay 1')

    def test_single_pair_equals_cw(self):
        rng = np.random.default_rng(3)
        gamma, phase = rng.random(20), 2 * np.pi * rng.random(20)
        pulsed = element_matrix_pulsed(gamma[None, :], phase[None, :], 0.01)
        cw = element_matrix_cw(gamma, phase, 0.01)
        np.testing.assert_array_equal(pulsed.t12, cw.t12, 'A single pump pair must reduce to the CW element')
        np.testing.assert_array_equal(pulsed.t21, cw.t21, 'A single pump pair must reduce to the CW element')

    def test_strong_coupling_warning(self):
        with self.assertWarns(CouplingStrengthWarning):
            element_matrix_cw(20.0, 0.0, 0.01)

    def test_descending_product(self):
        first = element_matrix_cw(1.0, 0.0, 0.05)
        second = element_matrix_cw(1.0, np.pi / 3, 0.05)
        matrix, _ = propagate(np.array([[complex(first.t12), complex(second.t12)]]))
        product = second @ first
        for name in ('t11', 't12', 't21', 't22'):
            self.assertAlmostEqual(complex(getattr(matrix, name)[0]), complex(getattr(product, name)), places=15,
                                   msg=f'{name} of the engine must equal T_2 T_1')
        self.assertNotAlmostEqual(complex((first @ second).t11), complex(product.t11), places=6,
                                  msg='The element order must matter')


class TestTransferMatrix(unittest.TestCase):

    def test_phase_accumulation(self):
        phase = accumulate_phase([1.0, 2.0, 3.0], 0.5)
        np.testing.assert_allclose(phase, [0.0, 0.5, 1.5, 3.0], rtol=0, atol=1e-15,
                                   err_msg='Boundary phases are wrong')
        np.testing.assert_allclose(midpoint_phase([1.0, 2.0, 3.0], 0.5), [0.25, 1.0, 2.25], rtol=0, atol=1e-15,
                                   err_msg='Midpoint phases are wrong')

    def test_empty_product(self):
        matrix, _ = propagate(np.zeros((2, 0)))
        np.testing.assert_array_equal(matrix.t11, [1, 1], 'No element must give the identity')
        np.testing.assert_array_equal(matrix.expected_photons, [0, 0], 'No element must give no photons')

    def test_zero_coupling(self):
        matrix, _ = propagate(np.zeros((1, 50), dtype=complex))
        self.assertEqual(float(matrix.expected_photons[0]), 0.0, 'gamma = 0 must give no photons')
        self.assertEqual(complex(matrix.t11[0]), 1.0, 'gamma = 0 must give the identity')

    def test_product_residual(self):
        rng = np.random.default_rng(7)
        f = 0.05 * rng.random((4, 300)) * np.exp(2j * np.pi * rng.random((4, 300)))
        matrix, _ = propagate(f)
        expected = np.prod(1.0 - np.abs(f) ** 2, axis=1) - 1.0
        np.testing.assert_allclose(matrix.bogoliubov_residual, expected, rtol=1e-9, atol=1e-14,
                                   err_msg='Residual of the element product is not prod(1 - |f|^2) - 1')

    def test_phase_matched_limit(self):
        gamma, length, elements = 0.5, 2.0, 4000
        f = np.full((1, elements), 1j * gamma * length / elements)
        matrix, _ = propagate(f)
        exact = uniform_matrix(gamma, length)
        self.assertAlmostEqual(float(matrix.expected_photons[0]) / float(exact.expected_photons), 1.0, delta=1e-3,
                               msg='Phase-matched uniform waveguide must give sinh^2(gamma L)')

    def test_convergence_order(self):
        gamma, length = 0.5, 2.0
        exact = float(uniform_matrix(gamma, length).expected_photons)
        errors = []
        for elements in (25, 50, 100, 200):
            matrix, _ = propagate(np.full((1, elements), 1j * gamma * length / elements))
            errors.append(abs(float(matrix.expected_photons[0]) - exact))
        slope = np.polyfit(np.log([25, 50, 100, 200]), np.log(errors), 1)[0]
        self.assertTrue(0.9 <= -slope <= 2.5, f'Observed convergence order {-slope:.2f}')

    def test_path_recording(self):
        f = np.full((2, 10), 0.01j)
        matrix, path = propagate(f, record_path=True)
        self.assertEqual(path.shape, (2, 11), 'One path sample per element boundary')
        self.assertEqual(path[0, 0], 0.0, 'Path starts from vacuum')
        np.testing.assert_array_equal(path[:, -1], matrix.expected_photons, 'Path must end at |T12|^2')

    def test_overflow(self):
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', CouplingStrengthWarning)
            with self.assertRaises(PropagationOverflowError, msg='Runaway gain must raise'):
                propagate(np.full((1, 200), 0.5j))

    def test_strong_coupling_warning(self):
        with self.assertWarns(CouplingStrengthWarning):
            propagate(np.full((1, 10), 0.2j))


class TestCoupling(unittest.TestCase):

    def __init__(self, *args, **kwargs):
        super(TestCoupling, self).__init__(*args, **kwargs)
        self.provider = TaperedProvider()
        self.pump = ContinuousPump(wavelength_um=0.78, power_W=1.0)
        self.profile = TaperProfile(average_um=1.0, modulation_depth=0.1, period_m=0.01, periods=4,
                                    steps_per_period=50)

    def test_pair_prefactor(self):
        args = (2.4e15, 2.3e15, 1.45, 1.44, 1.2, 1.3, 0.6, N2)
        self.assertAlmostEqual(gamma_pair(*args, 1e12, 1e12) / gamma_cw(*args, 1e12), 2.0, places=12,
                               msg='A nondegenerate pair at equal intensities couples twice as strongly')

    def test_energy_conservation(self):
        p1 = PumpComponent(omega=2.40e15, intensity=1e12, weight=1.0)
        p2 = PumpComponent(omega=2.41e15, intensity=1e12, weight=1.0)
        with self.assertRaises(EnergyConservationError, msg='A pair with the wrong sum frequency must be rejected'):
            gamma_pulsed(2.5e15, 2.4e15, p1, p2, 1.45, 1.45, 1.0, 1.0, 0.5, N2)

    def test_degenerate_pulsed_pair(self):
        p = PumpComponent(omega=2.4e15, intensity=1e12, weight=1.0)
        value = gamma_pulsed(2.5e15, 2.3e15, p, p, 1.45, 1.44, 1.2, 1.3, 0.6, N2)
        expected = gamma_cw(2.5e15, 2.3e15, 1.45, 1.44, 1.2, 1.3, 0.6, N2, 1e12)
        self.assertEqual(value, expected, 'A degenerate pair must use the CW coupling')

    def test_delta_kappa_exchange(self):
        self.assertEqual(delta_kappa(1.1e7, 1.1e7, 1.3e7, 0.9e7), delta_kappa(1.1e7, 1.1e7, 0.9e7, 1.3e7),
                         'Exchanging signal and idler must leave the mismatch unchanged')

    def test_signal_idler_symmetry(self):
        omega_s = float(omega_from_nm(750.0))
        batch = np.array([omega_s, 2 * self.pump.omega - omega_s])
        context = build_cw_coupling(self.profile, self.provider, self.pump, N2, batch)
        matrix, _ = propagate(context.offdiag)
        np.testing.assert_allclose(matrix.expected_photons[0], matrix.expected_photons[1], rtol=1e-12, atol=0,
                                   err_msg='Signal and idler modes must produce the same photon number')

    def test_amplitude_invariance(self):
        omega_s = omega_from_nm(np.array([745.0, 760.0]))
        photons = []
        for amplitude in (1.0, 2.5):
            mode_size = ModeSizeModel(radius_um=1.0, amplitude=amplitude)
            context = build_cw_coupling(self.profile, self.provider, self.pump, N2, omega_s, mode_size)
            photons.append(propagate(context.offdiag)[0].expected_photons)
        np.testing.assert_allclose(photons[0], photons[1], rtol=1e-10, atol=0,
                                   err_msg='Photon numbers must not depend on the field amplitude')

    def test_single_component_pulse(self):
        pulse = PulsedPump(wavelength_um=0.78, energy_J=1e-12, tau_s=2e-12, components=1)
        equivalent = pulse.energy_J * pulse.tau_s * pulse.delta_omega ** 2 / (2 * np.pi * np.sqrt(np.pi))
        cw = ContinuousPump(wavelength_um=0.78, power_W=equivalent)
        omega_s = omega_from_nm(np.array([750.0, 770.0]))
        pulsed_matrix, _ = propagate(build_coupling(self.profile, self.provider, pulse, N2, omega_s).offdiag)
        cw_matrix, _ = propagate(build_coupling(self.profile, self.provider, cw, N2, omega_s).offdiag)
        np.testing.assert_allclose(pulsed_matrix.expected_photons, cw_matrix.expected_photons, rtol=1e-9, atol=0,
                                   err_msg='A one-component pulse must reduce to a CW pump')

    def test_period_tiling(self):
        omega_s = omega_from_nm(np.array([750.0]))
        context = build_cw_coupling(self.profile, self.provider, self.pump, N2, omega_s)
        self.assertEqual(context.offdiag.shape, (1, 200), 'Element couplings must cover M periods')
        np.testing.assert_allclose(np.abs(context.offdiag[0, :50]), np.abs(context.offdiag[0, 150:]),
                                   rtol=1e-12, err_msg='Every period must see the same coupling strength')


class TestOracle(unittest.TestCase):

    def test_uniform_agreement(self):
        profile = TaperProfile(average_um=1.0, modulation_depth=0.0, period_m=0.5, periods=4, steps_per_period=20)
        coupling = pair_coupling(lambda z: 0.5 * np.ones_like(z), lambda z: np.zeros_like(z))
        matrix = ode_oracle(profile, coupling, fine_steps=100)
        exact = uniform_matrix(0.5, 2.0)
        self.assertAlmostEqual(float(matrix.expected_photons) / float(exact.expected_photons), 1.0, places=7,
                               msg='Oracle disagrees with sinh^2(gamma L)')

    def test_oracle_residual(self):
        rng = np.random.default_rng(11)
        profile = TaperProfile(average_um=1.0, modulation_depth=0.1, period_m=0.01, periods=2, steps_per_period=20)
        for _ in range(1000):
            g0, k0, depth = rng.uniform(0.5, 20.0), rng.uniform(100.0, 2000.0), rng.uniform(0.0, 2.0)
            wave = 2 * np.pi / profile.period_m
            coupling = pair_coupling(lambda z: g0 * (1.0 + 0.3 * np.sin(wave * z)),
                                     lambda z: k0 * (1.0 + depth * np.cos(wave * z)))
            matrix = ode_oracle(profile, coupling, fine_steps=50)
            self.assertLessEqual(abs(float(matrix.bogoliubov_residual)), 1e-8,
                                 'Oracle violates |T11|^2 - |T12|^2 = 1')

    def test_fine_steps_bound(self):
        profile = TaperProfile(average_um=1.0, modulation_depth=0.1, period_m=0.01, periods=1, steps_per_period=200)
        coupling = pair_coupling(lambda z: np.ones_like(z), lambda z: np.zeros_like(z))
        with self.assertRaises(DomainError, msg='The oracle must be finer than the engine'):
            ode_oracle(profile, coupling, fine_steps=200)

    def test_engine_against_oracle(self):
        provider = TaperedProvider()
        pump = ContinuousPump(wavelength_um=0.78, power_W=1.0)
        profile = TaperProfile(average_um=1.0, modulation_depth=0.1, period_m=0.01, periods=5, steps_per_period=200)
        coupling = coupling_functions(profile, provider, pump, N2, float(omega_from_nm(750.0)))
        engine, _ = propagate(sampled_offdiag(profile, coupling))
        oracle = ode_oracle(profile, coupling, fine_steps=400)
        self.assertAlmostEqual(float(engine.expected_photons[0]) / float(oracle.expected_photons), 1.0, delta=5e-3,
                               msg='Transfer-matrix result deviates from the ODE solution')

    def test_quasi_phase_matched_growth(self):
        period = 0.1
        wave = 2 * np.pi / period
        coupling = pair_coupling(lambda z: 0.2 * np.ones_like(z),
                                 lambda z: wave * (1.0 + 1.8 * np.cos(wave * z)))
        scaled = []
        for periods in (10, 20, 40):
            profile = TaperProfile(average_um=1.0, modulation_depth=0.1, period_m=period, periods=periods,
                                   steps_per_period=200)
            matrix, _ = propagate(sampled_offdiag(profile, coupling))
            scaled.append(float(matrix.expected_photons[0]) / periods ** 2)
        mean = np.mean(scaled)
        for value in scaled:
            self.assertAlmostEqual(value / mean, 1.0, delta=0.2, msg='Quasi-phase-matched growth is not quadratic')


if __name__ == '__main__':
    unittest.main()
