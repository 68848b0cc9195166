import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import fluxreadout as fr
from oracles import phase_grid_spectrum

TWO_PI = 2.0 * math.pi


class TestParams:
    def test_device_card_defaults(self, params):
        assert params.e_j == pytest.approx(TWO_PI * 3.82e9)
        assert params.e_c == pytest.approx(TWO_PI * 0.865e9)
        assert params.e_l == pytest.approx(TWO_PI * 0.822e9)
        assert params.g == pytest.approx(TWO_PI * 37.2e6)
        assert params.omega_r_bare == pytest.approx(TWO_PI * 5.175e9)
        assert params.kappa == pytest.approx(TWO_PI * 6.04e6)

    @pytest.mark.parametrize("field", ["e_j", "e_c", "e_l", "omega_r_bare",
                                       "kappa"])
    def test_rejects_nonpositive(self, field):
        with pytest.raises(ValueError):
            fr.FluxoniumParams(**{field: 0.0})

    def test_rejects_negative_g(self):
        with pytest.raises(ValueError):
            fr.FluxoniumParams(g=-1.0)

    def test_flux_bias_must_be_finite(self):
        with pytest.raises(ValueError):
            fr.FluxBias(float("nan"))


class TestDiagonalize:
    def test_qubit_frequency_at_fpa_point(self, params):
        # 3.47 GHz +- 50 MHz at the flux-pulse hold point
        spec = fr.diagonalize(params, 0.6567)
        assert spec.energies[1] / TWO_PI == pytest.approx(3.47e9, abs=50e6)

    def test_sweet_spot_frequency_against_grid_oracle(self, params):
        # the oscillator-basis and phase-grid solvers must agree closely
        spec = fr.diagonalize(params, 0.5)
        e_oracle, _ = phase_grid_spectrum(params, 0.5)
        assert spec.energies[1] == pytest.approx(e_oracle[1], rel=1e-5)

    def test_flux_periodicity_example(self, params):
        a = fr.diagonalize(params, 0.3)
        b = fr.diagonalize(params, 1.3)
        np.testing.assert_allclose(a.energies[1:], b.energies[1:], rtol=1e-9)

    def test_result_contract(self, params):
        spec = fr.diagonalize(params, 0.42, n_levels=8)
        assert spec.energies[0] == 0.0
        assert np.all(np.diff(spec.energies) >= 0)
        assert spec.n_elements.shape == (8, 8)
        np.testing.assert_allclose(spec.n_elements, spec.n_elements.T,
                                   atol=1e-12)

    def test_basis_too_small_rejected(self, params):
        with pytest.raises(ValueError):
            fr.diagonalize(params, 0.5, basis_size=40, n_levels=12)
        with pytest.raises(ValueError):
            fr.diagonalize(params, 0.5, n_levels=1)

    def test_truncation_error_detected(self, params):
        # a tiny basis cannot hold 12 converged levels of this device
        with pytest.raises(fr.TruncationError):
            fr.diagonalize(params, 0.5, basis_size=48, n_levels=12)

    @settings(max_examples=8, deadline=None)
    @given(phi=st.floats(0.0, 1.0))
    def test_periodicity_property(self, params, phi):
        a = fr.diagonalize(params, phi, check_convergence=False)
        b = fr.diagonalize(params, phi + 1.0, check_convergence=False)
        np.testing.assert_allclose(a.energies[1:], b.energies[1:], rtol=1e-9)

    @settings(max_examples=8, deadline=None)
    @given(delta=st.floats(0.0, 0.45))
    def test_reflection_property(self, params, delta):
        a = fr.diagonalize(params, 0.5 + delta, check_convergence=False)
        b = fr.diagonalize(params, 0.5 - delta, check_convergence=False)
        np.testing.assert_allclose(a.energies[1:], b.energies[1:], rtol=1e-9)

    def test_convergence_at_default_basis(self, params):
        for phi in (0.0, 0.25, 0.5, 0.6567, 0.75):
            fr.diagonalize(params, phi)  # raises TruncationError on failure


class TestTransitionFrequency:
    def test_sweet_spot_and_identity(self, params):
        spec = fr.diagonalize(params, 0.5)
        assert fr.transition_frequency(spec, 0, 1) == spec.energies[1]
        assert fr.transition_frequency(spec, 2, 2) == 0.0

    def test_w02_crosses_resonator_near_070(self, params):
        lo = fr.transition_frequency(fr.diagonalize(params, 0.69), 0, 2)
        hi = fr.transition_frequency(fr.diagonalize(params, 0.71), 0, 2)
        wr = params.omega_r_bare
        assert (lo - wr) * (hi - wr) < 0

    def test_index_errors(self, params):
        spec = fr.diagonalize(params, 0.5, n_levels=4)
        with pytest.raises(IndexError):
            fr.transition_frequency(spec, 0, 4)
        with pytest.raises(IndexError):
            fr.transition_frequency(spec, 3, 1)
        with pytest.raises(IndexError):
            fr.charge_element(spec, 0, 4)


class TestChargeElement:
    def test_hermiticity(self, params):
        spec = fr.diagonalize(params, 0.37)
        assert fr.charge_element(spec, 0, 3) == pytest.approx(
            fr.charge_element(spec, 3, 0), rel=1e-12)

    def test_sweet_spot_parity_selection(self, params):
        # at half flux the potential is even; n couples only opposite parity
        spec = fr.diagonalize(params, 0.5)
        assert fr.charge_element(spec, 0, 2) < 1e-6

    def test_n01_matches_grid_oracle(self, params):
        spec = fr.diagonalize(params, 0.5)
        _, n_oracle = phase_grid_spectrum(params, 0.5)
        assert fr.charge_element(spec, 0, 1) == pytest.approx(
            n_oracle[0, 1], rel=1e-4)


class TestSpectrumVsFlux:
    def test_single_point_matches_diagonalize(self, params):
        scan = fr.spectrum_vs_flux(params, [0.5])
        direct = fr.diagonalize(params, 0.5)
        np.testing.assert_array_equal(scan[0].energies, direct.energies)

    def test_symmetric_grid(self, params):
        grid = [0.45, 0.5, 0.55]
        scan = fr.spectrum_vs_flux(params, grid)
        assert scan[0].energies[1] == pytest.approx(scan[2].energies[1],
                                                    rel=1e-9)

    def test_monotone_increase_toward_fpa_point(self, params):
        grid = np.linspace(0.5, 0.66, 17)
        scan = fr.spectrum_vs_flux(params, grid)
        w01 = np.array([s.energies[1] for s in scan])
        assert np.all(np.diff(w01) > 0)
        # same trend from the independent phase-grid solver
        w01_oracle = np.array(
            [phase_grid_spectrum(params, phi, n_points=1501, n_levels=2)[0][1]
             for phi in grid])
        assert np.all(np.diff(w01_oracle) > 0)

    def test_empty_or_bad_grid_rejected(self, params):
        with pytest.raises(ValueError):
            fr.spectrum_vs_flux(params, [])
        with pytest.raises(ValueError):
            fr.spectrum_vs_flux(params, [0.5, float("inf")])

    def test_truncation_error_names_grid_point(self, params):
        with pytest.raises(fr.TruncationError, match="grid point"):
            fr.spectrum_vs_flux(params, [0.5, 0.51], basis_size=48)


class TestOracleAgreement:
    def test_transition_frequencies_on_flux_scan(self, params):
        # first 6 transitions within 1e-4 relative on 11 points in [0.4, 0.75]
        for phi in np.linspace(0.4, 0.75, 11):
            spec = fr.diagonalize(params, phi, check_convergence=False)
            e_oracle, _ = phase_grid_spectrum(params, phi)
            np.testing.assert_allclose(spec.energies[1:7], e_oracle[1:7],
                                       rtol=1e-4)
