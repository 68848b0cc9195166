import math

import numpy as np
import pytest

import fluxreadout as fr

TWO_PI = 2.0 * math.pi


class TestDispersivePoint:
    def test_sweet_spot_shift(self, params):
        pt = fr.dispersive_point(params, 0.5)
        assert pt.chi / TWO_PI == pytest.approx(0.92e6, rel=0.10)
        assert pt.chi > 0

    def test_fpa_point_shift(self, params):
        pt = fr.dispersive_point(params, 0.6567)
        assert pt.chi / TWO_PI == pytest.approx(-1.09e6, rel=0.15)
        assert pt.chi < 0

    def test_decoupled_limit(self):
        p = fr.FluxoniumParams(g=0.0)
        pt = fr.dispersive_point(p, 0.5)
        assert pt.chi0 == pt.chi1 == pt.chi == 0.0

    def test_definitions_hold_exactly(self, params):
        pt = fr.dispersive_point(params, 0.61)
        assert pt.omega_r0 == params.omega_r_bare + pt.chi0
        assert pt.omega_r1 == params.omega_r_bare + pt.chi1
        assert pt.chi == (pt.chi1 - pt.chi0) / 2.0
        # recovering chi from the dressed frequencies loses only the ulp of
        # omega_r_bare to cancellation
        assert (pt.omega_r1 - pt.omega_r0) / 2.0 == pytest.approx(
            pt.chi, abs=np.spacing(params.omega_r_bare))

    def test_needs_six_levels(self, params):
        with pytest.raises(ValueError):
            fr.dispersive_point(params, 0.5, n_levels=5)

    def test_guard_raises_near_divergence(self, params):
        # locate the crossing, then evaluate inside a wide guard window
        flag = fr.divergence_scan(params, (0.51, 0.52))[0]
        with pytest.raises(fr.DivergenceProximityError) as exc_info:
            fr.dispersive_point(params, flag.flux.phi, guard=TWO_PI * 100e3)
        assert exc_info.value.transition == (1, 3)

    def test_g_squared_scaling(self, params):
        pt1 = fr.dispersive_point(params, 0.55)
        p2 = fr.FluxoniumParams(g=2.0 * params.g)
        pt2 = fr.dispersive_point(p2, 0.55)
        assert pt2.chi / pt1.chi == pytest.approx(4.0, rel=1e-10)

    def test_level_truncation_stability(self, params):
        chi8 = fr.dispersive_point(params, 0.5, n_levels=8).chi
        chi12 = fr.dispersive_point(params, 0.5, n_levels=12).chi
        assert chi8 == pytest.approx(chi12, rel=0.01)


class TestDressedFrequencies:
    def test_sweet_spot_values(self, params):
        wr0, wr1 = fr.dressed_frequencies(params, 0.5)
        assert wr0 / TWO_PI == pytest.approx(5.1739e9, abs=0.5e6)
        assert wr1 / TWO_PI == pytest.approx(5.1757e9, abs=0.5e6)

    def test_decoupled(self):
        p = fr.FluxoniumParams(g=0.0)
        wr0, wr1 = fr.dressed_frequencies(p, 0.5)
        assert wr0 == wr1 == p.omega_r_bare

    def test_fpa_splitting(self, params):
        wr0, wr1 = fr.dressed_frequencies(params, 0.6567)
        assert abs(wr1 - wr0) / TWO_PI == pytest.approx(2.18e6, rel=0.15)


class TestChiVsFlux:
    def test_single_point_matches(self, params):
        pt_scan = fr.chi_vs_flux(params, [0.5])[0]
        pt = fr.dispersive_point(params, 0.5)
        assert pt_scan.chi == pt.chi

    def test_large_shift_attainable_near_divergence(self, params):
        grid = np.linspace(0.68, 0.72, 81)
        pts = fr.chi_vs_flux(params, grid)
        chis = np.array([abs(p.chi) for p in pts if not p.flagged])
        assert np.nanmax(chis) / TWO_PI >= 7e6

    def test_sign_flips_across_divergences(self, params):
        flags = fr.divergence_scan(params, (0.51, 0.52))
        root = flags[0].flux.phi
        below = fr.dispersive_point(params, root - 0.005).chi1
        above = fr.dispersive_point(params, root + 0.005).chi1
        assert below * above < 0
        flags = fr.divergence_scan(params, (0.69, 0.71))
        root = flags[0].flux.phi
        below = fr.dispersive_point(params, root - 0.005).chi0
        above = fr.dispersive_point(params, root + 0.005).chi0
        assert below * above < 0

    def test_straddling_points_flagged(self, params):
        pts = fr.chi_vs_flux(params, np.linspace(0.45, 0.75, 301))
        flagged = [p.flux.phi for p in pts if p.flagged]
        assert any(abs(phi - 0.517) < 0.005 for phi in flagged)
        assert any(abs(phi - 0.70) < 0.01 for phi in flagged)


class TestDivergenceScan:
    def test_31_crossing(self, params):
        flags = fr.divergence_scan(params, (0.45, 0.55))
        ours = [f for f in flags if f.transition == (1, 3)]
        assert ours and ours[-1].flux.phi == pytest.approx(0.517, abs=0.005)

    def test_02_crossing(self, params):
        flags = fr.divergence_scan(params, (0.6, 0.8))
        ours = [f for f in flags if f.transition == (0, 2)]
        assert ours and ours[0].flux.phi == pytest.approx(0.70, abs=0.01)

    def test_empty_near_sweet_spot(self, params):
        assert fr.divergence_scan(params, (0.49, 0.51)) == []

    def test_flags_sorted_by_flux_and_tight_roots(self, params):
        flags = fr.divergence_scan(params, (0.45, 0.75))
        phis = [f.flux.phi for f in flags]
        assert phis == sorted(phis)
        assert all(f.detuning < TWO_PI * 1e3 for f in flags)


class TestMistScan:
    def test_flags_06_third_harmonic(self, params):
        flags = fr.mist_scan(params, (0.60, 0.68), max_harmonic=3)
        hits = [f for f in flags if f.transition == (0, 6) and f.harmonic == 3]
        assert hits and hits[0].flux.phi == pytest.approx(0.64, abs=0.01)

    def test_zero_window_empty(self, params):
        assert fr.mist_scan(params, (0.60, 0.68), max_harmonic=3,
                            window=0.0) == []

    def test_sorted_by_detuning(self, params):
        flags = fr.mist_scan(params, (0.55, 0.70), max_harmonic=3)
        dets = [f.detuning for f in flags]
        assert dets == sorted(dets)

    def test_argument_checks(self, params):
        with pytest.raises(ValueError):
            fr.mist_scan(params, (0.6, 0.68), max_harmonic=0)
        with pytest.raises(ValueError):
            fr.mist_scan(params, (0.6, 0.68), n_levels=7)
