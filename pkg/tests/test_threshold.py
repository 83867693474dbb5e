"""Threshold search: reference values, bracketing, geometry maps."""

import numpy as np
import pytest
from conftest import L_REF, make_cavity

from dfbopo import (NoFeedback, find_threshold, threshold_determinant,
                    threshold_map)


def test_reference_geometry_long_output_grating():
    # kappa L1 = 3, L1 = 50 mm, L3 = 4 L1, gamma_nl = 0.025: with L2 = 2 L1
    # the threshold pump product sits near 0.21 W^2
    spec = make_cavity(l2=2 * L_REF)
    result = find_threshold(spec)
    assert result.pump_product == pytest.approx(0.21, rel=0.10)
    assert abs(result.residual) < 1e-9
    assert result.xi_th > 0


def test_reference_geometry_symmetric():
    # same cavity with L2 = L1 oscillates near 0.84 W^2
    spec = make_cavity(l2=L_REF)
    result = find_threshold(spec)
    assert result.pump_product == pytest.approx(0.84, rel=0.10)


def test_no_feedback_raises():
    spec = make_cavity(kappa1_L=0.0)
    with pytest.raises(NoFeedback):
        find_threshold(spec)


def test_bracket_signs_straddle_zero():
    spec = make_cavity(l2=1.5 * L_REF)
    result = find_threshold(spec)
    lo, hi = result.bracket
    assert threshold_determinant(spec, lo) > 0
    assert threshold_determinant(spec, hi) <= 0
    assert (hi - lo) / hi < 1e-12


def test_scan_density_invariance():
    spec = make_cavity(l2=2 * L_REF)
    xi_a = find_threshold(spec, scan_points=400).xi_th
    xi_b = find_threshold(spec, scan_points=800).xi_th
    assert abs(xi_a - xi_b) / xi_a < 1e-9


def test_map_single_cell_matches_direct_solve():
    spec = make_cavity()
    tmap = threshold_map(spec, [2 * L_REF], [4 * L_REF])
    direct = find_threshold(make_cavity(l2=2 * L_REF, l3=4 * L_REF))
    assert tmap.ok[0, 0]
    assert tmap.pump_product[0, 0] == pytest.approx(direct.pump_product, rel=1e-9)


def test_map_monotone_in_both_lengths():
    spec = make_cavity()
    l2s = np.linspace(L_REF, 2 * L_REF, 4)
    l3s = np.linspace(L_REF, 4 * L_REF, 4)
    tmap = threshold_map(spec, l2s, l3s)
    assert tmap.ok.all()
    pp = tmap.pump_product
    assert np.all(np.diff(pp, axis=0) <= 1e-12)   # longer L2 never raises it
    assert np.all(np.diff(pp, axis=1) <= 1e-12)   # longer L3 never raises it


def test_map_grid_validation():
    spec = make_cavity()
    with pytest.raises(ValueError):
        threshold_map(spec, [-0.05], [0.1])


def test_phase_shift_cavity_threshold():
    # quarter-wave-shifted structure: theta = pi/2, no gap, kappa L = 1.5
    spec = make_cavity(kappa1_L=1.5, l2=L_REF, l3=0.0)
    result = find_threshold(spec)
    assert result.xi_th * L_REF == pytest.approx(0.3283, rel=1e-3)
