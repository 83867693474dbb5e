"""Quadrature statistics, loss model, and the intracavity photon profile."""

import numpy as np
import pytest
from conftest import L_REF, make_cavity

from dfbopo import (NotReal, apply_loss, field_profile, find_threshold,
                    io_matrices, output_variances, quad_transform,
                    stats_from_couplings, threshold_determinant)
from dfbopo.linalg import bogoliubov


# -------------------- quad_transform --------------------

def test_quad_identity():
    assert np.allclose(quad_transform(np.eye(2, dtype=complex)), np.eye(2))


def test_quad_squeezer_diagonalizes():
    r = 0.8
    m = bogoliubov(np.cosh(r), -np.sinh(r))
    assert np.allclose(quad_transform(m), np.diag([np.exp(-r), np.exp(r)]))


def test_quad_phase_becomes_rotation():
    phi = 0.6
    m = bogoliubov(np.exp(1j * phi), 0.0)
    rot = np.array([[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]])
    assert np.allclose(quad_transform(m), rot)


def test_quad_rejects_non_pair_structure():
    bad = np.array([[1.0, 0.5j], [0.2, 1.0]], dtype=complex)
    with pytest.raises(NotReal):
        quad_transform(bad)


# -------------------- output variances --------------------

def test_vacuum_fixed_point():
    spec = make_cavity(xi=0.0, theta=0.9)
    for port in ("b", "g"):
        stats = output_variances(spec, port)
        assert stats.var_x == pytest.approx(0.5, abs=1e-12)
        assert stats.var_p == pytest.approx(0.5, abs=1e-12)
        assert abs(stats.squeezing_db) < 1e-10
        assert abs(stats.mean_photons) < 1e-12


def test_port_selection_and_reuse():
    spec = make_cavity(l2=2 * L_REF)
    xi = 0.5 * find_threshold(spec).xi_th
    io = io_matrices(spec, xi_override=xi)
    direct = output_variances(spec, "b", xi_override=xi)
    reused = output_variances(spec, "b", io=io)
    assert direct == reused
    with pytest.raises(ValueError):
        output_variances(spec, "both")


def test_uncertainty_product_below_threshold(rng):
    spec = make_cavity(l2=1.5 * L_REF)
    xi_th = find_threshold(spec).xi_th
    for frac in rng.uniform(0.05, 0.999, size=25):
        stats = output_variances(spec, "b", xi_override=np.sqrt(frac) * xi_th)
        assert stats.var_x * stats.var_p >= 0.25 - 1e-10
        assert stats.mean_photons >= -1e-10


def test_squeezing_grows_with_pump():
    spec = make_cavity(l2=2 * L_REF)
    xi_th = find_threshold(spec).xi_th
    values = [output_variances(spec, "b", xi_override=f * xi_th).squeezing_db
              for f in (0.3, 0.6, 0.9)]
    assert values[0] < values[1] < values[2]


# -------------------- loss model --------------------

def test_loss_identity_and_full():
    spec = make_cavity(l2=L_REF)
    xi = 0.9 * find_threshold(spec).xi_th
    stats = output_variances(spec, "b", xi_override=xi)
    assert apply_loss(stats, 1.0) == stats
    blank = apply_loss(stats, 0.0)
    assert blank.var_x == pytest.approx(0.5) and blank.var_p == pytest.approx(0.5)
    assert abs(blank.squeezing_db) < 1e-12 and blank.mean_photons == 0


def test_loss_arithmetic():
    stats = stats_from_couplings(bogoliubov(np.cosh(0.3466), -np.sinh(0.3466)),
                                 np.zeros((2, 2), dtype=complex))
    # var_x ~ 0.25 -> 0.375 under eta = 0.5 (about 3.01 dB down to 1.25 dB)
    lossy = apply_loss(stats, 0.5)
    assert lossy.var_x == pytest.approx(0.375, rel=1e-3)
    assert lossy.squeezing_db == pytest.approx(1.25, abs=0.02)


def test_loss_strictly_degrades_squeezing():
    spec = make_cavity(l2=2 * L_REF)
    xi = 0.95 * find_threshold(spec).xi_th
    stats = output_variances(spec, "b", xi_override=xi)
    assert stats.squeezing_db > 0
    for eta in (0.9, 0.6, 0.3):
        assert 0 < apply_loss(stats, eta).squeezing_db < stats.squeezing_db


def test_loss_eta_validation():
    spec = make_cavity(xi=0.0)
    stats = output_variances(spec, "b")
    with pytest.raises(ValueError):
        apply_loss(stats, 1.5)


# -------------------- field profile --------------------

def test_profile_passive_cavity_is_dark():
    spec = make_cavity(xi=0.0, theta=1.3)
    profile = field_profile(spec, samples_per_section=40)
    assert np.max(np.abs(profile.n_forward)) < 1e-12
    assert np.max(np.abs(profile.n_backward)) < 1e-12


def _pumped_cavity(l3_factor=4.0, fraction=0.8):
    spec = make_cavity(l2=L_REF, l3=l3_factor * L_REF)
    xi = np.sqrt(fraction) * find_threshold(spec).xi_th
    return spec, xi


def test_profile_nonnegative_and_continuous():
    spec, xi = _pumped_cavity()
    profile = field_profile(spec, samples_per_section=60, xi_override=xi)
    assert np.all(profile.n_forward >= -1e-10)
    assert np.all(profile.n_backward >= -1e-10)
    # interface samples appear twice (once per side) and must agree
    jumps_f = np.abs(np.diff(profile.n_forward))
    dz = np.diff(profile.z_grid)
    for arr in (profile.n_forward, profile.n_backward):
        same_z = np.where(dz == 0)[0]
        assert len(same_z) == 2
        assert np.max(np.abs(np.diff(arr)[same_z])) < 1e-9 * (1 + np.max(arr))
    assert np.max(jumps_f[dz > 0]) < np.inf


def test_profile_boundary_matches_ports():
    spec, xi = _pumped_cavity()
    profile = field_profile(spec, samples_per_section=30, xi_override=xi)
    n_b = output_variances(spec, "b", xi_override=xi).mean_photons
    n_g = output_variances(spec, "g", xi_override=xi).mean_photons
    assert profile.n_forward[-1] == pytest.approx(n_g, abs=1e-8 * (1 + n_g))
    assert profile.n_backward[0] == pytest.approx(n_b, abs=1e-8 * (1 + n_b))


def test_profile_rejects_above_threshold():
    spec = make_cavity(l2=L_REF)
    xi_th = find_threshold(spec).xi_th
    assert threshold_determinant(spec, 1.5 * xi_th) < 0
    from dfbopo import SingularResolvent
    with pytest.raises(SingularResolvent):
        field_profile(spec, samples_per_section=16, xi_override=1.5 * xi_th)


def test_profile_sample_validation():
    spec = make_cavity(xi=0.0)
    with pytest.raises(ValueError):
        field_profile(spec, samples_per_section=1)
