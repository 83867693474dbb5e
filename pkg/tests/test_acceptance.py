"""Acceptance gate: every release criterion with its stated tolerance.

Each test prints one `[ACCEPT] name: PASS/FAIL` line (run with -s to see
them live). Reference geometry throughout: kappa L1 = 3, L1 = 50 mm,
L3 = 4 L1, gamma_nl = 2.5e-2 1/(W m), resonant gap phase theta = pi/2.
"""

import time

import numpy as np
import pytest
from conftest import L_REF, make_cavity, make_grating, quad_deviation

from dfbopo import (GratingParams, endpoint_scattering, find_threshold,
                    integrate_transfer, io_map_4x4, io_matrices,
                    output_variances, scattering_general, scattering_rho0,
                    threshold_determinant, threshold_map,
                    transfer_to_scattering)
from dfbopo.grating import _general_solution
from dfbopo.linalg import metric_residual
from dfbopo.oracle import _batch_transfer, convergence_order
from dfbopo.qstats import field_profile


def report(name: str, ok: bool, detail: str) -> None:
    print(f"[ACCEPT] {name}: {'PASS' if ok else 'FAIL'} ({detail})", flush=True)
    assert ok, f"{name}: {detail}"


def test_threshold_reproduction():
    results = {}
    runtimes = {}
    for l2_factor, target in ((2.0, 0.21), (1.0, 0.84)):
        spec = make_cavity(l2=l2_factor * L_REF)
        start = time.perf_counter()
        results[l2_factor] = find_threshold(spec).pump_product
        runtimes[l2_factor] = time.perf_counter() - start
    ok = (abs(results[2.0] - 0.21) <= 0.1 * 0.21
          and abs(results[1.0] - 0.84) <= 0.1 * 0.84
          and max(runtimes.values()) < 5.0)
    report("threshold_reproduction", ok,
           f"P2(L2=2L1)={results[2.0]:.4f} W^2 (target 0.21+-10%), "
           f"P2(L2=L1)={results[1.0]:.4f} W^2 (target 0.84+-10%), "
           f"max runtime {max(runtimes.values()):.2f}s")


def test_squeezing_ceiling_symmetric_cavity():
    start = time.perf_counter()
    spec = make_cavity(l2=L_REF)
    xi_th = find_threshold(spec).xi_th
    best = 0.0
    for frac in np.linspace(0.05, 0.999, 48):
        stats = output_variances(spec, "b", xi_override=np.sqrt(frac) * xi_th)
        best = max(best, stats.squeezing_db)
    elapsed = time.perf_counter() - start
    ok = 2.7 <= best <= 3.2 and elapsed < 10.0
    report("squeezing_ceiling", ok,
           f"max b-port squeezing {best:.3f} dB in [2.7, 3.2], {elapsed:.2f}s")


def test_squeezing_grows_with_output_asymmetry():
    values = []
    for l2_factor in (1.0, 1.5, 2.0):
        spec = make_cavity(l2=l2_factor * L_REF)
        xi = np.sqrt(0.95) * find_threshold(spec).xi_th
        values.append(output_variances(spec, "b", xi_override=xi).squeezing_db)
    ok = values[0] < values[1] < values[2]
    report("squeezing_asymmetry_growth", ok,
           "b-port squeezing at 0.95 P2_th: "
           + " -> ".join(f"{v:.2f} dB" for v in values))


def test_threshold_map_monotonicity():
    base = make_cavity()
    tmap = threshold_map(base, np.linspace(L_REF, 2 * L_REF, 10),
                         np.linspace(L_REF, 4 * L_REF, 10))
    pp = tmap.pump_product
    ok = (tmap.ok.all()
          and bool(np.all(np.diff(pp, axis=0) <= 1e-12))
          and bool(np.all(np.diff(pp, axis=1) <= 1e-12)))
    report("threshold_map_monotone", ok,
           f"10x10 grid, range {np.nanmin(pp):.3f}..{np.nanmax(pp):.3f} W^2, "
           "non-increasing along L2 and L3")


def test_phase_shift_profile_shape():
    spec = make_cavity(kappa1_L=1.5, l2=L_REF, l3=0.0, theta=np.pi / 2)
    xi = np.sqrt(0.9) * find_threshold(spec).xi_th
    profile = field_profile(spec, samples_per_section=200, xi_override=xi)
    n = profile.n_forward
    second = slice(200, 400)  # no gap section: samples 200.. are grating 2
    n2 = n[second]
    i_min = int(np.argmin(n2))
    interior = 0 < i_min < len(n2) - 1
    strict = interior and n2[i_min] < n2[i_min - 1] and n2[i_min] < n2[i_min + 1]
    facet_above = n2[-1] > n2[i_min]
    ok = strict and facet_above
    report("phase_shift_profile", ok,
           f"min n_fwd={n2[i_min]:.1f} at {i_min/(len(n2)-1):.2f} of grating 2, "
           f"facet n_fwd={n2[-1]:.1f}, defect peak={n[199]:.1f}")


def test_classical_limits():
    # (a) no gain -> no pair creation anywhere
    g = make_grating(3.0, 0.0, 0.0)
    worst_pair = max(max(abs(q.v), abs(q.q), abs(q.v_bar), abs(q.q_bar))
                     for q in (scattering_rho0(g, z)
                               for z in np.linspace(0, g.length, 9)))
    # (b) deep grating: u decays as exp(-kappa z) over the first 10/kappa
    deep = make_grating(20.0, 0.0, 0.0)
    rel_dev = max(abs(scattering_rho0(deep, z).u - np.exp(-deep.kappa * z))
                  / np.exp(-deep.kappa * z)
                  for z in np.linspace(0, 10 / deep.kappa, 21))
    # (c) transmission matches both sech^2 and the classical integrator
    oracle = transfer_to_scattering(integrate_transfer(g, 100_000))
    t_analytic = abs(scattering_rho0(g, g.length).u) ** 2
    t_oracle = abs(oracle.u) ** 2
    sech2 = 1 / np.cosh(3.0) ** 2
    trans_dev = max(abs(t_analytic - t_oracle), abs(t_analytic - sech2))
    ok = worst_pair <= 1e-12 and rel_dev <= 1e-6 and trans_dev <= 1e-8
    report("classical_limits", ok,
           f"pair amplitudes {worst_pair:.1e} (<=1e-12), "
           f"decay deviation {rel_dev:.1e} (<=1e-6), "
           f"transmission deviation {trans_dev:.1e} (<=1e-8)")


def test_symplectic_commutator_suite():
    rng = np.random.default_rng(11)
    worst_norm = 0.0
    for _ in range(1000):
        g = make_grating(rng.uniform(0, 5), rng.uniform(0, 2),
                         rng.uniform(-10, 10))
        quad = scattering_general(g, g.length)
        worst_norm = max(worst_norm, abs(quad.forward_norm() - 1))

    worst_residual = 0.0
    kept = 0
    while kept < 1000:
        l2 = rng.uniform(0.5, 2.0) * L_REF
        l3 = rng.uniform(0.0, 4.0) * L_REF
        spec = make_cavity(kappa1_L=rng.uniform(0, 5),
                           kappa2_L=rng.uniform(0, 5),
                           l2=l2, l3=l3,
                           theta=rng.uniform(0, 2 * np.pi),
                           rho_L=rng.uniform(-10, 10))
        # keep every section's gain-length product inside the [0, 2] box
        xi = rng.uniform(0, 2) / max(L_REF, l2, l3)
        if threshold_determinant(spec, xi) < 1e-3:
            continue  # keep clearly-below-threshold draws only
        io = io_matrices(spec, xi_override=xi)
        worst_residual = max(worst_residual, metric_residual(io_map_4x4(io)))
        kept += 1
    ok = worst_norm < 1e-9 and worst_residual < 1e-8
    report("symplectic_suite", ok,
           f"1000 grating draws, worst |norm-1|={worst_norm:.1e} (<1e-9); "
           f"1000 cavity draws, worst metric residual={worst_residual:.1e} (<1e-8)")


def test_oracle_equivalence():
    start = time.perf_counter()
    rng = np.random.default_rng(5)
    gratings = [
        make_grating(3.0, 0.0, 0.0),    # degenerate: resonant passive
        make_grating(2.0, 0.0, 4.0),    # degenerate: stop-band edge
        make_grating(3.0, 1.0, 9.0),    # near-coincident root pair
        make_grating(5.0, 2.0, 10.0),   # box corner
    ]
    gratings += [make_grating(rng.uniform(0, 5), rng.uniform(0, 2),
                              rng.uniform(-10, 10)) for _ in range(20)]
    transfers = _batch_transfer(gratings, 100_000)
    worst = 0.0
    for g, t in zip(gratings, transfers):
        analytic = endpoint_scattering(g, _general_solution(g))
        worst = max(worst, quad_deviation(analytic, transfer_to_scattering(t)))
    order = convergence_order(make_grating(2.0, 0.3, 1.0))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-6 and 3.5 <= order <= 4.5 and elapsed < 60.0
    report("oracle_equivalence", ok,
           f"{len(gratings)} samples at 1e5 steps, worst deviation "
           f"{worst:.1e} (<1e-6), order {order:.2f} in [3.5, 4.5], {elapsed:.1f}s")


def test_uncertainty_and_vacuum_fixed_points():
    rng = np.random.default_rng(23)
    worst_product = np.inf
    kept = 0
    while kept < 150:
        l2 = rng.uniform(0.5, 2.0) * L_REF
        l3 = rng.uniform(0.0, 4.0) * L_REF
        spec = make_cavity(kappa1_L=rng.uniform(0.2, 5),
                           kappa2_L=rng.uniform(0.2, 5),
                           l2=l2, l3=l3,
                           theta=rng.uniform(0, 2 * np.pi),
                           rho_L=rng.uniform(-10, 10))
        xi = rng.uniform(0, 2) / max(L_REF, l2, l3)
        if threshold_determinant(spec, xi) < 1e-3:
            continue
        io = io_matrices(spec, xi_override=xi)
        for port in ("b", "g"):
            stats = output_variances(spec, port, io=io)
            worst_product = min(worst_product, stats.var_x * stats.var_p)
        kept += 1

    vac = make_cavity(xi=0.0, theta=1.7)
    vac_db = max(abs(output_variances(vac, port).squeezing_db)
                 for port in ("b", "g"))
    vac_n = max(abs(output_variances(vac, port).mean_photons)
                for port in ("b", "g"))
    ok = worst_product >= 0.25 - 1e-10 and vac_db < 1e-10 and vac_n < 1e-12
    report("uncertainty_vacuum", ok,
           f"min var product {worst_product:.6f} (>=0.25-1e-10); "
           f"passive outputs {vac_db:.1e} dB, {vac_n:.1e} photons")
