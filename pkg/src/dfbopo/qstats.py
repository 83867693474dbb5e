"""Quadrature statistics of the cavity outputs and the intracavity photon profile.

Quadratures use x = (w + w†)/sqrt(2), p = -i(w - w†)/sqrt(2), so the vacuum
variance is 1/2 and squeezing in dB is -10 log10(2 var) for the
minimum-variance quadrature. Both inputs (a, f) are taken as vacuum.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .cavity import CavityIO, CavitySpec, build_matrices, internal_fields, io_matrices
from .grating import solve_grating
from .linalg import bogoliubov

__all__ = ["QuadratureStats", "FieldProfile", "NotReal", "quad_transform",
           "output_variances", "stats_from_couplings", "apply_loss",
           "field_profile"]

_Q = np.array([[1.0, 1.0], [-1.0j, 1.0j]]) / math.sqrt(2.0)
_Q_INV = np.array([[1.0, 1.0j], [1.0, -1.0j]]) / math.sqrt(2.0)


class NotReal(ValueError):
    """Quadrature transfer matrix came out complex: input was not mode-pair form."""


@dataclass(frozen=True)
class QuadratureStats:
    """Output-mode second moments.

    var_x / var_p are the fixed-axis variances; the dB figures refer to the
    principal axes of the covariance ellipse (the cavity can rotate it), so
    squeezing_db >= -antisqueezing_db always refers to the quietest axis.
    """

    var_x: float
    var_p: float
    squeezing_db: float
    antisqueezing_db: float
    mean_photons: float


@dataclass(frozen=True)
class FieldProfile:
    z_grid: np.ndarray
    n_forward: np.ndarray
    n_backward: np.ndarray


def quad_transform(m: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Map a mode-pair matrix to its (real) quadrature representation Q M Q^-1."""
    t = _Q @ m @ _Q_INV
    scale = max(1.0, float(np.max(np.abs(t))))
    if float(np.max(np.abs(t.imag))) > tol * scale:
        raise NotReal("quadrature transfer has imaginary part; "
                      "input lacks the [[a, b], [b*, a*]] structure")
    return t.real


def _stats_from_cov(v: np.ndarray) -> QuadratureStats:
    ev = np.linalg.eigvalsh(v)
    var_x = float(v[0, 0])
    var_p = float(v[1, 1])
    return QuadratureStats(
        var_x=var_x,
        var_p=var_p,
        squeezing_db=-10.0 * math.log10(2.0 * float(ev[0])),
        antisqueezing_db=10.0 * math.log10(2.0 * float(ev[1])),
        mean_photons=(var_x + var_p - 1.0) / 2.0)


def stats_from_couplings(r: np.ndarray, t: np.ndarray) -> QuadratureStats:
    """Vacuum-input quadrature statistics of one output port with couplings r, t."""
    rq = quad_transform(r)
    tq = quad_transform(t)
    v = (rq @ rq.T + tq @ tq.T) / 2.0
    return _stats_from_cov(v)


def output_variances(spec: CavitySpec, port: str = "b",
                     xi_override: float | None = None,
                     io: CavityIO | None = None) -> QuadratureStats:
    """Quadrature statistics of the chosen output port ('b' or 'g')."""
    if io is None:
        io = io_matrices(spec, xi_override=xi_override)
    if port == "b":
        return stats_from_couplings(io.r_ba, io.t_bf)
    if port == "g":
        return stats_from_couplings(io.t_ga, io.r_gf)
    raise ValueError(f"port must be 'b' or 'g', got {port!r}")


def apply_loss(stats: QuadratureStats, eta: float) -> QuadratureStats:
    """Vacuum admixture with power transmission eta: var -> eta var + (1 - eta)/2.

    The identity admixture commutes with the principal-axis rotation, so the
    dB figures transform through the same map applied to the principal
    variances.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")

    def mix(var):
        return eta * var + (1.0 - eta) / 2.0

    v_min = 10.0 ** (-stats.squeezing_db / 10.0) / 2.0
    v_max = 10.0 ** (stats.antisqueezing_db / 10.0) / 2.0
    return QuadratureStats(
        var_x=mix(stats.var_x),
        var_p=mix(stats.var_p),
        squeezing_db=-10.0 * math.log10(2.0 * mix(v_min)),
        antisqueezing_db=10.0 * math.log10(2.0 * mix(v_max)),
        mean_photons=eta * stats.mean_photons)


def _mode_photons(block_a: np.ndarray, block_f: np.ndarray) -> float:
    """Vacuum photon number of a mode w = [block_a](a, a†) + [block_f](f, f†)."""
    return float(abs(block_a[0, 1]) ** 2 + abs(block_f[0, 1]) ** 2)


def field_profile(spec: CavitySpec, samples_per_section: int = 200,
                  xi_override: float | None = None) -> FieldProfile:
    """Mean photon number of the forward and backward fields along the device.

    Each section is sampled on an inclusive grid, so interface positions
    appear twice (once per side); the model is exactly continuous there. Gap
    coordinates interpolate the squeeze linearly; the backward gap field
    carries no distributed transformation.
    """
    if samples_per_section < 2:
        raise ValueError("samples_per_section must be >= 2")
    if xi_override is not None:
        g1 = dataclasses.replace(spec.grating1, xi=xi_override)
        g2 = dataclasses.replace(spec.grating2, xi=xi_override)
        xi = xi_override
    else:
        g1, g2, xi = spec.grating1, spec.grating2, spec.xi

    m = build_matrices(spec, xi_override=xi_override)
    fields = internal_fields(spec, matrices=m)
    sol1 = solve_grating(g1)
    sol2 = solve_grating(g2)
    theta_link = m.theta_link

    zs, nf, nb = [], [], []

    # grating 1: backward input is the gap-phased d field
    d_a = theta_link @ fields.d_from_a
    d_f = theta_link @ fields.d_from_f
    for z in np.linspace(0.0, g1.length, samples_per_section):
        quad = sol1.quad_at(float(z))
        wa, wb = bogoliubov(quad.u, quad.v), bogoliubov(quad.p, quad.q)
        va, vb = bogoliubov(quad.u_bar, quad.v_bar), bogoliubov(quad.p_bar, quad.q_bar)
        zs.append(float(z))
        nf.append(_mode_photons(wa + wb @ d_a, wb @ d_f))
        nb.append(_mode_photons(va + vb @ d_a, vb @ d_f))

    # gap: forward field accumulates squeeze; backward photon number constant
    if spec.mid_length > 0:
        for t in np.linspace(0.0, spec.mid_length, samples_per_section):
            ch, sh = np.cosh(xi * t), np.sinh(xi * t)
            s_t = np.array([[ch, -sh], [-sh, ch]], dtype=complex)
            zs.append(g1.length + float(t))
            nf.append(_mode_photons(s_t @ fields.c_from_a, s_t @ fields.c_from_f))
            nb.append(_mode_photons(fields.d_from_a, fields.d_from_f))

    # grating 2: forward input is the squeeze-linked c field, backward input f
    e_a = m.squeeze_link @ fields.c_from_a
    e_f = m.squeeze_link @ fields.c_from_f
    z0 = g1.length + spec.mid_length
    eye = np.eye(2, dtype=complex)
    for z in np.linspace(0.0, g2.length, samples_per_section):
        quad = sol2.quad_at(float(z))
        wa, wb = bogoliubov(quad.u, quad.v), bogoliubov(quad.p, quad.q)
        va, vb = bogoliubov(quad.u_bar, quad.v_bar), bogoliubov(quad.p_bar, quad.q_bar)
        zs.append(z0 + float(z))
        nf.append(_mode_photons(wa @ e_a, wa @ e_f + wb @ eye))
        nb.append(_mode_photons(va @ e_a, va @ e_f + vb @ eye))

    return FieldProfile(z_grid=np.array(zs), n_forward=np.array(nf),
                        n_backward=np.array(nb))
