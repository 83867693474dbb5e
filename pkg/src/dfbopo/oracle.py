"""Independent check of the analytic grating solution by direct ODE integration.

The four-component mode vector (a, a†, b, b†) obeys a linear system with
z-periodic coefficients; propagating the identity matrix with classical
fixed-step RK4 yields the transfer matrix over the section, which is then
rearranged into the same input-output scattering convention the analytic
solver uses. This path shares no code with the analytic one and is the
arbiter wherever no closed form exists.
"""

from __future__ import annotations

import numpy as np

from .grating import EndpointScattering, GratingParams
from .linalg import IllConditioned

__all__ = ["integrate_transfer", "transfer_to_scattering", "convergence_order",
           "coupling_matrix"]


def coupling_matrix(g: GratingParams, z: float) -> np.ndarray:
    """Generator M(z) with d/dz (a, a†, b, b†) = M (a, a†, b, b†)."""
    ep = np.exp(1j * g.rho * z)
    em = np.conj(ep)
    k = g.kappa
    return np.array([
        [0.0, -g.xi, -1j * k * ep, 0.0],
        [-g.xi, 0.0, 0.0, 1j * k * em],
        [1j * k * em, 0.0, 0.0, 0.0],
        [0.0, -1j * k * ep, 0.0, 0.0],
    ], dtype=complex)


def _batch_transfer(params: list, step_count: int) -> np.ndarray:
    """RK4-propagate a stack of gratings together; returns (n, 4, 4)."""
    n = len(params)
    kap = np.array([g.kappa for g in params])
    xi = np.array([g.xi for g in params])
    rho = np.array([g.rho for g in params])
    length = np.array([g.length for g in params])

    def generator(z_frac):
        # scaled variable s = z / L: dT/ds = L M(sL) T, all entries dimensionless
        m = np.zeros((n, 4, 4), dtype=complex)
        ep = np.exp(1j * rho * length * z_frac)
        em = np.conj(ep)
        kl = kap * length
        m[:, 0, 1] = -xi * length
        m[:, 0, 2] = -1j * kl * ep
        m[:, 1, 0] = -xi * length
        m[:, 1, 3] = 1j * kl * em
        m[:, 2, 0] = 1j * kl * em
        m[:, 3, 1] = -1j * kl * ep
        return m

    h = 1.0 / step_count
    t = np.broadcast_to(np.eye(4, dtype=complex), (n, 4, 4)).copy()
    for i in range(step_count):
        s = i * h
        k1 = generator(s) @ t
        m_half = generator(s + h / 2)
        k2 = m_half @ (t + (h / 2) * k1)
        k3 = m_half @ (t + (h / 2) * k2)
        k4 = generator(s + h) @ (t + h * k3)
        t = t + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    return t


def integrate_transfer(g: GratingParams, step_count: int = 100_000) -> np.ndarray:
    """Transfer matrix of one grating over [0, L] by fixed-step RK4."""
    if step_count < 1000:
        raise ValueError("step_count must be >= 1000")
    return _batch_transfer([g], step_count)[0]


def transfer_to_scattering(t: np.ndarray, cond_bound: float = 1e12) -> EndpointScattering:
    """Rearrange a two-point transfer map into input-output scattering form.

    Inputs are a(0) and b(L); the backward-backward sub-block is inverted to
    swap b(0) from input to output.
    """
    taa, tab = t[0:2, 0:2], t[0:2, 2:4]
    tba, tbb = t[2:4, 0:2], t[2:4, 2:4]
    cond = np.linalg.cond(tbb)
    if not np.isfinite(cond) or cond > cond_bound:
        raise IllConditioned(f"backward sub-block cond = {cond:.3e}")
    tbb_inv = np.linalg.inv(tbb)
    fw_a = taa - tab @ tbb_inv @ tba
    fw_b = tab @ tbb_inv
    bw_a = -tbb_inv @ tba
    bw_b = tbb_inv
    return EndpointScattering(
        u=fw_a[0, 0], v=fw_a[0, 1], p=fw_b[0, 0], q=fw_b[0, 1],
        u_bar=bw_a[0, 0], v_bar=bw_a[0, 1], p_bar=bw_b[0, 0], q_bar=bw_b[0, 1])


def convergence_order(g: GratingParams, base_steps: int = 1000) -> float:
    """Richardson estimate of the integrator's order from N, 2N, 4N steps.

    Returns nan when the step-count increments vanish at machine precision
    (e.g. a trivial section where the integration is exact).
    """
    t1 = integrate_transfer(g, base_steps)
    t2 = integrate_transfer(g, 2 * base_steps)
    t4 = integrate_transfer(g, 4 * base_steps)
    e12 = float(np.max(np.abs(t1 - t2)))
    e24 = float(np.max(np.abs(t2 - t4)))
    if e12 < 1e-13 or e24 < 1e-14:
        return float("nan")
    return float(np.log2(e12 / e24))
