"""Two-grating cavity composition: internal fields, input-output maps, threshold.

Geometry: gain-grating 1 (length L1), an unmodulated gap of length L3, and
gain-grating 2 (length L2). All three sections share the pump-set gain rate.
Six mode references: a, b are the forward input / backward output at the
first facet; c is the forward field leaving grating 1 at the gap; d the
backward field leaving grating 2 at the gap; f, g the backward input /
forward output at the final facet.

The coupled interface relations are

    c = M_ca a + M_cd T d          b = M_ba a + M_bd T d
    d = M_dc X c + M_df f          g = M_gc X c + M_gf f

where the M's hold the grating scattering coefficients. The gap links are

    T = diag(e^{-2i theta}, e^{+2i theta})   (round-trip propagation phase,
                                             i.e. relative fringe alignment
                                             of the two gratings; theta is
                                             the one-way carrier phase)
    X = [[cosh xi L3, -sinh xi L3],
         [-sinh xi L3, cosh xi L3]]          (forward-pass squeeze; the
                                             backward pass through the gap
                                             is phase-bookkept only)

With this choice the composed model agrees with a monolithic integration of
the section equations over the whole device (see tests), the resonance of a
symmetric cavity sits at theta = pi/2, and the squeeze accumulated in the
grating penetration depths adds coherently to the gap squeeze.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .grating import (GratingParams, PumpConfig, endpoint_scattering,
                      xi_from_pumps)
from .linalg import SingularResolvent, bogoliubov, resolvent

__all__ = [
    "CavitySpec", "CavityMatrices", "InternalFields", "CavityIO",
    "DeterminantNotReal", "build_matrices", "internal_fields", "io_matrices",
    "threshold_determinant", "io_map_4x4",
]


class DeterminantNotReal(ValueError):
    """Loop determinant came out complex: broken mode-pair structure upstream."""


@dataclass(frozen=True)
class CavitySpec:
    """Two gain-gratings around an unmodulated gap, driven by one pump pair.

    The pump configuration fixes the gain rate of all three sections; any xi
    carried by the passed-in gratings is overwritten. theta is normalized to
    [0, 2pi).
    """

    grating1: GratingParams
    grating2: GratingParams
    mid_length: float
    theta: float
    pumps: PumpConfig

    def __post_init__(self):
        if self.mid_length < 0:
            raise ValueError(f"mid_length must be >= 0, got {self.mid_length}")
        xi = xi_from_pumps(self.pumps)
        object.__setattr__(self, "theta", float(self.theta) % (2 * math.pi))
        object.__setattr__(self, "grating1",
                           dataclasses.replace(self.grating1, xi=xi))
        object.__setattr__(self, "grating2",
                           dataclasses.replace(self.grating2, xi=xi))

    @property
    def xi(self) -> float:
        return self.grating1.xi

    def total_length(self) -> float:
        return self.grating1.length + self.mid_length + self.grating2.length


@dataclass(frozen=True)
class CavityMatrices:
    """Grating coefficient matrices plus the two gap links (all 2x2 complex)."""

    m_ca: np.ndarray
    m_cd: np.ndarray
    m_dc: np.ndarray
    m_df: np.ndarray
    m_ba: np.ndarray
    m_bd: np.ndarray
    m_gf: np.ndarray
    m_gc: np.ndarray
    theta_link: np.ndarray
    squeeze_link: np.ndarray

    def loop(self) -> np.ndarray:
        """Round-trip matrix seen by the c field."""
        return self.m_cd @ self.theta_link @ self.m_dc @ self.squeeze_link


@dataclass(frozen=True)
class InternalFields:
    """Coefficient blocks expressing the interface fields c, d from inputs a, f."""

    c_from_a: np.ndarray
    c_from_f: np.ndarray
    d_from_a: np.ndarray
    d_from_f: np.ndarray


@dataclass(frozen=True)
class CavityIO:
    """Output couplings of both facets and the threshold margin."""

    r_ba: np.ndarray
    t_bf: np.ndarray
    r_gf: np.ndarray
    t_ga: np.ndarray
    threshold_margin: float


def _section_gratings(spec: CavitySpec, xi_override: float | None):
    if xi_override is None:
        return spec.grating1, spec.grating2, spec.xi
    g1 = dataclasses.replace(spec.grating1, xi=xi_override)
    g2 = dataclasses.replace(spec.grating2, xi=xi_override)
    return g1, g2, xi_override


def _gap_links(theta: float, xi: float, mid_length: float):
    phase = np.exp(-2j * theta)
    t = np.diag([phase, np.conj(phase)])
    ch, sh = np.cosh(xi * mid_length), np.sinh(xi * mid_length)
    x = np.array([[ch, -sh], [-sh, ch]], dtype=complex)
    return t, x


def build_matrices(spec: CavitySpec, xi_override: float | None = None) -> CavityMatrices:
    """Solve both gratings and assemble all interface matrices."""
    g1, g2, xi = _section_gratings(spec, xi_override)
    s1 = endpoint_scattering(g1)
    s2 = endpoint_scattering(g2)
    t, x = _gap_links(spec.theta, xi, spec.mid_length)
    return CavityMatrices(
        m_ca=bogoliubov(s1.u, s1.v), m_cd=bogoliubov(s1.p, s1.q),
        m_ba=bogoliubov(s1.u_bar, s1.v_bar), m_bd=bogoliubov(s1.p_bar, s1.q_bar),
        m_dc=bogoliubov(s2.u_bar, s2.v_bar), m_df=bogoliubov(s2.p_bar, s2.q_bar),
        m_gc=bogoliubov(s2.u, s2.v), m_gf=bogoliubov(s2.p, s2.q),
        theta_link=t, squeeze_link=x)


def internal_fields(spec: CavitySpec, matrices: CavityMatrices | None = None,
                    xi_override: float | None = None) -> InternalFields:
    """Eliminate the interface fields: c and d as linear maps of the inputs.

    Raises SingularResolvent at or above the oscillation threshold (the loop
    determinant is positive below the first threshold and crosses to negative
    at it; a negative value means the steady linear solution is unphysical).
    """
    m = matrices if matrices is not None else build_matrices(spec, xi_override)
    margin = _real_det(np.eye(2) - m.loop())
    if margin <= 0:
        raise SingularResolvent(
            f"loop determinant {margin:.3e} <= 0: at or above threshold")
    res_c = resolvent(m.m_cd @ m.theta_link @ m.m_dc @ m.squeeze_link)
    res_d = resolvent(m.m_dc @ m.squeeze_link @ m.m_cd @ m.theta_link)
    return InternalFields(
        c_from_a=res_c @ m.m_ca,
        c_from_f=res_c @ m.m_cd @ m.theta_link @ m.m_df,
        d_from_a=res_d @ m.m_dc @ m.squeeze_link @ m.m_ca,
        d_from_f=res_d @ m.m_df)


def io_matrices(spec: CavitySpec, xi_override: float | None = None) -> CavityIO:
    """Below-threshold input-output couplings (a, f) -> (b, g)."""
    m = build_matrices(spec, xi_override)
    fields = internal_fields(spec, matrices=m)
    margin = _real_det(np.eye(2) - m.loop())
    return CavityIO(
        r_ba=m.m_ba + m.m_bd @ m.theta_link @ fields.d_from_a,
        t_bf=m.m_bd @ m.theta_link @ fields.d_from_f,
        t_ga=m.m_gc @ m.squeeze_link @ fields.c_from_a,
        r_gf=m.m_gf + m.m_gc @ m.squeeze_link @ fields.c_from_f,
        threshold_margin=margin)


def threshold_determinant(spec: CavitySpec, xi_override: float) -> float:
    """Real value of det(I - loop) with every section's gain set to xi_override.

    Crosses zero at the parametric oscillation threshold; positive for a
    passive cavity.
    """
    m = build_matrices(spec, xi_override)
    return _real_det(np.eye(2) - m.loop())


def io_map_4x4(io: CavityIO) -> np.ndarray:
    """Full map (a, a†, f, f†) -> (b, b†, g, g†) for commutator checks."""
    s = np.zeros((4, 4), dtype=complex)
    s[0:2, 0:2] = io.r_ba
    s[0:2, 2:4] = io.t_bf
    s[2:4, 0:2] = io.t_ga
    s[2:4, 2:4] = io.r_gf
    return s


def _real_det(q: np.ndarray) -> float:
    det = complex(np.linalg.det(q))
    scale = abs(det.real) + np.finfo(float).eps
    if abs(det.imag) > 1e-10 * max(scale, 1.0):
        raise DeterminantNotReal(f"det = {det}; expected real by structure")
    return det.real
