"""Scattering solution of a uniform Bragg grating with co-propagating parametric gain.

The forward/backward mode envelopes (a, b) obey

    da/dz + xi * a†  = -i kappa e^{+i rho z} b
    db/dz            = +i kappa e^{-i rho z} a

on 0 <= z <= L, with inputs a(0) and b(L). The field anywhere inside is a
linear symplectic combination of the inputs,

    a(z) = u(z) a(0) + v(z) a†(0) + p(z) b(L) + q(z) b†(L)
    b(z) = ū(z) a(0) + v̄(z) a†(0) + p̄(z) b(L) + q̄(z) b†(L),

and this module computes all eight coefficients at any z. Three solver
backends cover the parameter space:

* closed forms at exact Bragg resonance (rho = 0),
* a four-exponential eigenbasis solve for general detuning,
* a matrix-exponential (confluent) fallback wherever the eigenbasis
  degenerates (no gain, stop-band edges, coincident roots).

Backward coefficients always come from the forward solution through
b = (i/kappa) e^{-i rho z} (da/dz + xi a†).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .linalg import IllConditioned, bogoliubov, solve_linear_4

__all__ = [
    "GratingParams", "PumpConfig", "EigenStructure", "ScatteringQuad",
    "EndpointScattering", "SpectrumPoint", "xi_from_pumps", "eigen_structure",
    "scattering_rho0", "scattering_general", "solve_grating",
    "backward_recovery", "endpoint_scattering", "reflection_spectrum",
]

# below this, the gain is treated as zero / the eigenbasis as degenerate and
# the matrix-exponential backend takes over (dimensionless, scaled by L)
_XI_L_FLOOR = 1e-4
_SEPARATION_FLOOR = 1e-5


@dataclass(frozen=True)
class GratingParams:
    """One uniform gain-grating section.

    kappa: grating coupling strength (1/m), >= 0
    xi: parametric gain rate (1/m), >= 0
    rho: detuning of the propagation constant from the grating wavenumber (1/m)
    length: section length (m), > 0
    """

    kappa: float
    xi: float
    rho: float
    length: float

    def __post_init__(self):
        if not (self.length > 0):
            raise ValueError(f"length must be > 0, got {self.length}")
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if self.xi < 0:
            raise ValueError(f"xi must be >= 0, got {self.xi}")
        for name in ("kappa", "xi", "rho", "length"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class PumpConfig:
    """Dual-pump drive: powers p1, p2 (W) and fiber nonlinearity gamma_nl (1/(W m))."""

    p1: float
    p2: float
    gamma_nl: float

    def __post_init__(self):
        if self.p1 < 0 or self.p2 < 0 or self.gamma_nl < 0:
            raise ValueError("pump powers and nonlinearity must be >= 0")


def xi_from_pumps(pumps: PumpConfig) -> float:
    """Degenerate four-wave-mixing gain rate 2 sqrt(P1 P2) gamma_nl."""
    return 2.0 * math.sqrt(pumps.p1 * pumps.p2) * pumps.gamma_nl


@dataclass(frozen=True)
class EigenStructure:
    """Spatial eigenvalues and mode-mixing ratios of a grating section.

    roots holds (+lam_plus, -lam_plus, +lam_minus, -lam_minus); gammas[i] is
    the ratio tying the conjugate-mode amplitude to the mode amplitude for
    root i. gammas diverge for the decoupled root pair as xi -> 0.
    """

    lambda_plus: complex
    lambda_minus: complex
    roots: tuple
    gammas: tuple
    degenerate: bool


def eigen_structure(g: GratingParams, eps_deg: float | None = None) -> EigenStructure:
    """Roots of lam^4 + (rho^2 - xi^2 - 2 kappa^2) lam^2 + (kappa^4 - xi^2 rho^2) = 0.

    Principal square roots throughout; the degeneracy flag trips when the two
    squared roots approach each other within eps_deg (relative to the rate
    scale kappa^2 + xi^2 + rho^2).
    """
    k2, x2, r2 = g.kappa ** 2, g.xi ** 2, g.rho ** 2
    disc = (r2 - x2 - 2 * k2) ** 2 + 4 * (x2 * r2 - k2 * k2)
    root = np.sqrt(complex(disc))
    base = x2 / 2 + k2 - r2 / 2
    lp2 = base + root / 2
    lm2 = base - root / 2
    lp = complex(np.sqrt(lp2))
    lm = complex(np.sqrt(lm2))
    roots = (lp, -lp, lm, -lm)

    gammas = []
    for lam in roots:
        num1 = k2 + 1j * g.rho * lam - lam * lam
        den1 = g.xi * (lam - 1j * g.rho)
        num2 = g.xi * (lam + 1j * g.rho)
        den2 = k2 - lam * lam - 1j * g.rho * lam
        if abs(den1) >= abs(den2):
            gammas.append(num1 / den1 if den1 != 0 else complex(np.inf))
        else:
            gammas.append(num2 / den2 if den2 != 0 else complex(np.inf))

    scale = k2 + x2 + r2 + np.finfo(float).eps
    if eps_deg is None:
        eps_deg = 1e-9 * scale
    degenerate = abs(lp2 - lm2) < eps_deg
    return EigenStructure(lambda_plus=lp, lambda_minus=lm, roots=roots,
                          gammas=tuple(gammas), degenerate=degenerate)


@dataclass(frozen=True)
class ScatteringQuad:
    """All eight scattering coefficients at one interior position z."""

    u: complex
    v: complex
    p: complex
    q: complex
    u_bar: complex
    v_bar: complex
    p_bar: complex
    q_bar: complex
    z: float

    def forward_norm(self) -> float:
        """|u|^2 + |p|^2 - |v|^2 - |q|^2 (equals 1 at z = L)."""
        return (abs(self.u) ** 2 + abs(self.p) ** 2
                - abs(self.v) ** 2 - abs(self.q) ** 2)

    def backward_norm(self) -> float:
        """|ū|^2 + |p̄|^2 - |v̄|^2 - |q̄|^2 (equals 1 at z = 0)."""
        return (abs(self.u_bar) ** 2 + abs(self.p_bar) ** 2
                - abs(self.v_bar) ** 2 - abs(self.q_bar) ** 2)


@dataclass(frozen=True)
class EndpointScattering:
    """Grating S-matrix data: forward outputs at z = L, backward outputs at z = 0."""

    u: complex
    v: complex
    p: complex
    q: complex
    u_bar: complex
    v_bar: complex
    p_bar: complex
    q_bar: complex

    def as_matrix(self) -> np.ndarray:
        """4x4 map (a0, a0†, bL, bL†) -> (aL, aL†, b0, b0†)."""
        s = np.zeros((4, 4), dtype=complex)
        s[0:2, 0:2] = bogoliubov(self.u, self.v)
        s[0:2, 2:4] = bogoliubov(self.p, self.q)
        s[2:4, 0:2] = bogoliubov(self.u_bar, self.v_bar)
        s[2:4, 2:4] = bogoliubov(self.p_bar, self.q_bar)
        return s


# ---------------------------------------------------------------------------
# solver backends
# ---------------------------------------------------------------------------

class _SqueezerSolution:
    """kappa = 0: the backward field decouples and the forward mode is a pure
    single-mode squeezer, a(z) = cosh(xi z) a0 - sinh(xi z) a0†."""

    def __init__(self, g: GratingParams):
        self.g = g

    def quad_at(self, z: float) -> ScatteringQuad:
        xi = self.g.xi
        return ScatteringQuad(
            u=complex(np.cosh(xi * z)), v=complex(-np.sinh(xi * z)),
            p=0j, q=0j, u_bar=0j, v_bar=0j, p_bar=1.0 + 0j, q_bar=0j, z=z)


class _Rho0Solution:
    """Closed forms at exact Bragg resonance, kappa > 0."""

    def __init__(self, g: GratingParams):
        if g.rho != 0:
            raise ValueError("closed forms require rho = 0")
        self.g = g
        kappa, xi, L = g.kappa, g.xi, g.length
        s = math.sqrt(xi * xi + 4 * kappa * kappa)
        self.lp = (xi + s) / 2
        self.lm = (-xi + s) / 2
        lp, lm = self.lp, self.lm
        self.delta = lp * lp + lm * lm + 2 * lp * lm * math.cosh((lp + lm) * L)
        self.C = 0.5 * (lp * lp - lm * lm) / self.delta
        self.D = -lp * lm * math.sinh((lp + lm) * L) / self.delta
        self.R = 1j * kappa * (lm * math.sinh(lp * L) - lp * math.sinh(lm * L)) / self.delta
        self.S = -1j * kappa * (lm * math.cosh(lp * L) + lp * math.cosh(lm * L)) / self.delta

    def quad_at(self, z: float) -> ScatteringQuad:
        g = self.g
        kappa, xi, L = g.kappa, g.xi, g.length
        if xi == 0:
            # passive grating in the cancellation-free cosh-ratio form
            chL = math.cosh(kappa * L)
            u = math.cosh(kappa * (L - z)) / chL
            p = -1j * math.sinh(kappa * z) / chL
            ub = -1j * math.sinh(kappa * (L - z)) / chL
            pb = math.cosh(kappa * z) / chL
            return ScatteringQuad(u=complex(u), v=0j, p=p, q=0j,
                                  u_bar=ub, v_bar=0j, p_bar=complex(pb), q_bar=0j, z=z)

        lp, lm, C, D, R, S, delta = self.lp, self.lm, self.C, self.D, self.R, self.S, self.delta
        cp, sp = math.cosh(lp * z), math.sinh(lp * z)
        cm, sm = math.cosh(lm * z), math.sinh(lm * z)
        u = (cp + cm) / 2 + C * (cp - cm) + D * (sp + sm)
        vstar = (-sp + sm) / 2 - C * (sp + sm) - D * (cp - cm)
        p = R * (cp - cm) + S * (sp + sm)
        qstar = -R * (sp + sm) - S * (cp - cm)

        # lm * lp = kappa^2 exactly at rho = 0: divide the kappa^2 analytically
        # so the backward coefficients stay finite and accurate as kappa -> 0
        chS = math.cosh((lp + lm) * L)
        shS = math.sinh((lp + lm) * L)
        cpL, cmL = math.cosh(lp * L), math.cosh(lm * L)
        spL, smL = math.sinh(lp * L), math.sinh(lm * L)
        ub = 1j * kappa * ((0.5 + C) * sp / lp
                           + (lm + lp * chS) * sm / delta
                           - shS * (lm * cp + lp * cm) / delta)
        vb = 1j * kappa * (-(0.5 + C) * cp / lp
                           + (lm + lp * chS) * cm / delta
                           - shS * (lp * sm - lm * sp) / delta)
        pb = -((lm * spL - lp * smL) * (lm * sp - lp * sm)
               - (lm * cpL + lp * cmL) * (lm * cp + lp * cm)) / delta
        qb = -((lm * spL - lp * smL) * (lm * cp + lp * cm)
               + (lm * cpL + lp * cmL) * (lp * sm - lm * sp)) / delta
        # the vb bracket is real at rho = 0, so conj(v*' + xi u) is a no-op
        return ScatteringQuad(u=complex(u), v=complex(vstar),
                              p=p, q=np.conj(qstar),
                              u_bar=ub, v_bar=vb,
                              p_bar=complex(pb), q_bar=complex(qb), z=z)


class _BasisSolution:
    """Four-exponential eigenbasis solve for general detuning.

    The coefficient pairs (u, v*) and (p, q*) are expanded over e^{lam_i z};
    boundary conditions at z = 0 and the backward-field conditions at z = L
    form one shared 4x4 system with two right-hand sides.
    """

    def __init__(self, g: GratingParams, eig: EigenStructure):
        self.g = g
        L = g.length
        lams = np.array(eig.roots, dtype=complex)
        gammas = np.array(eig.gammas, dtype=complex)
        eL = np.exp(lams * L)
        # rows: u(0)=u0, v*(0)=0, (u' + xi v*)(L) = c, (v*' + xi u)(L) = 0
        # scaled by L so all rows are dimensionless
        a = np.stack([
            np.ones(4, dtype=complex),
            gammas,
            (lams + g.xi * gammas) * eL * L,
            (gammas * lams + g.xi) * eL * L,
        ])
        rhs = np.stack([
            np.array([1.0, 0, 0, 0], dtype=complex),
            np.array([0, 0, -1j * g.kappa * L * np.exp(1j * g.rho * L), 0], dtype=complex),
        ], axis=1)
        coeffs = np.stack([solve_linear_4(a, rhs[:, 0]),
                           solve_linear_4(a, rhs[:, 1])], axis=1)
        self._lams = lams
        self._gammas = gammas
        self._U = coeffs[:, 0]
        self._P = coeffs[:, 1]

    def quad_at(self, z: float) -> ScatteringQuad:
        g = self.g
        lams, gammas, U, P = self._lams, self._gammas, self._U, self._P
        ez = np.exp(lams * z)
        phase = np.exp(-1j * g.rho * z)
        u = np.sum(U * ez)
        vstar = np.sum(gammas * U * ez)
        p = np.sum(P * ez)
        qstar = np.sum(gammas * P * ez)
        du = np.sum((lams + g.xi * gammas) * U * ez)      # u' + xi v*
        dv = np.sum((gammas * lams + g.xi) * U * ez)      # v*' + xi u
        dp = np.sum((lams + g.xi * gammas) * P * ez)
        dq = np.sum((gammas * lams + g.xi) * P * ez)
        ik = 1j / g.kappa
        return ScatteringQuad(
            u=u, v=np.conj(vstar), p=p, q=np.conj(qstar),
            u_bar=ik * phase * du, v_bar=ik * phase * np.conj(dv),
            p_bar=ik * phase * dp, q_bar=ik * phase * np.conj(dq), z=z)


class _CompanionSolution:
    """Matrix-exponential propagation of (u, u', v*, v*').

    Exact for every eigenvalue pattern, including coincident roots, where it
    realizes the confluent (polynomial-times-exponential) basis implicitly.
    """

    def __init__(self, g: GratingParams):
        self.g = g
        k2 = g.kappa ** 2
        self._C = np.array([
            [0, 1, 0, 0],
            [k2, 1j * g.rho, 1j * g.rho * g.xi, -g.xi],
            [0, 0, 0, 1],
            [-1j * g.rho * g.xi, -g.xi, k2, -1j * g.rho],
        ], dtype=complex)
        eL = expm(self._C * g.length)
        r1 = eL[1] + g.xi * eL[2]     # (u' + xi v*)(L) row
        r2 = eL[3] + g.xi * eL[0]     # (v*' + xi u)(L) row
        m = np.array([[r1[1], r1[3]], [r2[1], r2[3]]])
        cu = -1j * g.kappa * np.exp(1j * g.rho * g.length)
        try:
            su = np.linalg.solve(m, np.array([-r1[0], -r2[0]]))
            sp = np.linalg.solve(m, np.array([cu, 0.0]))
        except np.linalg.LinAlgError as exc:
            raise IllConditioned(str(exc)) from exc
        self._Yu0 = np.array([1.0, su[0], 0.0, su[1]], dtype=complex)
        self._Yp0 = np.array([0.0, sp[0], 0.0, sp[1]], dtype=complex)

    def quad_at(self, z: float) -> ScatteringQuad:
        g = self.g
        ez = expm(self._C * z)
        yu = ez @ self._Yu0
        yp = ez @ self._Yp0
        phase = np.exp(-1j * g.rho * z)
        ik = 1j / g.kappa
        return ScatteringQuad(
            u=yu[0], v=np.conj(yu[2]), p=yp[0], q=np.conj(yp[2]),
            u_bar=ik * phase * (yu[1] + g.xi * yu[2]),
            v_bar=ik * phase * np.conj(yu[3] + g.xi * yu[0]),
            p_bar=ik * phase * (yp[1] + g.xi * yp[2]),
            q_bar=ik * phase * np.conj(yp[3] + g.xi * yp[0]), z=z)


def _general_solution(g: GratingParams):
    """Dispatch for arbitrary detuning: eigenbasis where well separated, else expm."""
    if g.kappa == 0:
        return _SqueezerSolution(g)
    eig = eigen_structure(g)
    L = g.length
    lams = np.array(eig.roots)
    scale = 1.0 + float(np.max(np.abs(lams))) * L
    sep = min(abs(lams[i] - lams[j]) * L
              for i in range(4) for j in range(i + 1, 4)) / scale
    if g.xi * L < _XI_L_FLOOR or sep < _SEPARATION_FLOOR:
        return _CompanionSolution(g)
    try:
        return _BasisSolution(g, eig)
    except IllConditioned:
        return _CompanionSolution(g)


def solve_grating(g: GratingParams):
    """Return a solution object with quad_at(z); fastest valid backend."""
    if g.kappa == 0:
        return _SqueezerSolution(g)
    if g.rho == 0:
        return _Rho0Solution(g)
    return _general_solution(g)


def scattering_rho0(g: GratingParams, z: float) -> ScatteringQuad:
    """Closed-form coefficients at Bragg resonance (requires g.rho == 0)."""
    _check_z(g, z)
    if g.kappa == 0:
        return _SqueezerSolution(g).quad_at(z)
    return _Rho0Solution(g).quad_at(z)


def scattering_general(g: GratingParams, z: float) -> ScatteringQuad:
    """Coefficients at arbitrary detuning via the eigenbasis/expm backends.

    Never routes through the rho = 0 closed forms, so the two paths stay
    independently testable against each other.
    """
    _check_z(g, z)
    return _general_solution(g).quad_at(z)


def backward_recovery(solution, z: float):
    """Backward coefficients (ū, v̄, p̄, q̄) implied by a forward solution."""
    quad = solution.quad_at(z)
    return quad.u_bar, quad.v_bar, quad.p_bar, quad.q_bar


def endpoint_scattering(g: GratingParams, solution=None) -> EndpointScattering:
    """Assemble the grating S-matrix data (forward at L, backward at 0)."""
    sol = solution if solution is not None else solve_grating(g)
    qL = sol.quad_at(g.length)
    q0 = sol.quad_at(0.0)
    return EndpointScattering(
        u=qL.u, v=qL.v, p=qL.p, q=qL.q,
        u_bar=q0.u_bar, v_bar=q0.v_bar, p_bar=q0.p_bar, q_bar=q0.q_bar)


def _check_z(g: GratingParams, z: float) -> None:
    if not (0.0 <= z <= g.length * (1 + 1e-12)):
        raise ValueError(f"z = {z} outside [0, {g.length}]")


@dataclass(frozen=True)
class SpectrumPoint:
    rho: float
    transmission: float
    reflection: float
    photon_gain: float
    ok: bool


def reflection_spectrum(g: GratingParams, rho_grid) -> list:
    """Per-detuning scattering summary over a grid.

    transmission = |u(L)|^2, reflection = |ū(0)|^2, and photon_gain is the
    phase-averaged total output flux per unit coherent seed,
    |u|^2 + |v|^2 + |ū|^2 + |v̄|^2 (unity for a passive grating). Grid points
    where the solve degenerates are flagged rather than aborting the sweep.
    """
    points = []
    for rho in np.asarray(rho_grid, dtype=float):
        gp = GratingParams(kappa=g.kappa, xi=g.xi, rho=float(rho), length=g.length)
        try:
            sol = _general_solution(gp)
            qL = sol.quad_at(gp.length)
            q0 = sol.quad_at(0.0)
        except IllConditioned:
            points.append(SpectrumPoint(float(rho), math.nan, math.nan, math.nan, False))
            continue
        trans = abs(qL.u) ** 2
        refl = abs(q0.u_bar) ** 2
        gain = trans + abs(qL.v) ** 2 + refl + abs(q0.v_bar) ** 2
        points.append(SpectrumPoint(float(rho), trans, refl, gain, True))
    return points
