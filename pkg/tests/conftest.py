"""Shared builders and comparison helpers for the test suite."""

import numpy as np
import pytest

from dfbopo import CavitySpec, GratingParams, PumpConfig

QUAD_FIELDS = ("u", "v", "p", "q", "u_bar", "v_bar", "p_bar", "q_bar")

L_REF = 0.05  # reference section length (m) used across tests


def quad_deviation(a, b, fields=QUAD_FIELDS):
    """Max entrywise |difference| between two coefficient records."""
    return max(abs(complex(getattr(a, f)) - complex(getattr(b, f)))
               for f in fields)


def make_grating(kappa_L, xi_L, rho_L, length=L_REF):
    return GratingParams(kappa=kappa_L / length, xi=xi_L / length,
                         rho=rho_L / length, length=length)


def pumps_for_xi(xi, gamma_nl=0.025):
    """Symmetric pump pair producing the requested gain rate."""
    power = xi / (2.0 * gamma_nl)
    return PumpConfig(p1=power, p2=power, gamma_nl=gamma_nl)


def make_cavity(kappa1_L=3.0, l1=L_REF, kappa2_L=None, l2=None, l3=None,
                theta=np.pi / 2, xi=0.0, rho_L=0.0, gamma_nl=0.025):
    """Fabry-Perot style cavity; defaults mirror the reference geometry."""
    l2 = l1 if l2 is None else l2
    l3 = 4 * l1 if l3 is None else l3
    kappa = kappa1_L / l1
    kappa2 = kappa if kappa2_L is None else kappa2_L / l2
    g1 = GratingParams(kappa=kappa, xi=0.0, rho=rho_L / l1, length=l1)
    g2 = GratingParams(kappa=kappa2, xi=0.0, rho=rho_L / l1, length=l2)
    return CavitySpec(grating1=g1, grating2=g2, mid_length=l3, theta=theta,
                      pumps=pumps_for_xi(xi, gamma_nl))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
