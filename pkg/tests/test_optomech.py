import math
import warnings

import numpy as np
import pytest

from antipt.optomech import (
    NoEPPairError,
    NoTransitionError,
    OptomechParams,
    Regime,
    SidebandWarning,
    critical_drive,
    drive_discriminant,
    effective_potential,
    effective_spring_constant,
    eigenvalues_vs_drive,
    intracavity_amplitude,
    locate_EPs,
    origin_eigenvalues,
    restoring_force,
    ssb_displacement,
    steady_states,
)
from antipt.resonator import DampingPhase, ResonatorParams

DESK = OptomechParams(ResonatorParams(1.0, 0.01), g=-0.01, gamma_c=50.0)
OMEGA_C = 125.0  # 50/4 * sqrt(1/0.01)


def test_critical_drive():
    assert critical_drive(DESK) == pytest.approx(OMEGA_C, rel=1e-15)
    with pytest.raises(NoTransitionError):
        critical_drive(OptomechParams(ResonatorParams(1.0, 0.01), g=0.01, gamma_c=50.0))


def test_validation():
    r = ResonatorParams(1.0, 0.01)
    with pytest.raises(ValueError):
        OptomechParams(r, g=-0.01, gamma_c=0.0)
    with pytest.raises(ValueError):
        OptomechParams(r, g=-0.01, gamma_c=50.0, Omega=-1.0)
    with pytest.raises(ValueError):
        OptomechParams(r, g=-0.01, gamma_c=50.0, omega_c=1.0, omega_L=2.0)
    with pytest.warns(SidebandWarning):
        OptomechParams(r, g=-0.01, gamma_c=2.0)
    p = OptomechParams(r, g=-0.01, gamma_c=50.0, omega_c=3.0)
    assert p.omega_L == 3.0


def test_branches_below_and_above():
    below = steady_states(DESK.with_drive(0.5 * OMEGA_C))
    assert below.regime is Regime.SUB_CRITICAL
    assert [b.Q_s for b in below.branches] == [0.0]
    at = steady_states(DESK.with_drive(OMEGA_C))
    assert at.regime is Regime.SUB_CRITICAL
    above = steady_states(DESK.with_drive(1.2 * OMEGA_C))
    assert above.regime is Regime.SUPER_CRITICAL
    q = above.branches[1].Q_s
    assert above.branches[2].Q_s == -q
    assert q**4 == pytest.approx((1.44 - 1.0) * OMEGA_C**2 / 0.01, rel=1e-13)
    assert [b.stable for b in above.branches] == [False, True, True]


def test_branch_is_fixed_point():
    p = DESK.with_drive(1.2 * OMEGA_C)
    q = ssb_displacement(p)
    alpha = intracavity_amplitude(p, q)
    lhs = -(p.gamma_c / 2) * alpha - 2j * p.g * q * q * alpha - 1j * p.Omega
    assert abs(lhs) <= 1e-12 * abs(p.Omega)
    assert restoring_force(p, q) == pytest.approx(0.0, abs=1e-9 * p.omega_m * q)


def test_potential_is_double_well():
    p = DESK.with_drive(1.2 * OMEGA_C)
    q = ssb_displacement(p)
    Q = np.linspace(-2 * q, 2 * q, 2001)
    U = effective_potential(p, Q)
    i = np.argmin(U)
    assert abs(abs(Q[i]) - q) < 2 * (Q[1] - Q[0])
    assert effective_potential(p, 0.0) > U[i]


def test_force_is_potential_gradient():
    p = DESK.with_drive(1.5 * OMEGA_C)
    Q = np.linspace(-40.0, 40.0, 81)
    h = 1e-5
    fd = (effective_potential(p, Q + h) - effective_potential(p, Q - h)) / (2 * h)
    assert np.allclose(fd, restoring_force(p, Q), rtol=1e-6, atol=1e-6)


def test_spring_constant_regimes():
    half = effective_spring_constant(DESK.with_drive(0.5 * OMEGA_C))
    assert half.k_eff == pytest.approx(0.75)
    above = effective_spring_constant(DESK.with_drive(2.0 * OMEGA_C))
    assert above.k_eff == pytest.approx(3.0)
    assert above.regime is Regime.SUPER_CRITICAL
    assert effective_spring_constant(DESK.with_drive(OMEGA_C)).k_eff == 0.0


def test_origin_grows_above_threshold():
    sol = origin_eigenvalues(DESK.with_drive(1.2 * OMEGA_C))
    assert max(sol.lambda_plus.imag, sol.lambda_minus.imag) > 0
    assert math.isnan(sol.ratio_plus.real)


def test_spring_softening_window():
    eps = locate_EPs(DESK)
    inside = 0.5 * (eps.Omega_EP1 + eps.Omega_EP2)
    assert drive_discriminant(DESK.with_drive(inside)) > 0
    assert eigenvalues_vs_drive(DESK.with_drive(inside)).phase is DampingPhase.OVER_DAMPING
    sol = eigenvalues_vs_drive(DESK.with_drive(0.5 * OMEGA_C))
    assert sol.phase is DampingPhase.UNDER_DAMPING


def test_ep_locations():
    eps = locate_EPs(DESK)
    x = 0.005
    assert eps.Omega_EP1 == pytest.approx(OMEGA_C * math.sqrt(1 - x * x), rel=1e-14)
    assert eps.Omega_EP2 == pytest.approx(OMEGA_C / math.sqrt(1 - x * x / 4), rel=1e-14)
    assert eps.Omega_EP1_bisect == pytest.approx(eps.Omega_EP1, rel=1e-12)
    assert eps.Omega_EP2_bisect == pytest.approx(eps.Omega_EP2, rel=1e-12)
    assert eps.Omega_EP1 < eps.Omega_c < eps.Omega_EP2 < eps.Omega_EP2_printed


def test_no_ep_pair_when_overdamped():
    p = OptomechParams(ResonatorParams(1.0, 3.0), g=-0.01, gamma_c=50.0)
    with pytest.raises(NoEPPairError):
        locate_EPs(p)


def test_undamped_eps_collapse():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        p = OptomechParams(ResonatorParams(1.0, 0.0), g=-0.01, gamma_c=50.0)
    eps = locate_EPs(p)
    assert eps.Omega_EP1 == eps.Omega_EP2 == eps.Omega_c
