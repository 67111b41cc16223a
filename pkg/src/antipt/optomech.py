"""Steady states and drive-dependent spectrum of a quadratically coupled
optomechanical system.

The optical mode is driven resonantly (``omega_L = omega_c``) with strength
``Omega``; the coupling ``g`` stiffens (``g > 0``) or softens (``g < 0``) the
mechanical spring in proportion to the intracavity photon number.  For
``g < 0`` the symmetric equilibrium ``Q = 0`` loses stability above the
critical drive ``Omega_c`` and two mirror equilibria appear.  All closed
forms here assume the sideband-unresolved regime ``gamma_c >> omega_m``.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import bisect

from .resonator import (
    DampingPhase,
    EigenSolution,
    ResonatorParams,
    _ratios,
    classify_phase,
    eigenpair_from_discriminant,
)


class SidebandWarning(UserWarning):
    """The adiabatic formulas are used outside ``gamma_c >> omega_m``."""


class NoTransitionError(ValueError):
    """Raised for ``g >= 0``: the spring only stiffens, no critical drive."""


class NoEPPairError(ValueError):
    """Raised when ``gamma_m >= 2 omega_m``: the bare resonator is already over-damped."""


@dataclass(frozen=True)
class OptomechParams:
    resonator: ResonatorParams
    g: float
    gamma_c: float
    Omega: float = 0.0
    omega_c: Optional[float] = None
    omega_L: Optional[float] = None

    def __post_init__(self):
        for name in ("g", "gamma_c", "Omega"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.gamma_c <= 0:
            raise ValueError(f"gamma_c must be > 0, got {self.gamma_c!r}")
        if self.Omega < 0:
            raise ValueError(f"Omega must be >= 0, got {self.Omega!r}")
        if self.omega_c is None:
            object.__setattr__(self, "omega_c", self.omega_L)
        elif self.omega_L is None:
            object.__setattr__(self, "omega_L", self.omega_c)
        elif self.omega_c != self.omega_L:
            raise ValueError("only resonant driving is supported: omega_L must equal omega_c")
        if self.gamma_c < 10 * self.resonator.omega_m:
            warnings.warn(
                f"gamma_c/omega_m = {self.gamma_c / self.resonator.omega_m:.3g} < 10; "
                "adiabatic steady-state formulas assume gamma_c >> omega_m",
                SidebandWarning, stacklevel=3,
            )

    @property
    def omega_m(self) -> float:
        return self.resonator.omega_m

    @property
    def gamma_m(self) -> float:
        return self.resonator.gamma_m

    def with_drive(self, Omega: float) -> "OptomechParams":
        return replace(self, Omega=Omega)

    def with_resonator(self, resonator: ResonatorParams) -> "OptomechParams":
        return replace(self, resonator=resonator)


def critical_drive(p: OptomechParams) -> float:
    """``Omega_c = sqrt(-gamma_c**2 omega_m / (16 g))``."""
    if p.g >= 0:
        raise NoTransitionError(f"no symmetry-breaking transition for g = {p.g!r} >= 0")
    return 0.25 * p.gamma_c * math.sqrt(p.omega_m / -p.g)


def intracavity_amplitude(p: OptomechParams, Q) -> complex:
    """Fixed point of the optical mode at displacement ``Q``."""
    return -2j * p.Omega / (p.gamma_c + 4j * p.g * np.square(Q))


def photon_number(p: OptomechParams, Q):
    """``|alpha_s(Q)|**2 = 4 Omega**2 / (gamma_c**2 + 16 g**2 Q**4)``."""
    Q = np.asarray(Q, dtype=float)
    return 4.0 * p.Omega**2 / (p.gamma_c**2 + 16.0 * p.g**2 * Q**4)


class Regime(enum.Enum):
    POSITIVE_COUPLING = "positive_coupling"
    SUB_CRITICAL = "sub_critical"
    SUPER_CRITICAL = "super_critical_ssb"


class SteadyBranch(NamedTuple):
    Q_s: float
    P_s: float
    alpha_s: complex
    stable: bool


@dataclass(frozen=True)
class SteadyStateSolution:
    """Equilibria ordered ``[Q = 0, +Q_s, -Q_s]``.

    ``stable`` follows the curvature of the adiabatic potential.  The full
    mean-field linearization (see :func:`antipt.dynamics.linearize_optomech`)
    adds retarded radiation-pressure damping that this flag does not see.
    """

    branches: tuple[SteadyBranch, ...]
    regime: Regime


def ssb_displacement(p: OptomechParams) -> float:
    """Positive SSB displacement ``[(Omega**2 - Omega_c**2)/(-g omega_m)]**(1/4)``; 0 at or below ``Omega_c``."""
    omega_c = critical_drive(p)
    if p.Omega <= omega_c:
        return 0.0
    q_sq = math.sqrt((p.Omega - omega_c) * (p.Omega + omega_c) / (-p.g * p.omega_m))
    return math.sqrt(q_sq)


def steady_states(p: OptomechParams) -> SteadyStateSolution:
    origin = complex(intracavity_amplitude(p, 0.0))
    if p.g >= 0:
        return SteadyStateSolution((SteadyBranch(0.0, 0.0, origin, True),), Regime.POSITIVE_COUPLING)
    if p.Omega <= critical_drive(p):
        return SteadyStateSolution((SteadyBranch(0.0, 0.0, origin, True),), Regime.SUB_CRITICAL)
    q = ssb_displacement(p)
    alpha = complex(intracavity_amplitude(p, q))
    return SteadyStateSolution(
        (SteadyBranch(0.0, 0.0, origin, False),
         SteadyBranch(q, 0.0, alpha, True),
         SteadyBranch(-q, 0.0, alpha, True)),
        Regime.SUPER_CRITICAL,
    )


def effective_potential(p: OptomechParams, Q):
    """``U = omega_m Q**2/2 + (2 Omega**2/gamma_c) arctan(4 g Q**2 / gamma_c)`` in units of hbar rad/s."""
    Q = np.asarray(Q, dtype=float)
    u = 0.5 * p.omega_m * Q**2 + (2.0 * p.Omega**2 / p.gamma_c) * np.arctan(4.0 * p.g * Q**2 / p.gamma_c)
    return float(u) if u.ndim == 0 else u


def restoring_force(p: OptomechParams, Q):
    """``dU/dQ = omega_m Q + 4 g |alpha_s(Q)|**2 Q`` (force balance on the momentum)."""
    Q = np.asarray(Q, dtype=float)
    f = p.omega_m * Q + 4.0 * p.g * photon_number(p, Q) * Q
    return float(f) if f.ndim == 0 else f


class SpringConstant(NamedTuple):
    k_eff: float
    omega_eff: float
    omega_eff_sq: float
    regime: Regime


def effective_spring_constant(p: OptomechParams) -> SpringConstant:
    """Spring constant about the stable equilibrium, sub- or super-critical.

    ``Omega == Omega_c`` uses the sub-critical form (both give zero there).
    """
    omega_c = critical_drive(p)
    w = p.omega_m
    if p.Omega <= omega_c:
        factor = (omega_c - p.Omega) * (omega_c + p.Omega) / omega_c**2
        regime = Regime.SUB_CRITICAL
    else:
        factor = 4.0 * (p.Omega - omega_c) * (p.Omega + omega_c) / p.Omega**2
        regime = Regime.SUPER_CRITICAL
    omega_sq = w * w * factor
    return SpringConstant(p.resonator.k * factor, math.sqrt(omega_sq), omega_sq, regime)


def origin_stiffness(p: OptomechParams) -> float:
    """``omega_eff**2`` for a linearization about ``Q = 0``; negative above ``Omega_c``."""
    omega_c = critical_drive(p)
    return p.omega_m**2 * (omega_c - p.Omega) * (omega_c + p.Omega) / omega_c**2


def _solution_from_stiffness(omega_sq: float, gamma: float) -> EigenSolution:
    disc = 0.25 * gamma * gamma - omega_sq
    if omega_sq >= 0:
        omega = math.sqrt(omega_sq)
        rp, rm = _ratios(omega, gamma)
        phase = classify_phase(omega, gamma)
    else:
        rp = rm = complex(math.nan, math.nan)
        phase = classify_phase(0.0, gamma)
    defective = phase is DampingPhase.CRITICAL_DAMPING
    if defective:
        disc = 0.0
    lp, lm = eigenpair_from_discriminant(disc, omega_sq, gamma)
    return EigenSolution(lp, lm, rp, rm, phase, defective=defective)


def eigenvalues_vs_drive(p: OptomechParams) -> EigenSolution:
    """Mechanical eigenvalues about the stable equilibrium with ``omega_m -> omega_eff``."""
    spring = effective_spring_constant(p)
    return _solution_from_stiffness(spring.omega_eff_sq, p.gamma_m)


def origin_eigenvalues(p: OptomechParams) -> EigenSolution:
    """Eigenvalues about ``Q = 0``; one grows (``Im > 0``) above ``Omega_c``.

    Ratios are undefined (NaN) for the unstable linearization.
    """
    return _solution_from_stiffness(origin_stiffness(p), p.gamma_m)


def drive_discriminant(p: OptomechParams) -> float:
    """``(gamma_m/2)**2 - omega_eff**2``: positive in the anti-PT-symmetric window."""
    return 0.25 * p.gamma_m**2 - effective_spring_constant(p).omega_eff_sq


@dataclass(frozen=True)
class EPResult:
    Omega_c: float
    Omega_EP1: float
    Omega_EP2: float
    #: EP2 as printed in closed form with the ``(gamma_m / 2 omega_m)**2`` bracket
    Omega_EP2_printed: float
    Omega_EP1_bisect: float
    Omega_EP2_bisect: float


def _spectral_gap_sign(p: OptomechParams, Omega: float) -> float:
    # |Re(l+ - l-)| - |Im(l+ - l-)|: > 0 broken, < 0 symmetric, 0 at an EP
    sol = eigenvalues_vs_drive(p.with_drive(Omega))
    diff = sol.lambda_plus - sol.lambda_minus
    return abs(diff.real) - abs(diff.imag)


def _ep_closed_form(p: OptomechParams) -> tuple[float, float, float, float]:
    omega_c = critical_drive(p)
    w, gam = p.omega_m, p.gamma_m
    if gam >= 2 * w:
        raise NoEPPairError(f"gamma_m/omega_m = {gam / w:.6g} >= 2: no EP pair")
    x1 = 0.5 * gam / w
    x2 = 0.25 * gam / w
    ep1 = omega_c * math.sqrt((1.0 - x1) * (1.0 + x1))
    # EP of the super-critical spectrum: 4 w**2 (1 - Omega_c**2/Omega**2) = (gam/2)**2
    ep2 = omega_c / math.sqrt((1.0 - x2) * (1.0 + x2))
    ep2_printed = omega_c / math.sqrt((1.0 - x1) * (1.0 + x1))
    return omega_c, ep1, ep2, ep2_printed


def ep_drives(p: OptomechParams) -> tuple[float, float, float]:
    """Closed-form ``(Omega_c, Omega_EP1, Omega_EP2)``."""
    return _ep_closed_form(p)[:3]


def locate_EPs(p: OptomechParams) -> EPResult:
    """Closed-form EP1/EP2 plus bisection on the drive-dependent spectrum."""
    omega_c, ep1, ep2, ep2_printed = _ep_closed_form(p)
    gam = p.gamma_m

    if gam == 0:
        return EPResult(omega_c, ep1, ep2, ep2_printed, omega_c, omega_c)

    f = lambda Om: _spectral_gap_sign(p, Om)
    xtol = 1e-15 * omega_c
    ep1_b = bisect(f, 0.0, omega_c, xtol=xtol, maxiter=400)
    hi = 2.0 * omega_c
    while f(hi) <= 0:
        hi *= 2.0
    ep2_b = bisect(f, omega_c, hi, xtol=xtol, maxiter=400)
    return EPResult(omega_c, ep1, ep2, ep2_printed, ep1_b, ep2_b)
