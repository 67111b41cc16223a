"""Exceptional-point-enhanced frequency sensing.

The observable is the frequency splitting ``omega_{m,+/-}``: the real parts
of the two mechanical eigenvalues at drive ``Omega``.  A shift of the bare
frequency ``omega_m -> omega_m + delta`` (e.g. from an adsorbed particle)
moves the splitting linearly far from the EPs and as ``sqrt(delta)`` at
them, with an extra ``sqrt(omega_m / gamma_m)`` enhancement.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .optomech import OptomechParams, ep_drives, eigenvalues_vs_drive
from .resonator import ResonatorParams

#: Relative half-width (in ``Omega``) of the band where the sensitivity diverges.
DIVERGENCE_BAND = 1e-9


class EPDivergenceError(ArithmeticError):
    pass


class AsymptoticRangeWarning(UserWarning):
    """A near-EP square-root formula is used with ``|delta|`` beyond its small-shift regime."""


@dataclass(frozen=True)
class SplittingResult:
    omega_plus: float
    omega_minus: float
    resolvable: bool
    #: ``|Im(lambda_+ - lambda_-)|``, nonzero where the real splitting vanishes
    decay_splitting: float = 0.0
    note: str = ""

    @property
    def width(self) -> float:
        return self.omega_plus - self.omega_minus


@dataclass(frozen=True)
class MassPerturbation:
    m_p: float
    delta: float

    @classmethod
    def from_mass(cls, resonator: ResonatorParams, m_p: float) -> "MassPerturbation":
        if m_p < 0:
            raise ValueError(f"particle mass must be >= 0, got {m_p!r}")
        return cls(m_p, -0.5 * resonator.omega_m * m_p / resonator.mass)


def _result(s: float, gamma_m: float, decay: float = 0.0, note: str = "") -> SplittingResult:
    return SplittingResult(s, -s, 2.0 * s > gamma_m, decay, note)


def shifted(p: OptomechParams, delta: float) -> OptomechParams:
    r = p.resonator
    return p.with_resonator(ResonatorParams(r.omega_m + delta, r.gamma_m, r.mass))


def splitting_exact(p: OptomechParams, delta: float = 0.0) -> SplittingResult:
    """Splitting with ``omega_m -> omega_m + delta`` everywhere, ``Omega_c`` included."""
    sol = eigenvalues_vs_drive(shifted(p, delta))
    s = max(abs(sol.lambda_plus.real), abs(sol.lambda_minus.real))
    decay = abs((sol.lambda_plus - sol.lambda_minus).imag)
    return _result(s, p.gamma_m, decay)


def finite_difference_sensitivity(p: OptomechParams, rel_step: float = 1e-6) -> tuple[float, float]:
    """Central difference of :func:`splitting_exact` in ``omega_m``."""
    h = rel_step * p.omega_m
    up, down = splitting_exact(p, h), splitting_exact(p, -h)
    d_plus = (up.omega_plus - down.omega_plus) / (2.0 * h)
    return d_plus, -d_plus


@dataclass(frozen=True)
class Sensitivity:
    plus: float
    minus: float
    regime: str

    @property
    def magnitude(self) -> float:
        return abs(self.plus)


def sensitivity_analytic(p: OptomechParams) -> Sensitivity:
    """``d omega_{m,+/-} / d omega_m`` with ``g, gamma_c, Omega`` fixed.

    ``Omega_c`` moves with ``omega_m`` (``Omega_c**2`` is proportional to it);
    that dependence produces the ``1 - Omega**2/(2 Omega_c**2)`` and
    ``1 - 3 Omega_c**2/(2 Omega**2)`` factors.
    """
    omega_c, ep1, ep2 = ep_drives(p)
    omega = p.Omega
    for name, ep in (("EP1", ep1), ("EP2", ep2)):
        if abs(omega - ep) <= DIVERGENCE_BAND * omega_c:
            raise EPDivergenceError(f"sensitivity diverges at {name} (Omega = {omega!r})")
    if ep1 < omega < ep2:
        return Sensitivity(0.0, 0.0, "between_EPs")
    s = splitting_exact(p).omega_plus
    if s == 0:
        raise EPDivergenceError(f"zero splitting at Omega = {omega!r}")
    w, ratio = p.omega_m, (omega / omega_c) ** 2
    if omega < ep1:
        d = (w / s) * (1.0 - 0.5 * ratio)
        return Sensitivity(d, -d, "below_EP1")
    d = (4.0 * w / s) * (1.0 - 1.5 / ratio)
    return Sensitivity(d, -d, "above_EP2")


def _check_asymptotic(p: OptomechParams, delta: float) -> None:
    limit = 0.1 * p.gamma_m * (p.gamma_m / p.omega_m)
    if abs(delta) > limit:
        warnings.warn(
            f"|delta| = {abs(delta):.3g} exceeds {limit:.3g}; square-root law is approximate",
            AsymptoticRangeWarning, stacklevel=3,
        )


def splitting_near_EP(p: OptomechParams, delta: float, which: str) -> SplittingResult:
    """Leading-order splitting at ``Omega = Omega_EP1`` or ``Omega_EP2``.

    EP1 splits for ``delta > 0``, EP2 for ``delta < 0``; the other sign
    leaves the eigenvalues imaginary and the real splitting is zero.
    """
    if which not in ("EP1", "EP2"):
        raise ValueError(f"which must be 'EP1' or 'EP2', got {which!r}")
    _check_asymptotic(p, delta)
    w, gam = p.omega_m, p.gamma_m
    signed = delta if which == "EP1" else -delta
    if signed < 0:
        return _result(0.0, gam, note=f"delta has the non-splitting sign at {which}")
    coeff = 1.0 if which == "EP1" else 2.0
    s = coeff * gam * math.sqrt(w / gam) * math.sqrt(signed / gam)
    return _result(s, gam)


def splitting_far(p: OptomechParams, delta: float, regime: str) -> SplittingResult:
    """Linear response far from the EPs: ``(omega_m + delta)`` below, twice that above."""
    if regime not in ("below", "above"):
        raise ValueError(f"regime must be 'below' or 'above', got {regime!r}")
    base = max(p.omega_m + delta, 0.0)
    s = base if regime == "below" else 2.0 * base
    return _result(s, p.gamma_m)


def minimum_resolvable_mass(resonator: ResonatorParams) -> float:
    """Smallest particle mass whose EP2 splitting exceeds the linewidth: ``m / (8 Q_m**2)``."""
    return resonator.mass / (8.0 * resonator.quality_factor**2)


def mass_splitting(p: OptomechParams, m_p: float) -> SplittingResult:
    """Splitting ``+/- sqrt(2) omega_m sqrt(m_p/m)`` for a particle adsorbed at ``Omega ~ Omega_EP2``."""
    r = p.resonator
    pert = MassPerturbation.from_mass(r, m_p)
    s = math.sqrt(2.0) * r.omega_m * math.sqrt(pert.m_p / r.mass)
    resolvable = m_p > 0 and m_p / r.mass >= 1.0 / (8.0 * r.quality_factor**2)
    return SplittingResult(s, -s, resolvable)


def ep2_drive(p: OptomechParams) -> OptomechParams:
    """Copy of ``p`` driven at EP2."""
    return p.with_drive(ep_drives(p)[2])
