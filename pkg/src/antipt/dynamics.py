"""Mean-value equations of motion, integrated with fixed-step RK4.

Bare resonator::

    dQ/dt = omega_m P
    dP/dt = -omega_m Q - gamma_m P

Quadratically coupled optomechanics (resonant drive, alpha = <A>)::

    dalpha/dt = -(gamma_c/2) alpha - 2i g Q**2 alpha - i Omega
    dQ/dt     = omega_m P
    dP/dt     = -omega_m Q - 4 g |alpha|**2 Q - gamma_m P

The optical equation is reconstructed from the Hamiltonian with standard
input-output damping; its fixed points reproduce the closed forms in
:mod:`antipt.optomech`.  The state is kept real (alpha split in two).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .optomech import OptomechParams, photon_number
from .resonator import ResonatorParams

State = Sequence[float]

#: ``step * max_rate`` must stay below this.
STEP_SAFETY = 0.1


class StepBoundError(ValueError):
    pass


class DivergenceError(ArithmeticError):
    """Non-finite state during integration."""

    def __init__(self, t: float, state):
        self.t = t
        self.state = tuple(state)
        super().__init__(f"non-finite state at t = {t:.6g}: {self.state}")


@dataclass(frozen=True)
class IntegratorConfig:
    step: float
    t_end: float
    record_stride: int = 1
    method: str = "rk4"
    #: fastest rate of the system to be integrated; checked against ``step``
    max_rate: float | None = None

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise StepBoundError(f"step must be positive and finite, got {self.step!r}")
        if not self.t_end > self.step:
            raise StepBoundError(f"t_end ({self.t_end!r}) must exceed step ({self.step!r})")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")
        if self.method != "rk4":
            raise ValueError(f"unsupported method {self.method!r}; only 'rk4' is available")
        if self.max_rate is not None:
            self.check_rate(self.max_rate)

    @property
    def n_steps(self) -> int:
        return max(1, int(math.ceil(self.t_end / self.step - 1e-9)))

    def check_rate(self, rate: float) -> None:
        if rate > 0 and not self.step < STEP_SAFETY / rate:
            raise StepBoundError(
                f"step {self.step:.3g} violates the stability bound "
                f"step < {STEP_SAFETY}/{rate:.6g} = {STEP_SAFETY / rate:.3g}"
            )


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    Q: np.ndarray
    P: np.ndarray
    alpha_re: np.ndarray
    alpha_im: np.ndarray

    def __len__(self):
        return len(self.t)

    @property
    def alpha(self) -> np.ndarray:
        return self.alpha_re + 1j * self.alpha_im

    def component(self, name: str) -> np.ndarray:
        if name not in ("Q", "P", "alpha_re", "alpha_im"):
            raise KeyError(f"unknown trajectory component {name!r}")
        return getattr(self, name)

    def final(self) -> tuple[float, float, complex]:
        return float(self.Q[-1]), float(self.P[-1]), complex(self.alpha[-1])


def rk4(rhs: Callable[[list], tuple], y0: State, step: float, n_steps: int, stride: int = 1):
    """Classic RK4 on an autonomous system ``y' = rhs(y)``.

    Plain-float loop: for 2-4 variables this is several times faster than
    small numpy arrays.  Returns ``(times, states)`` sampled every ``stride``
    steps plus the final step.
    """
    y = [float(v) for v in y0]
    h, h2, h6 = step, 0.5 * step, step / 6.0
    times = [0.0]
    states = [tuple(y)]
    for n in range(1, n_steps + 1):
        k1 = rhs(y)
        k2 = rhs([a + h2 * b for a, b in zip(y, k1)])
        k3 = rhs([a + h2 * b for a, b in zip(y, k2)])
        k4 = rhs([a + h * b for a, b in zip(y, k3)])
        y = [a + h6 * (b1 + 2.0 * (b2 + b3) + b4) for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4)]
        if n % stride == 0 or n == n_steps:
            if not all(map(math.isfinite, y)):
                raise DivergenceError(n * h, y)
            times.append(n * h)
            states.append(tuple(y))
    return np.array(times), np.array(states)


def resonator_rhs(params: ResonatorParams):
    w, g = params.omega_m, params.gamma_m

    def rhs(y):
        return (w * y[1], -w * y[0] - g * y[1])

    return rhs


def simulate_resonator(params: ResonatorParams, Q0: float, P0: float, cfg: IntegratorConfig) -> Trajectory:
    cfg.check_rate(max(params.omega_m, params.gamma_m))
    if not (math.isfinite(Q0) and math.isfinite(P0)):
        raise ValueError("initial state must be finite")
    t, ys = rk4(resonator_rhs(params), (Q0, P0), cfg.step, cfg.n_steps, cfg.record_stride)
    zeros = np.zeros_like(t)
    return Trajectory(t, ys[:, 0], ys[:, 1], zeros, zeros.copy())


def analytic_resonator_solution(params: ResonatorParams, Q0: float, P0: float, t):
    """Exact ``(Q, P)`` via the matrix exponential of ``A = [[0, w], [-w, -g]]``.

    ``exp(A t) = exp(-g t/2) [c(t) I + s(t) (A + g/2 I)]`` with ``c, s`` the
    cosh/sinh (over-damped), cos/sin (under-damped) or ``1, t`` (critical)
    pair.  Vectorized over ``t``; exponentials are combined before
    evaluation so long over-damped horizons do not overflow.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be >= 0")
    w, g = params.omega_m, params.gamma_m
    tau = -0.5 * g
    disc = (0.5 * g - w) * (0.5 * g + w)
    if disc > 0:
        x = math.sqrt(disc)
        e_fast, e_slow = np.exp((tau - x) * t), np.exp((tau + x) * t)
        ec = 0.5 * (e_slow + e_fast)
        es = 0.5 * (e_slow - e_fast) / x
    elif disc < 0:
        x = math.sqrt(-disc)
        decay = np.exp(tau * t)
        ec = decay * np.cos(x * t)
        es = decay * np.sin(x * t) / x
    else:
        decay = np.exp(tau * t)
        ec = decay
        es = decay * t
    # A - tau I = [[g/2, w], [-w, -g/2]]
    Q = ec * Q0 + es * (0.5 * g * Q0 + w * P0)
    P = ec * P0 + es * (-w * Q0 - 0.5 * g * P0)
    if Q.ndim == 0:
        return float(Q), float(P)
    return Q, P


def optomech_rhs(p: OptomechParams):
    w, gm, g, half_c, drive = p.omega_m, p.gamma_m, p.g, 0.5 * p.gamma_c, p.Omega

    def rhs(y):
        Q, P, ar, ai = y
        shift = 2.0 * g * Q * Q
        return (
            w * P,
            -w * Q - 4.0 * g * (ar * ar + ai * ai) * Q - gm * P,
            -half_c * ar + shift * ai,
            -half_c * ai - shift * ar - drive,
        )

    return rhs


def optomech_max_rate(p: OptomechParams) -> float:
    """Fastest rate entering the stability bound (spring rate taken at ``Q = 0``)."""
    spring = 4.0 * abs(p.g) * float(photon_number(p, 0.0))
    return max(p.omega_m, p.gamma_m, 0.5 * p.gamma_c, spring)


def simulate_optomech(p: OptomechParams, Q0: float, P0: float, alpha0: complex, cfg: IntegratorConfig) -> Trajectory:
    cfg.check_rate(optomech_max_rate(p))
    alpha0 = complex(alpha0)
    t, ys = rk4(optomech_rhs(p), (Q0, P0, alpha0.real, alpha0.imag), cfg.step, cfg.n_steps, cfg.record_stride)
    return Trajectory(t, ys[:, 0], ys[:, 1], ys[:, 2], ys[:, 3])


def adiabatic_rhs(p: OptomechParams):
    """Mechanics with the optical field slaved to ``alpha_s(Q)`` (no retardation)."""
    w, gm, g = p.omega_m, p.gamma_m, p.g
    c2, drive_sq = p.gamma_c**2, p.Omega**2

    def rhs(y):
        Q, P = y
        n = 4.0 * drive_sq / (c2 + 16.0 * g * g * Q**4)
        return (w * P, -w * Q - 4.0 * g * n * Q - gm * P)

    return rhs


def simulate_adiabatic(p: OptomechParams, Q0: float, P0: float, cfg: IntegratorConfig) -> Trajectory:
    spring = 4.0 * abs(p.g) * float(photon_number(p, 0.0))
    cfg.check_rate(max(p.omega_m, p.gamma_m, spring))
    t, ys = rk4(adiabatic_rhs(p), (Q0, P0), cfg.step, cfg.n_steps, cfg.record_stride)
    alpha = np.asarray(-2j * p.Omega / (p.gamma_c + 4j * p.g * ys[:, 0] ** 2))
    return Trajectory(t, ys[:, 0], ys[:, 1], alpha.real.copy(), alpha.imag.copy())


def optomech_residual(p: OptomechParams, Q: float, P: float, alpha: complex) -> float:
    """Max-abs right-hand side at a candidate fixed point."""
    alpha = complex(alpha)
    return max(abs(v) for v in optomech_rhs(p)((Q, P, alpha.real, alpha.imag)))


def optomech_jacobian(p: OptomechParams, state: State) -> np.ndarray:
    """Jacobian of :func:`optomech_rhs` in ``(Q, P, Re alpha, Im alpha)``."""
    Q, _, ar, ai = state
    w, gm, g, half_c = p.omega_m, p.gamma_m, p.g, 0.5 * p.gamma_c
    n = ar * ar + ai * ai
    return np.array([
        [0.0, w, 0.0, 0.0],
        [-w - 4.0 * g * n, -gm, -8.0 * g * Q * ar, -8.0 * g * Q * ai],
        [4.0 * g * Q * ai, 0.0, -half_c, 2.0 * g * Q * Q],
        [-4.0 * g * Q * ar, 0.0, -2.0 * g * Q * Q, -half_c],
    ])


def linearize_optomech(p: OptomechParams, Q: float, alpha: complex) -> np.ndarray:
    """Eigenvalues (growth rates ``mu``, ``x ~ exp(mu t)``) about a fixed point."""
    alpha = complex(alpha)
    return np.linalg.eigvals(optomech_jacobian(p, (Q, 0.0, alpha.real, alpha.imag)))


def origin_growth_rate(p: OptomechParams) -> float:
    """Largest real part of the full linearization about ``Q = 0``."""
    alpha = -2j * p.Omega / p.gamma_c
    return float(np.max(linearize_optomech(p, 0.0, alpha).real))


def locate_branch_emergence(p: OptomechParams, rtol: float = 1e-13) -> float:
    """Drive at which ``Q = 0`` first becomes unstable, by bisection.

    Uses only the linearized dynamics (no closed form for ``Omega_c``).
    """
    def grows(drive):
        return origin_growth_rate(p.with_drive(drive)) > 0

    lo, hi = 0.0, p.omega_m
    for _ in range(400):
        if grows(hi):
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise ArithmeticError("Q = 0 stays stable for every drive tried")
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if grows(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def count_zero_crossings(traj: Trajectory, component: str = "Q") -> int:
    """Strict sign changes of one component; exact zeros are skipped."""
    x = np.sign(traj.component(component))
    x = x[x != 0]
    if x.size == 0:
        return 0
    return int(np.count_nonzero(x[1:] != x[:-1]))


def extrema_magnitudes(traj: Trajectory, component: str = "Q") -> tuple[np.ndarray, np.ndarray]:
    """Times and magnitudes of the local maxima of ``|x|``, refined by a parabola through three samples."""
    y = np.abs(traj.component(component))
    i = np.flatnonzero((y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:])) + 1
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    denom = y0 - 2.0 * y1 + y2
    with np.errstate(divide="ignore", invalid="ignore"):
        shift = np.where(denom != 0, 0.5 * (y0 - y2) / denom, 0.0)
    dt = traj.t[1] - traj.t[0]
    return traj.t[i] + shift * dt, y1 - 0.25 * (y0 - y2) * shift


def slowest_decay_rate(params: ResonatorParams) -> float:
    """Decay rate of the slowest mode (``gamma_m/2`` unless over-damped)."""
    w, g = params.omega_m, params.gamma_m
    disc = (0.5 * g - w) * (0.5 * g + w)
    if disc <= 0:
        return 0.5 * g
    return w * w / (0.5 * g + math.sqrt(disc))
