"""Effective non-Hermitian Hamiltonian of a single damped mechanical resonator.

In the ``(<b>, <b^dagger>)`` basis the mean-value equations of motion read
``i d/dt (b, b^dagger)^T = H (b, b^dagger)^T`` with

    H = [[ w - i g/2,    i g/2    ],
         [   i g/2,   -w - i g/2  ]]

(``w`` the mechanical angular frequency, ``g`` the energy damping rate).
``H`` is anti-PT symmetric: ``sigma_x conj(H) sigma_x = -H``.  The sign of
``(g/2)**2 - w**2`` separates the anti-PT-symmetric phase (over-damping,
purely imaginary spectrum) from the broken phase (under-damping) with an
exceptional point at ``g = 2 w`` (critical damping).
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np

#: Relative half-width of the critical-damping band, on ``gamma_m / (2 omega_m)``.
EP_BAND = 1e-9

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


@dataclass(frozen=True)
class ResonatorParams:
    """Mechanical frequency and damping rate (rad/s) plus the mass (kg)."""

    omega_m: float
    gamma_m: float
    mass: float = 1.0

    def __post_init__(self):
        for name in ("omega_m", "gamma_m", "mass"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.omega_m <= 0:
            raise ValueError(f"omega_m must be > 0, got {self.omega_m!r}")
        if self.gamma_m < 0:
            raise ValueError(f"gamma_m must be >= 0, got {self.gamma_m!r}")
        if self.mass <= 0:
            raise ValueError(f"mass must be > 0, got {self.mass!r}")

    @property
    def k(self) -> float:
        """Spring constant ``m * omega_m**2``."""
        return self.mass * self.omega_m**2

    @property
    def quality_factor(self) -> float:
        """``Q_m = omega_m / gamma_m`` (infinite for a lossless resonator)."""
        if self.gamma_m == 0:
            return math.inf
        return self.omega_m / self.gamma_m

    @classmethod
    def from_quality_factor(cls, omega_m: float, quality_factor: float, mass: float = 1.0):
        return cls(omega_m, omega_m / quality_factor, mass)


class DampingPhase(enum.Enum):
    UNDER_DAMPING = "APT_broken"
    CRITICAL_DAMPING = "EP"
    OVER_DAMPING = "APT_symmetric"

    @property
    def label(self) -> str:
        return self.value


def classify_phase(omega_m: float, gamma_m: float, band: float = EP_BAND) -> DampingPhase:
    """Damping/symmetry phase from the ratio ``gamma_m / (2 omega_m)``."""
    if omega_m == 0:
        return DampingPhase.OVER_DAMPING if gamma_m > 0 else DampingPhase.CRITICAL_DAMPING
    r = gamma_m / (2.0 * omega_m)
    if abs(r - 1.0) < band:
        return DampingPhase.CRITICAL_DAMPING
    return DampingPhase.OVER_DAMPING if r > 1.0 else DampingPhase.UNDER_DAMPING


@dataclass(frozen=True)
class EffectiveHamiltonian:
    """``H_eff / hbar`` as a 2x2 complex matrix; row/column 0 is ``<b>``."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("Hamiltonian entries must be finite")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def trace(self) -> complex:
        return complex(self.entries[0, 0] + self.entries[1, 1])

    @property
    def determinant(self) -> complex:
        return _exact_det(self.entries)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.entries)))


def build_hamiltonian(params: ResonatorParams) -> EffectiveHamiltonian:
    w, g = params.omega_m, params.gamma_m
    half = 0.5 * g
    return EffectiveHamiltonian(
        np.array([[complex(w, -half), complex(0.0, half)],
                  [complex(0.0, half), complex(-w, -half)]])
    )


def check_anti_pt(H: EffectiveHamiltonian) -> float:
    """Max-abs entry of ``sigma_x conj(H) sigma_x + H``; zero for anti-PT ``H``."""
    m = H.entries
    defect = SIGMA_X @ np.conj(m) @ SIGMA_X + m
    return float(np.max(np.abs(defect)))


@dataclass(frozen=True)
class EigenSolution:
    """Eigenvalue pair with eigenvector ratios ``beta / beta'``.

    ``defective`` is set when the two eigenvectors coalesce (matrix not
    diagonalizable); ratios are then equal.
    """

    lambda_plus: complex
    lambda_minus: complex
    ratio_plus: complex
    ratio_minus: complex
    phase: DampingPhase
    defective: bool = False

    @property
    def eigenvalues(self) -> tuple[complex, complex]:
        return self.lambda_plus, self.lambda_minus

    def vectors(self) -> tuple[np.ndarray, np.ndarray]:
        """Unit eigenvectors, normalized so ``beta'`` is real and positive."""
        return _vector_from_ratio(self.ratio_plus), _vector_from_ratio(self.ratio_minus)


def _vector_from_ratio(ratio: complex) -> np.ndarray:
    if cmath.isinf(ratio):
        return np.array([1.0, 0.0], dtype=complex)
    if cmath.isnan(ratio):
        return np.array([np.nan, np.nan], dtype=complex)
    norm = math.sqrt(abs(ratio) ** 2 + 1.0)
    return np.array([ratio / norm, 1.0 / norm], dtype=complex)


def eigenpair_from_discriminant(disc: float, omega_sq: float, gamma_m: float) -> tuple[complex, complex]:
    """Roots ``-i g/2 +/- i sqrt(disc)`` where ``disc = (g/2)**2 - omega_sq``.

    The discriminant is passed explicitly so callers can form it without
    cancellation.  ``omega_sq`` may be negative (linearization about an
    unstable equilibrium).  In the imaginary-spectrum regime the small root
    comes from the product ``lambda_plus * lambda_minus = -omega_sq``.
    """
    half = 0.5 * gamma_m
    if disc > 0:
        y = half + math.sqrt(disc)
        if y == 0:
            return 0j, 0j
        return complex(0.0, -omega_sq / y), complex(0.0, -y)
    if disc < 0:
        s = math.sqrt(-disc)
        return complex(-s, -half), complex(s, -half)
    return complex(0.0, -half), complex(0.0, -half)


def _ratios(omega: float, gamma: float) -> tuple[complex, complex]:
    """``beta/beta' = -i a +/- sqrt(1 - a**2)`` with ``a = 2 omega / gamma``."""
    if gamma == 0:
        return 0j, complex(0.0, -math.inf)
    a = 2.0 * omega / gamma
    if a < 1.0:
        root = math.sqrt((1.0 - a) * (1.0 + a))
        return complex(root, -a), complex(-root, -a)
    if a == 1.0:
        return -1j, -1j
    big = a + math.sqrt((a - 1.0) * (a + 1.0))
    # ratio_plus * ratio_minus = -1 avoids the a - sqrt(a**2 - 1) cancellation
    return complex(0.0, -1.0 / big), complex(0.0, -big)


def solve_frequency(omega: float, gamma: float) -> EigenSolution:
    """Closed-form eigenstructure for ``omega >= 0``, ``gamma >= 0``."""
    phase = classify_phase(omega, gamma)
    disc = (0.5 * gamma - omega) * (0.5 * gamma + omega)
    if phase is DampingPhase.CRITICAL_DAMPING:
        # inside the EP band: report the exact double root
        disc = 0.0
    lp, lm = eigenpair_from_discriminant(disc, omega * omega, gamma)
    rp, rm = _ratios(omega, gamma)
    return EigenSolution(lp, lm, rp, rm, phase,
                         defective=phase is DampingPhase.CRITICAL_DAMPING)


def eigen_analytic(params: ResonatorParams) -> EigenSolution:
    return solve_frequency(params.omega_m, params.gamma_m)


def _exact_det(m) -> complex:
    # a*d and b*c nearly cancel when gamma_m >> omega_m; evaluate exactly
    a, b, c, d = (complex(x) for x in (m[0][0], m[0][1], m[1][0], m[1][1]))
    F = Fraction
    re = (F(a.real) * F(d.real) - F(a.imag) * F(d.imag)
          - F(b.real) * F(c.real) + F(b.imag) * F(c.imag))
    im = (F(a.real) * F(d.imag) + F(a.imag) * F(d.real)
          - F(b.real) * F(c.imag) - F(b.imag) * F(c.real))
    return complex(float(re), float(im))


def _exact_half_gap_sq(m) -> complex:
    """``((a - d)/2)**2 + b c`` in exact arithmetic."""
    a, b, c, d = (complex(x) for x in (m[0][0], m[0][1], m[1][0], m[1][1]))
    F = Fraction
    hr = (F(a.real) - F(d.real)) / 2
    hi = (F(a.imag) - F(d.imag)) / 2
    re = hr * hr - hi * hi + F(b.real) * F(c.real) - F(b.imag) * F(c.imag)
    im = 2 * hr * hi + F(b.real) * F(c.imag) + F(b.imag) * F(c.real)
    return complex(float(re), float(im))


def _ratio_numeric(m, lam: complex) -> complex:
    a, b, c, d = m[0][0], m[0][1], m[1][0], m[1][1]
    # null vector of H - lam from whichever row is better conditioned
    if abs(c) >= abs(a - lam) and c != 0:
        return complex((lam - d) / c)
    if a - lam != 0:
        return complex(-b / (a - lam))
    if c != 0:
        return complex((lam - d) / c)
    return complex(math.inf, 0.0) if abs(lam - a) <= abs(lam - d) else 0j


class _NumericRoots(NamedTuple):
    first: complex
    second: complex
    defective: bool


def _numeric_roots(m) -> _NumericRoots:
    t = 0.5 * complex(m[0][0] + m[1][1])
    disc = _exact_half_gap_sq(m)
    # i*sqrt(-disc): same branch as the closed form; 0.0 - x clears a -0.0
    r = 1j * cmath.sqrt(complex(-disc.real, 0.0 - disc.imag))
    first, second = t + r, t - r
    # the smaller root loses digits to cancellation; take it from the product
    if abs(first) >= abs(second):
        if abs(second) < 0.5 * abs(first):
            second = _exact_det(m) / first
    elif abs(first) < 0.5 * abs(second):
        first = _exact_det(m) / second
    scale = max(abs(0.5 * complex(m[0][0] - m[1][1])) ** 2,
                abs(complex(m[0][1]) * complex(m[1][0])))
    off_diagonal = m[0][1] != 0 or m[1][0] != 0
    defective = bool(off_diagonal and abs(disc) <= 2 * EP_BAND * scale)
    return _NumericRoots(first, second, defective)


def eigen_numeric(H: EffectiveHamiltonian, reference: Optional[EigenSolution] = None) -> EigenSolution:
    """Eigenstructure from the characteristic polynomial of the entries alone.

    Independent of ``omega_m``/``gamma_m``.  With ``reference`` the pair is
    ordered by nearest match to ``reference.lambda_plus/minus``; otherwise the
    ``trace/2 + i sqrt(-disc)`` root comes first, the branch convention of
    the closed form.
    """
    m = H.entries
    roots = _numeric_roots(m)
    first, second = roots.first, roots.second
    if reference is not None:
        keep = abs(first - reference.lambda_plus) + abs(second - reference.lambda_minus)
        swap = abs(second - reference.lambda_plus) + abs(first - reference.lambda_minus)
        if swap < keep:
            first, second = second, first
    disc = _exact_half_gap_sq(m)
    half_gap = 0.5 * complex(m[0][0] - m[1][1])
    if roots.defective:
        phase = DampingPhase.CRITICAL_DAMPING
    elif half_gap == 0:
        phase = DampingPhase.OVER_DAMPING if disc.real < 0 else DampingPhase.UNDER_DAMPING
    else:
        rel = (disc / half_gap**2).real
        phase = DampingPhase.OVER_DAMPING if rel < 0 else DampingPhase.UNDER_DAMPING
    r1 = _ratio_numeric(m, first)
    r2 = r1 if roots.defective else _ratio_numeric(m, second)
    return EigenSolution(first, second, r1, r2, phase, defective=roots.defective)


class PTTest(NamedTuple):
    plus: bool
    minus: bool
    degenerate: bool


def is_pt_eigenvector(vector: np.ndarray, tol: float = 1e-9) -> bool:
    """True when ``sigma_x conj(v)`` is parallel to ``v``."""
    v = np.asarray(vector, dtype=complex)
    w = SIGMA_X @ np.conj(v)
    cross = v[0] * w[1] - v[1] * w[0]
    return bool(abs(cross) <= tol * np.vdot(v, v).real)


def pt_eigenstate_test(sol: EigenSolution, tol: float = 1e-9) -> PTTest:
    if sol.phase is DampingPhase.CRITICAL_DAMPING:
        return PTTest(True, True, True)
    vp, vm = sol.vectors()
    return PTTest(is_pt_eigenvector(vp, tol), is_pt_eigenvector(vm, tol), False)
