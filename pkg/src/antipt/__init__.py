"""Anti-PT symmetry of a damped mechanical resonator and optomechanical EP sensing."""
from .resonator import (
    DampingPhase,
    EffectiveHamiltonian,
    EigenSolution,
    ResonatorParams,
    build_hamiltonian,
    check_anti_pt,
    classify_phase,
    eigen_analytic,
    eigen_numeric,
    pt_eigenstate_test,
)
from .optomech import (
    OptomechParams,
    critical_drive,
    effective_potential,
    effective_spring_constant,
    eigenvalues_vs_drive,
    locate_EPs,
    steady_states,
)
from .dynamics import IntegratorConfig, Trajectory, simulate_optomech, simulate_resonator
from .sensing import (
    finite_difference_sensitivity,
    mass_splitting,
    minimum_resolvable_mass,
    sensitivity_analytic,
    splitting_exact,
    splitting_near_EP,
)

__version__ = "0.1.0"
