"""Two Kerr-cat qubits with a tunable coupler: parameters, Hamiltonians,
ZZ-null search, Schrödinger propagation and R_ZZ gate simulation.

Energies are E/h in GHz and times in ns throughout; flux biases are given in
flux quanta (phi / 2 pi).
"""
from .errors import (
    BranchError,
    ConvergenceError,
    DesignError,
    DetuningTooSmallError,
    DimensionMismatchError,
    HermiticityError,
    KerrCatError,
    NoSignChangeError,
    SingularMatrixError,
    StepSizeError,
    TruncationWarning,
    UnreachableTargetError,
)
from .params import (
    CircuitDesign,
    RotatingFrameParams,
    SubsystemDesign,
    capacitance_matrix,
    charging_energies,
    coupling_strengths,
    invert_bias_for_detuning,
    rotating_frame_params,
    table1_design,
)
from .fock import FockSpace, coherent, lowdin_orthonormalize, product_state, truncation_deficit
from .model import HamiltonianTerms, TimeDependentHamiltonian, build_decomposed, build_hamiltonian, hamiltonian_at
from .perturb import (
    cat_amplitudes,
    find_null_bias,
    logical_basis,
    perturbed_energies,
    zeta_from_energies,
    zeta_values,
    zz_sweep,
)
from .evolve import PropagationSpec, Trajectory, propagate
from .gate import (
    FluxSchedule,
    GateReport,
    average_gate_fidelity,
    extract_theta,
    perturbative_theta,
    residual_infidelity,
    run_gate,
    rzz_target,
    synthesize_pulse,
)
from .config import RunConfig, table1_config

__version__ = "0.1.0"
