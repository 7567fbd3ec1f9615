"""Boson transport and entanglement generation on 1D Bose-Hubbard chains."""

from .fock import (
    InfeasibleSectorError,
    OccupationBasis,
    config_rank,
    enumerate_basis,
    sector_dimension,
)
from .operators import BHParams, SparseOperator, build_hamiltonian, create_particle, number_operator
from .solve import (
    ClassicalDistribution,
    ConvergenceError,
    StateVector,
    StepUnderflowError,
    ctrw_distribution,
    evolve,
    ground_state,
)
from .ctqw import WalkAmplitudes, free_two_particle_state, single_particle_propagator, spread, walk_amplitudes
from .entanglement import (
    TwoSiteRDM,
    first_maximum,
    ln_single_particle,
    log_negativity,
    partial_transpose,
    reduce_two_sites,
    sf_gamma,
    sf_rdm,
    single_particle_rdm,
)
from .sdq import ProjectionFailedError, SDQDefinition, SDQState, sdq_entanglement, sdq_project

__version__ = "0.1.0"
