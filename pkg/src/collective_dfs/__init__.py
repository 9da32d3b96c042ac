"""Decoherence-free and completely decoherence-free subspaces of qubits under collective decay."""

from .dynamics import (
    CouplingModel,
    StepTooLargeError,
    Trajectory,
    collective_dissipator,
    dissipator,
    evolve,
    fidelity,
    liouvillian_matrix,
    lindblad_rhs,
    random_coupling,
    steady_states,
    system_hamiltonian,
    tau2,
)
from .encodings import (
    LogicalEncoding,
    NamedBasis,
    OmegaPair,
    four_qubit_basis,
    omega_encoding,
    three_qubit_basis,
    uv_states,
)
from .metrics import d_df, d_df_asymptotic, p_df, p_df_asymptotic, p_df_jtot, product_optimum
from .qubit_space import StateVector, WeightSector, collective_op, ket, single_qubit_op, weight_sector
from .structure import (
    CdfsResult,
    IrrepTower,
    SubspaceBasis,
    cdfs,
    df_dimension,
    df_subspace,
    irrep_decompose,
    verify_cdf_state,
)

__version__ = "0.1.0"
