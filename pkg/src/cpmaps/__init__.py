"""Complete positivity, GKLS semigroups and compatibility domains of non-CP maps."""
from .errors import (
    CpMapsError,
    DomainError,
    NonHermitianError,
    NotCPError,
    ShapeError,
    SizeError,
)
from .operators import (
    HermitianSpectrum,
    hermitian_eigenvalues,
    kron,
    matrix_exp,
    partial_trace,
    partial_transpose,
)
from .states import (
    bloch_to_density,
    density_to_bloch,
    flip_operator,
    isotropic_is_entangled,
    isotropic_state,
    max_symmetric_projector,
    random_density,
    separable_mixture,
)
from .maps import (
    CpVerdict,
    QuantumMap,
    apply_lifted,
    identity_map,
    is_completely_positive,
    is_trace_preserving,
    is_unital,
    kraus_from_choi,
    lift,
    pcp_family_map,
    positivity_probe,
    trace_map,
    transposition_map,
    unitary_channel,
)
from .semigroup import (
    GklsGenerator,
    QubitDynamics,
    evolve_map,
    gell_mann_basis,
    kossakowski_is_psd,
    qubit_bloch_solution,
    qubit_classification,
    qubit_pauli_generator,
)
from .compat import (
    CompatReport,
    compat_scan,
    cp_threshold,
    f_comp,
    is_compatible,
    lifted_isotropic_spectrum,
    v_comp,
)

__version__ = "0.1.0"
