"""Exchangeable quantum states, IC-POVM tomography, and their classical mirror.

The library provides dense operator algebra (:mod:`qdf.opalg`), density
operators and minimal informationally complete POVMs (:mod:`qdf.states_povm`),
symmetry and extension feasibility of multi-system states
(:mod:`qdf.exchange`), the mixture-of-products measurement pipeline
(:mod:`qdf.definetti`), grid-based Bayesian tomography (:mod:`qdf.bayes_tomo`),
the classical exchangeability toolkit (:mod:`qdf.classical`), and the
real-Hilbert-space counterexamples (:mod:`qdf.realhilbert`).  The ``qdf``
command-line tool in :mod:`qdf.cli` drives all of it.
"""

from .bayes_tomo import (
    MeasurementRecord,
    PriorGrid,
    convergence_experiment,
    default_qubit_grid,
    log_likelihood,
    posterior_update,
    predictive_state,
    simulate_record,
)
from .classical import (
    CountDistribution,
    JointDistribution,
    extension_feasible_classical,
    finite_representation,
    iid_joint,
    is_symmetric_dist,
    limit_convergence_demo,
    urn_conditional,
)
from .definetti import (
    MixingEnsemble,
    SequenceDistribution,
    WitnessReport,
    illegal_probability_growth,
    induced_sequence_distribution,
    mix_product_states,
    reconstruct_multisystem,
    witness_from_operator,
)
from .errors import (
    DegeneratePosteriorError,
    InvariantError,
    NotAWitnessError,
    NotInformationallyCompleteError,
    NotPositiveDefiniteError,
    NumericalError,
    PriorSupportError,
    QdfError,
    ResourceError,
    ShapeError,
)
from .exchange import (
    ExtensionReport,
    MultiSystemState,
    extension_feasible,
    ghz_state,
    is_symmetric,
    marginal,
    pure_marginal_shortcut,
    symmetrize,
)
from .opalg import (
    SubsystemShape,
    eig_hermitian,
    inv_sqrt,
    partial_trace,
    permute_subsystems,
    tensor,
    tensor_power,
    trace_distance,
)
from .realhilbert import (
    dimension_gap,
    real_basis_count,
    real_product_span_residual,
    validate_real_state,
)
from .states_povm import (
    DensityOperator,
    DualFrame,
    Ensemble,
    Povm,
    born,
    build_minimal_ic_povm,
    density_from_bloch,
    dual_frame,
    ensemble_to_density,
    reconstruct_operator,
    tetrahedron_povm,
)

__version__ = "0.1.0"
