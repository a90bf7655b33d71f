"""Photon-number correlators of Gaussian states in Haar-random linear optics."""

from ._version import __version__
from .bench import (
    DilutionReport,
    DiscriminationReport,
    ExperimentConfig,
    HeatmapResult,
    SignatureExperiment,
    TruncationReport,
    repeated_discrimination,
    run_all_pairs,
    run_correlator_sweep,
    run_dilution_study,
    run_discrimination,
    run_heatmap,
    run_signature_experiment,
    run_truncation_study,
)
from .channels import (
    LossParameter,
    NoiseParameter,
    apply_loss,
    apply_noise,
    lossy_correlator_scale,
    squeezing_threshold,
    transform_moments,
)
from .correlator import (
    CorrelatorInputs,
    CorrelatorSampleSet,
    SignatureSummary,
    analytic_moments,
    analytic_signatures,
    correlator_general,
    correlator_identical_inputs,
    correlator_no_displacement,
    estimate_signatures,
    pair_correlators,
)
from .errors import GBSCorrError, NumericalDomainError, ParameterError, UnsupportedFeatureError
from .fock import (
    ConvergenceProfile,
    JointPhotonDistribution,
    convergence_profile,
    correlator_from_distribution,
    gaussian_fourth_moment,
    joint_photon_distribution,
    variance_from_distribution,
    wick_correlator,
)
from .gaussian import (
    GaussianState,
    InputSpec,
    eccentricity,
    ladder_covariances,
    make_classical_asymmetric,
    make_coherent,
    make_squeezed_vacuum,
    make_thermal,
    mean_photon,
    purity,
)
from .interferometer import (
    ReducedTwoModeState,
    RngStream,
    SymplecticOrthogonal,
    UnitaryMatrix,
    embed_symplectic,
    evolve,
    reduce_two_modes,
    sample_haar_unitaries,
    sample_haar_unitary,
)
