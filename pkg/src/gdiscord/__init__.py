"""Quantum and Gaussian discord of two-mode Gaussian states.

The package computes discord through two independent routes (a closed form
for states decomposable into an EPR state plus a local Gaussian channel, and
a numerical scan over rank-one Gaussian measurements), decomposes states
into EPR-plus-channel form, simulates Gaussian measurement conditioning
(remote state preparation), and samples the decomposition family over the
correlation plane.
"""

from .channels import (
    CanonicalForm,
    ChannelClass,
    GaussianChannelParams,
    apply_single_mode,
    apply_to_mode_A,
    apply_to_mode_B,
    classify,
    min_output_entropy,
    pathological_form_matrices,
)
from .discord import (
    DiscordReport,
    MinimizeResult,
    conditional_entropy_measured,
    gaussian_discord_closed_form,
    gaussian_discord_numeric,
    matched_measurement,
    minimize_conditional_entropy,
)
from .entropy import (
    entropy_single_mode,
    entropy_two_mode,
    h,
    mutual_information,
    thermal_entropy_fock,
)
from .errors import (
    DomainError,
    GDiscordError,
    InvalidChannelParams,
    NotSqueezedThermalForm,
    NumericalFailure,
    OutOfFamily,
    ValidationError,
)
from .family import (
    FamilyParams,
    FamilySample,
    SamplePoint,
    decompose_squeezed_thermal,
    eta_from_a,
    family_cm_from_params,
    membership,
    occupancy_grid,
    sample_family,
    squeezed_thermal_bound,
    tau_bounds,
)
from .remote_prep import (
    ConditionalState,
    GaussianMeasurement,
    OutcomeDistribution,
    complex_to_outcome,
    condition_on_outcome,
    conditional_cm,
    conditional_mean_map,
    conditioning_on_mode_A,
    epr_squeezing_range,
    gaussian_overlap,
    outcome_distribution,
    outcome_to_complex,
)
from .symplectic import (
    BonaFideDiagnosis,
    EPRState,
    NormalFormCM,
    SymplecticSpectrum,
    assemble_cm,
    block_a,
    block_b,
    block_c,
    embed_normal_form,
    epr_cm,
    is_bona_fide,
    normal_form_from_cm,
    rotation_matrix,
    squeezer_matrix,
    symplectic_spectrum,
    symplectic_spectrum_eigen,
    validate_bona_fide,
)

__version__ = "1.0.0"
