"""Quantum phase fluctuations of intermediate photon states in the Barnett-Pegg formalism."""

from .closed_forms import (
    CrossCheckReport,
    Verdict,
    cross_check,
    du_binomial_closed,
    du_gbs_closed,
    du_hs_closed,
    du_nbs_closed,
    pacs_moments_closed,
)
from .errors import (
    ClosedFormUndefined,
    ConfigError,
    DimensionError,
    DomainError,
    InvalidAmplitude,
    NormalizationError,
    ParamError,
    PhaseUndefined,
    QPhaseError,
    TruncationError,
    UnknownFigure,
)
from .fock import (
    FockState,
    MomentSet,
    amplitude_moment,
    fock_number_state,
    make_state,
    mean_photon,
    moments,
    normally_ordered_moment,
    photon_variance,
)
from .metrics import (
    PhaseReport,
    WitnessSet,
    antibunching_witness,
    bp_phase_report,
    d_u,
    hoa_witness,
    total_amplitude_noise,
    u_parameter,
    witnesses,
)
from .states import (
    Family,
    StateSpec,
    TruncationReport,
    binomial_state,
    coherent_state,
    generalized_binomial_state,
    hypergeometric_state,
    negative_binomial_state,
    photon_added_coherent_state,
)
from .sweep import SweepConfig, SweepRow, figure_config, run_sweep

__version__ = "0.1.0"
