"""binrec: reconstruction of binary signals and shapes from partial Fourier
measurements via convex relaxation, with dual-certificate verification of
exact recovery, directional complexity diagnostics, and recovery-probability
experiments."""

__version__ = "0.1.0"

from .certificates import (
    Certificate,
    KernelWitness,
    NotCertifiable,
    certify_nonneg,
    certify_unique,
    kernel_witness,
    lowfreq_certificate,
    robustness_margin,
    trig_interpolant,
)
from .complexity import (
    ComplexityReport,
    GratingSpec,
    avg_crossings,
    check_necessary_d,
    complexity_report,
    crofton_perimeter,
    line_crossings,
    rational_angles,
    zero_free_ball_bound,
)
from .fourier import (
    FilterSpectrum,
    FrequencyMask,
    MeasurementSet,
    adjoint_measure,
    blur_signal,
    dct_measure,
    dft_forward,
    dft_inverse,
    filter_apply,
    gaussian_filter,
    make_mask,
    measure,
    parse_mask_spec,
)
from .generators import add_noise, gen_barcode, gen_disk, gen_random_intervals
from .grids import (
    BinarySignal,
    GridGeometry,
    IntervalDecomposition,
    RealSignal,
    Spectrum,
    hamming_distance,
    interval_decomposition,
    rebuild_from_intervals,
    threshold_binary,
)
from .probability import (
    RecoveryExperiment,
    binomial_cdf_half,
    binomial_cdf_normal_approx,
    hoeffding_tail,
    montecarlo_recovery,
    orthant_count_formula,
    orthant_count_oracle,
)
from .scenarios import ExperimentConfig, parse_config_file, run_scenario
from .solver import (
    SolveReport,
    SolverConfig,
    project_box,
    project_nonneg,
    reconstruct,
    reconstruct_filtered,
)

__all__ = [name for name in dir() if not name.startswith("_")]
