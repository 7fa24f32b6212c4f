"""Simulation toolkit for a GFET-based non-uniform random variate generator.

Device curves (:mod:`.device`), the cascaded transistor circuit
(:mod:`.circuit`), shared statistics (:mod:`.stats`), Coiflet-2 wavelet
reconstruction of distributions (:mod:`.wavelet`) and the Monte Carlo
integration benchmark (:mod:`.mcint`).
"""

__version__ = "0.1.0"

from .circuit import (
    PRESETS,
    CircuitChain,
    SampleBatch,
    StageConfig,
    ccdf_transform,
    fit_lognormal,
    mirror_transform,
    simulate_chain,
    stage_transform,
)
from .device import (
    Branch,
    CharacteristicLibrary,
    SyntheticGfetParams,
    TransferCurve,
    interpolate_current,
    load_characteristics,
    save_characteristics,
    synthesize_characteristic,
    synthetic_library,
)
from .errors import ConfigurationError, DomainError, ParseError, ValidationError
from .mcint import (
    HardwareBuffer,
    SoftwareLognormal,
    TargetDensity,
    UniformRange,
    draw_samples,
    integrate_mc,
    lognormal_pdf,
    run_experiment,
    tail_mass_outside,
)
from .stats import (
    DiscreteDistribution,
    Histogram,
    build_histogram,
    chi_square_uniformity,
    confidence_interval_90,
    empirical_cdf,
    kl_divergence,
    normalize,
)
from .wavelet import (
    CoefficientSet,
    WaveletFilter,
    coiflet2_filter,
    dwt,
    idwt,
    reconstruct_distribution,
    truncate_coefficients,
)
