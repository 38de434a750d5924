"""Asymptotic spectra of d-fold random Vandermonde matrices and LMMSE
field-reconstruction error under lossy wireless sensor sampling."""

__version__ = "0.1.0"

from .moments import (  # noqa: F401
    DensityPowerIntegrals,
    MomentTable,
    asymptotic_moment,
    density_power_integrals,
    moment_table,
    uniform_moment,
)
from .partitions import (  # noqa: F401
    PartitionCoefficient,
    SetPartition,
    enumerate_partitions,
    is_noncrossing,
    lattice_count,
    vandermonde_coefficient,
)
from .reconstruct import (  # noqa: F401
    FieldSpectrum,
    LmmseResult,
    Observation,
    generate_spectrum,
    lmmse,
    mse_monte_carlo,
    observe,
    synthesize_field,
)
from .sampling import (  # noqa: F401
    GxClosedForm,
    GxDiscreteAtoms,
    GxEmpirical,
    SamplingDistribution,
    uniform_distribution,
)
from .scenarios import (  # noqa: F401
    ClusterHierarchy,
    FadingScenario,
    HoleScenario,
    csma_success_profile,
    default_collision_model,
    dense_limit,
    fading_distribution,
    fading_gx,
    fading_mse,
    hole_distribution,
    hole_mse,
    quadrant_hierarchy,
)
from .spectral import (  # noqa: F401
    DFoldVandermonde,
    EtaUTable,
    SpectrumSummary,
    aesd,
    asymptotic_mse,
    build_eta_table,
    build_vandermonde,
    compare_scaled_aesd,
    empirical_eta,
    empirical_moment,
    eta_mixture,
    eta_u_table,
    gram_eigenvalues,
    transform_scaled_lsd,
)
