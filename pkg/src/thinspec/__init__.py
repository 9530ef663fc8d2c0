"""thinspec: numerical laboratory for thin spectra of 1D Schrodinger operators."""

from .intervals import (
    Interval,
    IntervalUnion,
    normalize,
    measure,
    gaps,
    hausdorff_distance,
    directed_hausdorff,
)
from .mat2 import Mat2, mat2_mul, mat2_det, mat2_trace
from .floquet import (
    PeriodicPotential,
    MonodromyResult,
    OdeOptions,
    ScanOptions,
    BandStructure,
    propagator_constant,
    monodromy,
    band_structure,
    compute_bands,
    band_gap_report,
)
from .lattice import (
    LatticePotential,
    DiscriminantPoly,
    transfer,
    discrete_discriminant,
    discriminant_poly,
    discrete_bands,
)
from .quasiperiodic import (
    AMOParams,
    FibonacciParams,
    ContinuumFibonacciParams,
    ApproximantReport,
    PhaseOptions,
    convergents,
    amo_sequence,
    fibonacci_word,
    fibonacci_lattice,
    approximant_spectra,
    butterfly,
    continuum_fibonacci_potential,
    halfline_probe,
)
from .fractal import (
    DimensionEstimate,
    box_count,
    box_dimension,
    minkowski_sum,
    d_fold_sum,
    check_dim_subadditivity,
)
from .capacity import (
    EquilibriumSolve,
    capacity_interval,
    capacity_numeric,
    capacity_discrete_spectrum,
)

__version__ = "0.1.0"
