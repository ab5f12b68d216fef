"""Uniform point sets on partitioned probability spaces, with certified
worst-case integration error bounds and exhaustive finite-space
verification."""

from .bounds import (
    ApproximantCoefficients,
    BoundSet,
    CellExtrema,
    bound_set,
    cell_extrema,
    distance_to_span,
    optimal_approximant,
    s_value,
    sup_norm_distance,
)
from .errors import (
    BoundViolationError,
    CoverError,
    EmptyCellError,
    EnumerationTooLargeError,
    InstanceFormatError,
    NonIntegerAllocationError,
    NonPositiveWeightError,
    NotUniformError,
    OutOfDomainError,
    OverlapError,
    QmcBoundsError,
    WeightSumError,
)
from .estimator import BoundReport, bound_report, integration_error, qmc_estimate
from .funcmodel import (
    Affine,
    EssentialRange,
    FiniteTable,
    FunctionModel,
    GridRangeMode,
    Monotone,
    PiecewiseConstant,
    Quadratic,
    Sinusoid,
)
from .instances import (
    Instance,
    instance_from_json,
    instance_to_json,
    load_instances,
    save_instances,
)
from .oracle import (
    MinimaxCertificate,
    RandomInstanceLimits,
    VerificationVerdict,
    minimax_distance_finite,
    random_instance,
    small_exhaustive_suite,
    verify_bounds_exhaustive,
    verify_instance,
    worst_case_error,
)
from .pointsets import (
    ConfigurationStream,
    UniformityReport,
    UniformPointSet,
    allocation,
    construct_uniform,
    enumerate_uniform,
    is_uniform,
    load_pointset,
    save_pointset,
)
from .spaces import (
    BoxCell,
    CubeSpace,
    FiniteCell,
    FiniteSpace,
    Partition,
    box,
    dyadic_refine,
    equal_partition_1d,
    interval,
    make_cube_space,
    make_finite_space,
    make_partition,
    partition_hash,
    refine_partition,
    single_cell_partition,
)

__version__ = "0.1.0"
