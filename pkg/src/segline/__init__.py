"""Multiple change-point detection for segmented linear regression.

Block-segmentation detectors: chi-square scans over block-OLS coefficient
jumps, adaptive-LASSO / SCAD / MCP penalized variants, and CUSUM-confirmed
versions, with split-RSS refinement and a seeded Monte Carlo harness.
"""

from .cusum import (
    CusumOutcome,
    CusumWindow,
    cusum_statistic,
    cusum_test,
    cusum_threshold,
    refine_changepoint,
)
from .design import SegmentedDesign
from .detect import (
    ALGORITHM_NAMES,
    DetectorConfig,
    detect,
    detect_almcpda,
    detect_calmcpda,
    detect_clsmcpda,
    detect_lsmcpda,
    detect_penalized,
    piecewise_rss,
    select_pn,
)
from .io import DataError, load_csv, save_csv
from .model import (
    ChangePointTruth,
    Dataset,
    DetectionResult,
    Segmentation,
    SegmentationError,
    make_segmentation,
    true_boundary_index,
)
from .ols import (
    DeltaEstimates,
    SegmentFit,
    chi2_quantile,
    delta_test_pair,
    delta_test_single,
    estimate_deltas,
    noise_variance,
    segment_ols,
)
from .penalties import (
    mcp_derivative,
    mcp_penalty,
    scad_derivative,
    scad_penalty,
    scad_threshold_scalar,
)
from .report import ReplicationReport, run_replications
from .simulate import (
    Scenario,
    build_scenario,
    scenario_cpl1,
    scenario_cpl2,
    scenario_none,
    simulate_dataset,
)
from .solver import (
    PenaltySpec,
    SolveReport,
    SolverError,
    default_lambda_grid,
    select_lambda_bic,
    solve_group_penalized,
    solve_weighted_l1,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ALGORITHM_NAMES",
    "ChangePointTruth",
    "CusumOutcome",
    "CusumWindow",
    "DataError",
    "Dataset",
    "DeltaEstimates",
    "DetectionResult",
    "DetectorConfig",
    "PenaltySpec",
    "ReplicationReport",
    "Scenario",
    "SegmentFit",
    "Segmentation",
    "SegmentationError",
    "SegmentedDesign",
    "SolveReport",
    "SolverError",
    "build_scenario",
    "chi2_quantile",
    "cusum_statistic",
    "cusum_test",
    "cusum_threshold",
    "default_lambda_grid",
    "delta_test_pair",
    "delta_test_single",
    "detect",
    "detect_almcpda",
    "detect_calmcpda",
    "detect_clsmcpda",
    "detect_lsmcpda",
    "detect_penalized",
    "estimate_deltas",
    "load_csv",
    "make_segmentation",
    "mcp_derivative",
    "mcp_penalty",
    "noise_variance",
    "piecewise_rss",
    "refine_changepoint",
    "run_replications",
    "save_csv",
    "scad_derivative",
    "scad_penalty",
    "scad_threshold_scalar",
    "scenario_cpl1",
    "scenario_cpl2",
    "scenario_none",
    "segment_ols",
    "select_lambda_bic",
    "select_pn",
    "simulate_dataset",
    "solve_group_penalized",
    "solve_weighted_l1",
    "true_boundary_index",
]
