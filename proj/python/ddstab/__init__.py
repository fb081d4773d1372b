"""Data-driven stabilization with stabilizability prior knowledge."""

from ._core import (
    Branch,
    DataMatrices,
    FeedbackGain,
    InformativityReport,
    LmiSolution,
    LmiStatus,
    LtiSystem,
    MonteCarloConfig,
    MonteCarloResult,
    NumericalConfig,
    RowCompression,
    StabSynthesis,
    TrajectoryData,
    VerificationOptions,
    VerificationReport,
    build_data_matrices,
    check_identification,
    check_sigma_stab,
    consistent_set,
    load_trajectory,
    reference,
    report_to_json,
    row_compress,
    run_monte_carlo,
    simulate,
    solve_plain_lmi,
    spectral_radius,
    synthesize_stab,
    verify_gain,
)

__all__ = [name for name in dir() if not name.startswith("_")]
