"""Modular CMA-ES with online configuration switching.

The heavy lifting lives in the compiled extension; this package re-exports
its surface: configuration encoding, benchmark functions, static and
adaptive runs, fixed-target metrics and the selection methods.
"""

from ._core import (  # noqa: F401
    AdaptiveTriple,
    BenchmarkFunction,
    ModuleConfiguration,
    PerformanceTable,
    RunRecord,
    SelectionEntry,
    SelectionResult,
    aht,
    append_records,
    available_fids,
    common_variants,
    decode,
    derive_seed,
    derive_static_weights,
    encode,
    enumerate_space,
    ert,
    improvement_fraction,
    load_dataset,
    make_function,
    module_difference,
    normal_quantile,
    relative_improvement,
    run_adaptive,
    run_static,
    select_original,
    select_windowed,
    sliding_window_value,
    target_grid,
    theoretical_ht,
    two_stage_final,
    worst_case_value,
    __version__,
)
