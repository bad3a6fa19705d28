"""Entanglement witnesses from displaced photon-number correlations.

Thin re-export of the compiled core. Witnesses and states also convert to and
from the same JSON dictionaries the command-line tool reads.
"""

from ._core import (
    BaselineResult,
    CoherentSuperposition,
    EvaluationReport,
    FockDensity,
    GaResult,
    MeasurementEstimate,
    NoisyFourModeCat,
    PartitionSpec,
    PhotonSubtractedTmsv,
    SevSolution,
    Tmsv,
    WitnessForgeError,
    WitnessSpec,
    apply_loss,
    auto_cutoff,
    bell_like_state,
    collapse_single_mode,
    compensate_for_loss,
    displaced_number_matrix,
    duan_criterion,
    evaluate,
    expectation_L,
    four_mode_cat,
    ga_optimize,
    is_collinear_m3,
    mode_count,
    presets,
    reproduce,
    reproduce_cases,
    set_thread_count,
    sev_objective,
    simon_criterion,
    simulate,
    solve_sev,
    solve_sev_collinear_m3,
    state_covariance,
    state_from_dict,
    state_to_dict,
    state_to_fock,
    thread_count,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
