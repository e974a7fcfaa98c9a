"""Exchangeable-partition sampling, plug-in and posterior entropy estimators,
and a verification harness for the two-parameter Poisson-Dirichlet family."""

from ._core import (
    CheckpointSummary,
    ConvergenceResult,
    EstimateTrace,
    MonteCarloCheck,
    PartitionCounts,
    PdpParams,
    PosteriorDraw,
    PosteriorEntropyParts,
    RandomStream,
    RankedMasses,
    StickDraw,
    TraceCheckpoint,
    beta_draw,
    convergence_experiment,
    convergence_experiment_masses,
    crp_sample,
    crp_transition,
    digamma,
    dirichlet_draw,
    entropy_of_masses,
    expected_tail_entropy,
    gamma_draw,
    increasing_process_step,
    log_gamma,
    martingale_residual,
    plugin_additive,
    plugin_bias_check,
    plugin_entropy,
    posterior_agreement_check,
    posterior_entropy,
    posterior_sample,
    prior_mean_check,
    prior_mean_entropy,
    sample_class,
    simulate_partition,
    stick_breaking,
    successors,
    summary_json,
    trace_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
