#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "partition_entropy/partition.hpp"
#include "partition_entropy/pdp.hpp"
#include "partition_entropy/random.hpp"

namespace pentropy {

struct TraceCheckpoint {
    std::int64_t n;
    double plugin;
    double posterior;  // NaN when no closed form exists (user-supplied masses)
    double truth;
    double abs_err_plugin;
    double abs_err_posterior;
    double gap;  // |posterior - plugin|
};

// One growing sample path, recorded at increasing checkpoints.
struct EstimateTrace {
    std::int64_t trial;
    std::vector<TraceCheckpoint> checkpoints;
};

struct CheckpointSummary {
    std::int64_t n;
    double mean_err_plugin, median_err_plugin, std_err_plugin;
    double mean_err_posterior, median_err_posterior, std_err_posterior;
    double mean_gap, median_gap, std_err_gap;
};

struct ConvergenceResult {
    std::vector<EstimateTrace> traces;
    std::vector<CheckpointSummary> summary;
};

struct MonteCarloCheck {
    double mc_mean;
    double std_err;
    double closed_form;

    double z() const;  // |mc_mean - closed_form| / std_err
};

// Exact one-step martingale defect: enumerates the k+1 successors and returns
//   sum_succ H(succ) Q(pi; succ) - H(pi)
// for the closed-form posterior entropy. No sampling; zero up to float error.
double martingale_residual(const PdpParams& params, const PartitionCounts& pi);

// Exact one-step increment of the compensator of the squared martingale:
//   sum_succ H(succ)^2 Q(pi; succ) - H(pi)^2,
// the conditional variance of the next posterior entropy, hence >= 0.
double increasing_process_step(const PdpParams& params, const PartitionCounts& pi);

// Per trial: draw masses by stick-breaking, record the tail-corrected true
// entropy, then grow one sample path (never resampled) and log the plug-in
// and posterior estimates at each checkpoint. Trial i runs on stream
// (seed, base_stream_id + i); results are folded in trial order, so the
// output is byte-stable under any worker count.
ConvergenceResult convergence_experiment(const PdpParams& params,
                                         std::vector<std::int64_t> checkpoints,
                                         std::int64_t trials, std::uint64_t seed,
                                         std::uint64_t base_stream_id = 0,
                                         double tail_eps = 1e-9, int threads = 0);

// Same harness for fixed user-supplied masses: only the plug-in estimator is
// checked (posterior columns are NaN) and the truth is exact.
ConvergenceResult convergence_experiment(const RankedMasses& masses,
                                         std::vector<std::int64_t> checkpoints,
                                         std::int64_t trials, std::uint64_t seed,
                                         std::uint64_t base_stream_id = 0,
                                         int threads = 0);

// Monte Carlo mean entropy of stick-breaking draws (tail-corrected) against
// the closed form psi(theta+1) - psi(1-alpha).
MonteCarloCheck prior_mean_check(const PdpParams& params, std::int64_t trials,
                                 std::uint64_t seed, std::uint64_t base_stream_id = 0,
                                 double tail_eps = 1e-12, int threads = 0);

// Monte Carlo mean entropy of posterior draws (tail-corrected) against the
// closed-form posterior entropy.
MonteCarloCheck posterior_agreement_check(const PdpParams& params,
                                          const PartitionCounts& pi,
                                          std::int64_t trials, std::uint64_t seed,
                                          std::uint64_t base_stream_id = 0,
                                          double tail_eps = 1e-12, int threads = 0);

// Monte Carlo mean of the plug-in entropy over independent n-samples from
// fixed masses (tail must be zero); closed_form carries the true entropy.
MonteCarloCheck plugin_bias_check(const RankedMasses& masses, std::int64_t n,
                                  std::int64_t trials, std::uint64_t seed,
                                  std::uint64_t base_stream_id = 0, int threads = 0);

// CSV with header n,trial,plugin,posterior,truth,abs_err_plugin,
// abs_err_posterior,gap; one row per (trial, checkpoint), trial-major.
void write_trace_csv(std::ostream& out, const ConvergenceResult& result);

// JSON object keyed by checkpoint size with the per-checkpoint statistics.
std::string summary_to_json(const ConvergenceResult& result);

// Shortest text that round-trips the double (printf %.17g).
std::string format_double(double value);

// Resolves a worker count: requested <= 0 means machine parallelism; the
// PARTITION_ENTROPY_THREADS environment variable caps the result.
int worker_count(int requested);

// Runs fn(0..trials-1) across workers; fn must touch only its own slot.
void parallel_trials(std::int64_t trials, int threads,
                     const std::function<void(std::int64_t)>& fn);

}  // namespace pentropy
