#include "partition_entropy/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace pentropy {

double MonteCarloCheck::z() const {
    return std::fabs(mc_mean - closed_form) / std_err;
}

double martingale_residual(const PdpParams& params, const PartitionCounts& pi) {
    const TransitionDistribution q = crp_transition(params, pi);
    const std::vector<PartitionCounts> next = successors(pi);
    double expectation = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i)
        expectation += q.probs[i] * posterior_entropy(params, next[i]).value;
    return expectation - posterior_entropy(params, pi).value;
}

double increasing_process_step(const PdpParams& params, const PartitionCounts& pi) {
    const TransitionDistribution q = crp_transition(params, pi);
    const std::vector<PartitionCounts> next = successors(pi);
    double second_moment = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
        const double h = posterior_entropy(params, next[i]).value;
        second_moment += q.probs[i] * h * h;
    }
    const double h0 = posterior_entropy(params, pi).value;
    return second_moment - h0 * h0;
}

int worker_count(int requested) {
    int n = requested > 0 ? requested
                          : static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* cap_text = std::getenv("PARTITION_ENTROPY_THREADS")) {
        const int cap = std::atoi(cap_text);
        if (cap > 0 && cap < n) n = cap;
    }
    return n;
}

void parallel_trials(std::int64_t trials, int threads,
                     const std::function<void(std::int64_t)>& fn) {
    const int workers = std::min<std::int64_t>(worker_count(threads), trials);
    if (workers <= 1) {
        for (std::int64_t i = 0; i < trials; ++i) fn(i);
        return;
    }
    const std::int64_t chunk = (trials + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        const std::int64_t begin = static_cast<std::int64_t>(w) * chunk;
        const std::int64_t end = std::min(trials, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] {
            for (std::int64_t i = begin; i < end; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

namespace {

struct SampleStats {
    double mean = 0.0;
    double median = 0.0;
    double std_err = 0.0;
};

SampleStats stats_of(std::vector<double> values) {
    SampleStats s;
    const std::size_t n = values.size();
    if (n == 0) return s;
    for (const double v : values) {
        if (std::isnan(v)) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            return {nan, nan, nan};
        }
    }
    double sum = 0.0;
    for (const double v : values) sum += v;
    s.mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std_err = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) /
                                  static_cast<double>(n))
                      : 0.0;
    std::sort(values.begin(), values.end());
    s.median = n % 2 == 1 ? values[n / 2]
                          : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    return s;
}

void check_checkpoints(const std::vector<std::int64_t>& checkpoints) {
    if (checkpoints.empty())
        throw std::invalid_argument("convergence_experiment: no checkpoints");
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] < 1 || (i > 0 && checkpoints[i] <= checkpoints[i - 1]))
            throw std::invalid_argument(
                "convergence_experiment: checkpoints must be positive and strictly "
                "increasing");
    }
}

EstimateTrace trace_path(const RankedMasses& masses, double truth, bool has_posterior,
                         const PdpParams* params,
                         const std::vector<std::int64_t>& checkpoints,
                         std::int64_t trial, RandomStream& rng, double max_tail) {
    EstimateTrace trace{trial, {}};
    trace.checkpoints.reserve(checkpoints.size());
    PartitionGrower grower(masses);
    if (masses.tail() > max_tail)
        throw std::invalid_argument("convergence_experiment: masses tail too large");
    std::int64_t grown = 0;
    for (const std::int64_t n : checkpoints) {
        grower.step_n(n - grown, rng);
        grown = n;
        TraceCheckpoint cp{};
        cp.n = n;
        cp.plugin = plugin_entropy(grower.state());
        cp.posterior = has_posterior ? posterior_entropy(*params, grower.state()).value
                                     : std::numeric_limits<double>::quiet_NaN();
        cp.truth = truth;
        cp.abs_err_plugin = std::fabs(cp.plugin - truth);
        cp.abs_err_posterior = std::fabs(cp.posterior - truth);
        cp.gap = std::fabs(cp.posterior - cp.plugin);
        trace.checkpoints.push_back(cp);
    }
    return trace;
}

ConvergenceResult summarize(std::vector<EstimateTrace> traces,
                            const std::vector<std::int64_t>& checkpoints) {
    ConvergenceResult result;
    result.summary.reserve(checkpoints.size());
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        std::vector<double> err_plugin, err_posterior, gap;
        err_plugin.reserve(traces.size());
        err_posterior.reserve(traces.size());
        gap.reserve(traces.size());
        for (const auto& t : traces) {
            err_plugin.push_back(t.checkpoints[c].abs_err_plugin);
            err_posterior.push_back(t.checkpoints[c].abs_err_posterior);
            gap.push_back(t.checkpoints[c].gap);
        }
        const SampleStats p = stats_of(std::move(err_plugin));
        const SampleStats q = stats_of(std::move(err_posterior));
        const SampleStats g = stats_of(std::move(gap));
        result.summary.push_back({checkpoints[c], p.mean, p.median, p.std_err, q.mean,
                                  q.median, q.std_err, g.mean, g.median, g.std_err});
    }
    result.traces = std::move(traces);
    return result;
}

}  // namespace

ConvergenceResult convergence_experiment(const PdpParams& params,
                                         std::vector<std::int64_t> checkpoints,
                                         std::int64_t trials, std::uint64_t seed,
                                         std::uint64_t base_stream_id, double tail_eps,
                                         int threads) {
    check_checkpoints(checkpoints);
    if (trials < 1) throw std::invalid_argument("convergence_experiment: trials >= 1");
    std::vector<EstimateTrace> traces(static_cast<std::size_t>(trials));
    std::exception_ptr failure;
    std::mutex failure_mutex;
    parallel_trials(trials, threads, [&](std::int64_t i) {
        try {
            RandomStream rng(seed, base_stream_id + static_cast<std::uint64_t>(i));
            const StickDraw draw = stick_breaking(params, tail_eps, rng);
            const RankedMasses masses = draw.ranked();
            const double truth =
                entropy_of_masses(masses) + expected_tail_entropy(params, masses, draw.count());
            traces[static_cast<std::size_t>(i)] =
                trace_path(masses, truth, true, &params, checkpoints, i, rng,
                           std::max(tail_eps, 1e-9));
        } catch (...) {
            const std::scoped_lock lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);
    return summarize(std::move(traces), checkpoints);
}

ConvergenceResult convergence_experiment(const RankedMasses& masses,
                                         std::vector<std::int64_t> checkpoints,
                                         std::int64_t trials, std::uint64_t seed,
                                         std::uint64_t base_stream_id, int threads) {
    check_checkpoints(checkpoints);
    if (trials < 1) throw std::invalid_argument("convergence_experiment: trials >= 1");
    const double truth = entropy_of_masses(masses);
    std::vector<EstimateTrace> traces(static_cast<std::size_t>(trials));
    std::exception_ptr failure;
    std::mutex failure_mutex;
    parallel_trials(trials, threads, [&](std::int64_t i) {
        try {
            RandomStream rng(seed, base_stream_id + static_cast<std::uint64_t>(i));
            traces[static_cast<std::size_t>(i)] =
                trace_path(masses, truth, false, nullptr, checkpoints, i, rng, 1e-9);
        } catch (...) {
            const std::scoped_lock lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);
    return summarize(std::move(traces), checkpoints);
}

namespace {

MonteCarloCheck mc_check(std::int64_t trials, double closed_form, int threads,
                         const std::function<double(std::int64_t)>& one_trial) {
    if (trials < 1) throw std::invalid_argument("monte carlo check: trials >= 1");
    std::vector<double> values(static_cast<std::size_t>(trials));
    std::exception_ptr failure;
    std::mutex failure_mutex;
    parallel_trials(trials, threads, [&](std::int64_t i) {
        try {
            values[static_cast<std::size_t>(i)] = one_trial(i);
        } catch (...) {
            const std::scoped_lock lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);
    const SampleStats s = stats_of(std::move(values));
    return {s.mean, s.std_err, closed_form};
}

}  // namespace

MonteCarloCheck prior_mean_check(const PdpParams& params, std::int64_t trials,
                                 std::uint64_t seed, std::uint64_t base_stream_id,
                                 double tail_eps, int threads) {
    return mc_check(trials, prior_mean_entropy(params), threads, [&](std::int64_t i) {
        RandomStream rng(seed, base_stream_id + static_cast<std::uint64_t>(i));
        const StickDraw draw = stick_breaking(params, tail_eps, rng);
        const RankedMasses masses = draw.ranked();
        return entropy_of_masses(masses) +
               expected_tail_entropy(params, masses, draw.count());
    });
}

MonteCarloCheck posterior_agreement_check(const PdpParams& params,
                                          const PartitionCounts& pi,
                                          std::int64_t trials, std::uint64_t seed,
                                          std::uint64_t base_stream_id, double tail_eps,
                                          int threads) {
    if (pi.empty())
        throw std::invalid_argument("posterior_agreement_check: need observations");
    const double closed_form = posterior_entropy(params, pi).value;
    return mc_check(trials, closed_form, threads, [&](std::int64_t i) {
        RandomStream rng(seed, base_stream_id + static_cast<std::uint64_t>(i));
        const PosteriorDraw draw = posterior_sample(params, pi, tail_eps, rng);
        return entropy_of_masses(draw.masses) +
               expected_tail_entropy(params, draw.masses, draw.sticks_drawn);
    });
}

MonteCarloCheck plugin_bias_check(const RankedMasses& masses, std::int64_t n,
                                  std::int64_t trials, std::uint64_t seed,
                                  std::uint64_t base_stream_id, int threads) {
    if (masses.tail() != 0.0)
        throw std::invalid_argument("plugin_bias_check: masses must have zero tail");
    const double truth = entropy_of_masses(masses);
    return mc_check(trials, truth, threads, [&](std::int64_t i) {
        RandomStream rng(seed, base_stream_id + static_cast<std::uint64_t>(i));
        return plugin_entropy(simulate_partition(masses, n, rng, 0.0));
    });
}

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

void write_trace_csv(std::ostream& out, const ConvergenceResult& result) {
    out << "n,trial,plugin,posterior,truth,abs_err_plugin,abs_err_posterior,gap\n";
    for (const auto& trace : result.traces) {
        for (const auto& cp : trace.checkpoints) {
            out << cp.n << ',' << trace.trial << ',' << format_double(cp.plugin) << ','
                << format_double(cp.posterior) << ',' << format_double(cp.truth) << ','
                << format_double(cp.abs_err_plugin) << ','
                << format_double(cp.abs_err_posterior) << ',' << format_double(cp.gap)
                << '\n';
        }
    }
}

std::string summary_to_json(const ConvergenceResult& result) {
    nlohmann::ordered_json j;
    for (const auto& s : result.summary) {
        nlohmann::ordered_json row;
        row["mean_err_plugin"] = s.mean_err_plugin;
        row["median_err_plugin"] = s.median_err_plugin;
        row["std_err_plugin"] = s.std_err_plugin;
        row["mean_err_posterior"] = s.mean_err_posterior;
        row["median_err_posterior"] = s.median_err_posterior;
        row["std_err_posterior"] = s.std_err_posterior;
        row["mean_gap"] = s.mean_gap;
        row["median_gap"] = s.median_gap;
        row["std_err_gap"] = s.std_err_gap;
        j[std::to_string(s.n)] = std::move(row);
    }
    return j.dump(2);
}

}  // namespace pentropy
