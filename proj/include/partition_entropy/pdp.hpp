#pragma once

#include <cstdint>
#include <vector>

#include "partition_entropy/partition.hpp"
#include "partition_entropy/random.hpp"

namespace pentropy {

// Two-parameter Poisson-Dirichlet family: discount alpha in [0,1) and
// concentration theta > -alpha (strict).
struct PdpParams {
    double alpha;
    double theta;

    PdpParams(double alpha_, double theta_);
};

// The closed-form posterior entropy split into its pieces:
//   value = digamma(theta+n+1) - (a_term + b_term) / (theta+n)
// with a_term = (theta + alpha k) psi(1-alpha) and
//      b_term = sum_i (c_i - alpha) psi(c_i - alpha + 1).
struct PosteriorEntropyParts {
    double a_term;
    double b_term;
    double value;
};

// Seating rule for the next observation:
//   existing class j with probability (c_j - alpha) / (theta + n),
//   a new class with probability (theta + alpha k) / (theta + n).
// The empty state deterministically opens the first class.
TransitionDistribution crp_transition(const PdpParams& params,
                                      const PartitionCounts& pi);

// n sequential draws of the seating rule starting from the empty state.
PartitionCounts crp_sample(const PdpParams& params, std::int64_t n,
                           RandomStream& rng);

// Stick-breaking weights in the order they were generated (size-biased
// order), before ranking. tail is the mass of all sticks never drawn.
struct StickDraw {
    std::vector<double> size_biased;
    double tail = 1.0;

    std::int64_t count() const { return static_cast<std::int64_t>(size_biased.size()); }
    RankedMasses ranked() const;
};

inline constexpr std::int64_t kMaxSticks = 1'000'000;

// Draws beta_j ~ Beta(1-alpha, theta + alpha j) and weights
// w_j = beta_j prod_{i<j} (1-beta_i) until the leftover product drops below
// tail_eps. Throws if kMaxSticks sticks are exhausted first; for alpha > 0
// the stick count grows like tail_eps^(-alpha/(1-alpha)), so pick tail_eps
// accordingly and correct with expected_tail_entropy.
StickDraw stick_breaking(const PdpParams& params, double tail_eps,
                         RandomStream& rng);

// Marsaglia & Tsang (2000) rejection sampler; shape < 1 is boosted through
// shape+1 and scaled by U^(1/shape).
double gamma_draw(double shape, RandomStream& rng);

// Ratio of two gamma draws.
double beta_draw(double a, double b, RandomStream& rng);

// Normalized independent gamma draws.
std::vector<double> dirichlet_draw(const std::vector<double>& shapes,
                                   RandomStream& rng);

// E(H) = psi(theta+1) - psi(1-alpha).
double prior_mean_entropy(const PdpParams& params);

// Closed-form posterior mean entropy given the observed counts; the empty
// state returns the prior mean (requires theta > 0 there).
PosteriorEntropyParts posterior_entropy(const PdpParams& params,
                                        const PartitionCounts& pi);

struct PosteriorDraw {
    RankedMasses masses;
    // Explicit atoms generated: k observed classes plus the sticks of the
    // continuation; feeds expected_tail_entropy.
    std::int64_t sticks_drawn;
};

// One draw from the posterior law of the masses given pi:
//   (p_1..p_k, r) ~ Dirichlet(c_1-alpha, ..., c_k-alpha, theta+alpha k),
//   continuation ~ stick_breaking(alpha, theta+alpha k),
// combined as (p_1..p_k, r * continuation) and ranked.
PosteriorDraw posterior_sample(const PdpParams& params, const PartitionCounts& pi,
                               double tail_eps, RandomStream& rng);

// Expected entropy contribution of the never-generated sticks behind tail:
//   tail * (psi(theta + alpha K + 1) - psi(1-alpha)) - tail * ln(tail),
// exact because the residual after K sticks is tail times a fresh
// PDP(alpha, theta + alpha K).
double expected_tail_entropy(const PdpParams& params, const RankedMasses& masses,
                             std::int64_t sticks_drawn);

}  // namespace pentropy
