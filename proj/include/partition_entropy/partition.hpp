#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "partition_entropy/random.hpp"

namespace pentropy {

// Class sizes of a sampled partition, listed in order of first appearance.
// Every entry is >= 1; the empty state (no observations yet) is legal.
class PartitionCounts {
public:
    PartitionCounts() = default;
    explicit PartitionCounts(std::vector<std::int64_t> counts);

    std::int64_t total() const { return total_; }                 // n
    std::int64_t num_classes() const {                            // k
        return static_cast<std::int64_t>(counts_.size());
    }
    bool empty() const { return counts_.empty(); }
    std::span<const std::int64_t> counts() const { return counts_; }
    std::int64_t count(std::size_t j) const { return counts_[j]; }

    // One more observation lands in existing class j / opens a new class.
    void increment_class(std::size_t j);
    void append_singleton();

    bool operator==(const PartitionCounts&) const = default;

    std::string to_json() const;                     // [c1, c2, ...]
    static PartitionCounts from_json(const std::string& text);

private:
    std::vector<std::int64_t> counts_;
    std::int64_t total_ = 0;
};

// Decreasing nonnegative weights plus the mass left unaccounted by
// truncation; weights + tail must sum to 1 within 1e-12.
class RankedMasses {
public:
    RankedMasses(std::vector<double> weights, double tail);

    const std::vector<double>& weights() const { return weights_; }
    double tail() const { return tail_; }

    std::string to_json() const;                     // {"weights": [...], "tail": t}
    static RankedMasses from_json(const std::string& text);

private:
    std::vector<double> weights_;
    double tail_ = 0.0;
};

// Law of the next state: probs[j] for j < k grows class j+1, probs[k] opens
// a new class. Entries are nonnegative and sum to 1 within 1e-12.
struct TransitionDistribution {
    std::vector<double> probs;
};

// The k+1 reachable states: each class grown by one, then the new singleton.
// The empty state has the single successor (1).
std::vector<PartitionCounts> successors(const PartitionCounts& pi);

// -sum_i (c_i/n) ln(c_i/n). Natural log throughout. Throws on the empty state.
double plugin_entropy(const PartitionCounts& pi);

// sum_i f(c_i/n) for any f finite on (0,1]; f(x) = -x ln x recovers
// plugin_entropy. Throws on the empty state.
double plugin_additive(const PartitionCounts& pi,
                       const std::function<double(double)>& f);

// -sum_i w_i ln w_i over the explicit weights (zero weights contribute zero);
// the tail is excluded here, see pdp expected_tail_entropy for the correction.
double entropy_of_masses(const RankedMasses& masses);

// Deterministic interval lookup: index of the consecutive subinterval of
// lengths weights[i] containing u, or nullopt when u lands in the tail.
std::optional<std::size_t> sample_class(const RankedMasses& masses, double u);

// Precomputed cumulative table for repeated lookups over the same masses;
// agrees with sample_class point for point.
class ClassSampler {
public:
    explicit ClassSampler(const RankedMasses& masses);
    std::optional<std::size_t> operator()(double u) const;

private:
    std::vector<double> cumulative_;
};

// Grows one sample path observation by observation, relabeling classes in
// order of first appearance. Tail hits are collected into one pseudo-class.
class PartitionGrower {
public:
    explicit PartitionGrower(const RankedMasses& masses);
    void step(double u);
    void step_n(std::int64_t n, RandomStream& rng);
    const PartitionCounts& state() const { return state_; }

private:
    ClassSampler sampler_;
    std::vector<std::int64_t> label_of_interval_;  // interval index -> class label
    std::int64_t tail_label_ = -1;
    PartitionCounts state_;
};

// Draws n i.i.d. uniforms, maps each through its interval, and relabels in
// order of first appearance. The tail mass must not exceed max_tail; hits on
// it become one extra pseudo-class.
PartitionCounts simulate_partition(const RankedMasses& masses, std::int64_t n,
                                   RandomStream& rng, double max_tail = 1e-9);

// Same construction from a caller-supplied uniform sequence.
PartitionCounts simulate_partition(const RankedMasses& masses,
                                   std::span<const double> uniforms,
                                   double max_tail = 1e-9);

}  // namespace pentropy
