#include "partition_entropy/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace pentropy {

namespace {

constexpr double kMassTolerance = 1e-12;

[[noreturn]] void empty_state_error(const char* fn) {
    throw std::invalid_argument(std::string(fn) + ": empty partition state");
}

std::string short_double(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%g", v);
    return buffer;
}

}  // namespace

PartitionCounts::PartitionCounts(std::vector<std::int64_t> counts)
    : counts_(std::move(counts)) {
    for (const auto c : counts_) {
        if (c < 1) throw std::invalid_argument("PartitionCounts: every class size must be >= 1");
        total_ += c;
    }
}

void PartitionCounts::increment_class(std::size_t j) {
    if (j >= counts_.size()) throw std::out_of_range("PartitionCounts::increment_class");
    ++counts_[j];
    ++total_;
}

void PartitionCounts::append_singleton() {
    counts_.push_back(1);
    ++total_;
}

std::string PartitionCounts::to_json() const {
    return nlohmann::json(counts_).dump();
}

PartitionCounts PartitionCounts::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_array()) throw std::invalid_argument("PartitionCounts: expected a JSON array");
    return PartitionCounts(j.get<std::vector<std::int64_t>>());
}

RankedMasses::RankedMasses(std::vector<double> weights, double tail)
    : weights_(std::move(weights)), tail_(tail) {
    if (!(tail_ >= 0.0)) throw std::invalid_argument("RankedMasses: tail must be >= 0");
    long double sum = tail_;
    double prev = std::numeric_limits<double>::infinity();
    for (const double w : weights_) {
        if (!(w >= 0.0)) throw std::invalid_argument("RankedMasses: weights must be >= 0");
        if (w > prev) throw std::invalid_argument("RankedMasses: weights must be decreasing");
        prev = w;
        sum += w;
    }
    if (std::fabs(static_cast<double>(sum) - 1.0) > kMassTolerance)
        throw std::invalid_argument("RankedMasses: weights plus tail must sum to 1");
}

std::string RankedMasses::to_json() const {
    nlohmann::ordered_json j;
    j["weights"] = weights_;
    j["tail"] = tail_;
    return j.dump();
}

RankedMasses RankedMasses::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    return RankedMasses(j.at("weights").get<std::vector<double>>(),
                        j.value("tail", 0.0));
}

std::vector<PartitionCounts> successors(const PartitionCounts& pi) {
    std::vector<PartitionCounts> out;
    out.reserve(static_cast<std::size_t>(pi.num_classes()) + 1);
    for (std::size_t j = 0; j < static_cast<std::size_t>(pi.num_classes()); ++j) {
        PartitionCounts grown = pi;
        grown.increment_class(j);
        out.push_back(std::move(grown));
    }
    PartitionCounts opened = pi;
    opened.append_singleton();
    out.push_back(std::move(opened));
    return out;
}

double plugin_entropy(const PartitionCounts& pi) {
    if (pi.empty()) empty_state_error("plugin_entropy");
    const double n = static_cast<double>(pi.total());
    double h = 0.0;
    for (const auto c : pi.counts()) {
        const double p = static_cast<double>(c) / n;
        h -= p * std::log(p);
    }
    return h;
}

double plugin_additive(const PartitionCounts& pi,
                       const std::function<double(double)>& f) {
    if (pi.empty()) empty_state_error("plugin_additive");
    const double n = static_cast<double>(pi.total());
    double sum = 0.0;
    for (const auto c : pi.counts()) sum += f(static_cast<double>(c) / n);
    return sum;
}

double entropy_of_masses(const RankedMasses& masses) {
    double h = 0.0;
    for (const double w : masses.weights()) {
        if (w > 0.0) h -= w * std::log(w);
    }
    return h;
}

std::optional<std::size_t> sample_class(const RankedMasses& masses, double u) {
    return ClassSampler(masses)(u);
}

ClassSampler::ClassSampler(const RankedMasses& masses) {
    cumulative_.reserve(masses.weights().size());
    double acc = 0.0;
    for (const double w : masses.weights()) {
        acc += w;
        cumulative_.push_back(acc);
    }
}

std::optional<std::size_t> ClassSampler::operator()(double u) const {
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - cumulative_.begin());
}

PartitionGrower::PartitionGrower(const RankedMasses& masses)
    : sampler_(masses), label_of_interval_(masses.weights().size(), -1) {}

void PartitionGrower::step(double u) {
    const auto idx = sampler_(u);
    std::int64_t* label = idx ? &label_of_interval_[*idx] : &tail_label_;
    if (*label < 0) {
        *label = state_.num_classes();
        state_.append_singleton();
    } else {
        state_.increment_class(static_cast<std::size_t>(*label));
    }
}

void PartitionGrower::step_n(std::int64_t n, RandomStream& rng) {
    for (std::int64_t i = 0; i < n; ++i) step(rng.next_uniform());
}

namespace {

void check_tail(const RankedMasses& masses, double max_tail) {
    if (masses.tail() > max_tail)
        throw std::invalid_argument("simulate_partition: tail mass " +
                                    short_double(masses.tail()) +
                                    " exceeds the allowed " + short_double(max_tail));
}

}  // namespace

PartitionCounts simulate_partition(const RankedMasses& masses, std::int64_t n,
                                   RandomStream& rng, double max_tail) {
    check_tail(masses, max_tail);
    PartitionGrower grower(masses);
    grower.step_n(n, rng);
    return grower.state();
}

PartitionCounts simulate_partition(const RankedMasses& masses,
                                   std::span<const double> uniforms,
                                   double max_tail) {
    check_tail(masses, max_tail);
    PartitionGrower grower(masses);
    for (const double u : uniforms) grower.step(u);
    return grower.state();
}

}  // namespace pentropy
