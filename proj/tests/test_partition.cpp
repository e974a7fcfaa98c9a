#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "partition_entropy/partition.hpp"
#include "partition_entropy/pdp.hpp"
#include "partition_entropy/random.hpp"

using namespace pentropy;

namespace {

PartitionCounts pc(std::vector<std::int64_t> counts) {
    return PartitionCounts(std::move(counts));
}

std::vector<std::int64_t> sorted_desc(std::span<const std::int64_t> counts) {
    std::vector<std::int64_t> v(counts.begin(), counts.end());
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

}  // namespace

TEST_CASE("successors enumerate every grown class plus the new singleton") {
    const auto from21 = successors(pc({2, 1}));
    REQUIRE(from21.size() == 3);
    CHECK(from21[0] == pc({3, 1}));
    CHECK(from21[1] == pc({2, 2}));
    CHECK(from21[2] == pc({2, 1, 1}));

    const auto from_empty = successors(PartitionCounts{});
    REQUIRE(from_empty.size() == 1);
    CHECK(from_empty[0] == pc({1}));

    const auto from5 = successors(pc({5}));
    REQUIRE(from5.size() == 2);
    CHECK(from5[0] == pc({6}));
    CHECK(from5[1] == pc({5, 1}));
}

TEST_CASE("partition counts validate their entries") {
    CHECK_THROWS_AS(pc({2, 0}), std::invalid_argument);
    CHECK_THROWS_AS(pc({-1}), std::invalid_argument);
    CHECK(PartitionCounts{}.total() == 0);
    CHECK(PartitionCounts{}.num_classes() == 0);
}

TEST_CASE("plug-in entropy on small states") {
    CHECK(plugin_entropy(pc({2, 2})) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(plugin_entropy(pc({1, 1, 1})) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
    // -(0.75 ln 0.75 + 0.25 ln 0.25)
    const double direct = -(0.75 * std::log(0.75) + 0.25 * std::log(0.25));
    CHECK(std::fabs(direct - 0.5623351446188083) < 1e-15);
    CHECK(std::fabs(plugin_entropy(pc({3, 1})) - direct) < 1e-15);
    CHECK_THROWS_AS(plugin_entropy(PartitionCounts{}), std::invalid_argument);
}

TEST_CASE("additive functional generalizes the plug-in estimator") {
    const auto neg_x_log_x = [](double x) { return -x * std::log(x); };
    CHECK(plugin_additive(pc({2, 2}), neg_x_log_x) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(plugin_additive(pc({2, 2}), [](double x) { return x; }) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(plugin_additive(pc({3, 1}), [](double x) { return x * x; }) ==
          doctest::Approx(0.625).epsilon(1e-14));
    CHECK_THROWS_AS(plugin_additive(PartitionCounts{}, neg_x_log_x),
                    std::invalid_argument);

    // f(x) = -x ln x reproduces plugin_entropy on random states.
    RandomStream rng(91, 0);
    const PdpParams params(0.4, 1.5);
    for (int trial = 0; trial < 100; ++trial) {
        const auto pi = crp_sample(params, 1 + static_cast<std::int64_t>(
                                               rng.next_uniform() * 60),
                                   rng);
        CHECK(std::fabs(plugin_additive(pi, neg_x_log_x) - plugin_entropy(pi)) < 1e-14);
    }
}

TEST_CASE("plug-in entropy is bounded by ln k with equality at uniform counts") {
    RandomStream rng(92, 0);
    const PdpParams params(0.25, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto pi = crp_sample(params, 1 + static_cast<std::int64_t>(
                                               rng.next_uniform() * 80),
                                   rng);
        CHECK(plugin_entropy(pi) <=
              std::log(static_cast<double>(pi.num_classes())) + 1e-12);
    }
    CHECK(plugin_entropy(pc({4, 4, 4})) ==
          doctest::Approx(std::log(3.0)).epsilon(1e-14));
    CHECK(plugin_entropy(pc({5, 3})) < std::log(2.0));
}

TEST_CASE("entropy of ranked masses ignores the tail and zero weights") {
    CHECK(entropy_of_masses(RankedMasses({0.5, 0.5}, 0.0)) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(entropy_of_masses(RankedMasses({1.0}, 0.0)) == 0.0);
    const double expected = 1.5 * std::log(2.0);
    CHECK(std::fabs(expected - 1.0397207708399179) < 1e-15);
    CHECK(std::fabs(entropy_of_masses(RankedMasses({0.5, 0.25, 0.25}, 0.0)) - expected) <
          1e-15);
    CHECK(entropy_of_masses(RankedMasses({0.5, 0.5, 0.0}, 0.0)) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("ranked masses enforce their invariants") {
    CHECK_THROWS_AS(RankedMasses({0.3, 0.7}, 0.0), std::invalid_argument);  // increasing
    CHECK_THROWS_AS(RankedMasses({0.5, 0.4}, 0.0), std::invalid_argument);  // sum != 1
    CHECK_THROWS_AS(RankedMasses({0.5, -0.5}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(RankedMasses({0.9}, -0.1), std::invalid_argument);
    CHECK(RankedMasses({0.9}, 0.1).tail() == 0.1);
}

TEST_CASE("interval lookup returns the covering class or the tail") {
    const RankedMasses s({0.5, 0.3, 0.2}, 0.0);
    CHECK(sample_class(s, 0.6) == 1);
    CHECK(sample_class(s, 0.0) == 0);
    CHECK(sample_class(s, 0.49999) == 0);
    CHECK(sample_class(s, 0.85) == 2);
    const RankedMasses with_tail({0.9}, 0.1);
    CHECK(sample_class(with_tail, 0.95) == std::nullopt);
    CHECK(sample_class(with_tail, 0.89) == 0);
}

TEST_CASE("class sampler agrees with the one-shot lookup") {
    const RankedMasses s({0.4, 0.3, 0.2, 0.1}, 0.0);
    const ClassSampler sampler(s);
    RandomStream rng(17, 3);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.next_uniform();
        CHECK(sampler(u) == sample_class(s, u));
    }
}

TEST_CASE("a single class absorbs every observation") {
    RandomStream rng(5, 0);
    CHECK(simulate_partition(RankedMasses({1.0}, 0.0), 17, rng) == pc({17}));
}

TEST_CASE("classes are labeled in order of first appearance") {
    const RankedMasses s({0.5, 0.5}, 0.0);
    // 0.7 opens interval 1 first, so its class is listed first.
    const std::vector<double> uniforms{0.7, 0.2, 0.9};
    CHECK(simulate_partition(s, uniforms) == pc({2, 1}));
    const std::vector<double> other{0.2, 0.7, 0.9};
    CHECK(simulate_partition(s, other) == pc({1, 2}));
}

TEST_CASE("two balanced classes give counts summing to n and entropy near ln 2") {
    const RankedMasses s({0.5, 0.5}, 0.0);
    RandomStream rng(6, 0);
    const auto pi = simulate_partition(s, 100000, rng);
    CHECK(pi.total() == 100000);
    CHECK(pi.num_classes() == 2);
    CHECK(std::fabs(plugin_entropy(pi) - std::log(2.0)) < 0.02);
}

TEST_CASE("the tail precondition rejects masses truncated too coarsely") {
    const RankedMasses s({0.9}, 0.1);
    RandomStream rng(7, 0);
    CHECK_THROWS_AS(simulate_partition(s, 10, rng), std::invalid_argument);
    // An explicit override admits the state and buckets tail hits together.
    RandomStream rng2(7, 0);
    const auto pi = simulate_partition(s, 2000, rng2, 0.2);
    CHECK(pi.total() == 2000);
    CHECK(pi.num_classes() == 2);
}

TEST_CASE("empirical frequencies converge to a size-biased reordering of the masses") {
    const RankedMasses s({0.6, 0.3, 0.1}, 0.0);
    for (std::uint64_t trial = 0; trial < 3; ++trial) {
        RandomStream rng(8, trial);
        const auto pi = simulate_partition(s, 100000, rng);
        REQUIRE(pi.num_classes() == 3);
        const auto ranked = sorted_desc(pi.counts());
        for (std::size_t i = 0; i < 3; ++i) {
            const double freq = static_cast<double>(ranked[i]) / 100000.0;
            CHECK(std::fabs(freq - s.weights()[i]) < 0.01);
        }
    }
}

TEST_CASE("the count multiset distribution is stable under permuting the uniforms") {
    const RankedMasses s({0.5, 0.5}, 0.0);
    const int trials = 10000;
    const int n = 10;
    std::map<std::vector<std::int64_t>, std::pair<long, long>> bins;
    for (int t = 0; t < trials; ++t) {
        RandomStream rng(9, static_cast<std::uint64_t>(t));
        std::vector<double> uniforms(n);
        for (double& u : uniforms) u = rng.next_uniform();
        bins[sorted_desc(simulate_partition(s, uniforms).counts())].first++;
        std::reverse(uniforms.begin(), uniforms.end());
        bins[sorted_desc(simulate_partition(s, uniforms).counts())].second++;
    }
    double chi2 = 0.0;
    std::size_t used = 0;
    for (const auto& [key, ab] : bins) {
        const double a = static_cast<double>(ab.first);
        const double b = static_cast<double>(ab.second);
        if (a + b < 10.0) continue;  // merge-out sparse bins
        chi2 += (a - b) * (a - b) / (a + b);
        ++used;
    }
    REQUIRE(used >= 2);
    CHECK(chi2 < test_oracles::chi2_crit_999(used - 1));
}

TEST_CASE("json round trips for the wire formats") {
    const auto pi = pc({3, 1});
    CHECK(pi.to_json() == "[3,1]");
    CHECK(PartitionCounts::from_json("[3,1]") == pi);
    CHECK_THROWS(PartitionCounts::from_json("{\"bad\":1}"));
    CHECK_THROWS(PartitionCounts::from_json("[0,2]"));

    const RankedMasses s({0.5, 0.3, 0.2}, 0.0);
    const auto back = RankedMasses::from_json(s.to_json());
    CHECK(back.weights() == s.weights());
    CHECK(back.tail() == s.tail());
    const auto defaulted = RankedMasses::from_json("{\"weights\": [0.75, 0.25]}");
    CHECK(defaulted.tail() == 0.0);
}
