#include "partition_entropy/pdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "partition_entropy/special_functions.hpp"

namespace pentropy {

namespace {

std::string short_double(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%g", v);
    return buffer;
}

}  // namespace

PdpParams::PdpParams(double alpha_, double theta_) : alpha(alpha_), theta(theta_) {
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::invalid_argument("PdpParams: alpha must lie in [0, 1)");
    if (!(theta > -alpha))
        throw std::invalid_argument("PdpParams: theta must exceed -alpha");
}

TransitionDistribution crp_transition(const PdpParams& params,
                                      const PartitionCounts& pi) {
    if (pi.empty()) return TransitionDistribution{{1.0}};
    const double denom = params.theta + static_cast<double>(pi.total());
    TransitionDistribution dist;
    dist.probs.reserve(static_cast<std::size_t>(pi.num_classes()) + 1);
    for (const auto c : pi.counts())
        dist.probs.push_back((static_cast<double>(c) - params.alpha) / denom);
    dist.probs.push_back(
        (params.theta + params.alpha * static_cast<double>(pi.num_classes())) / denom);
    return dist;
}

PartitionCounts crp_sample(const PdpParams& params, std::int64_t n,
                           RandomStream& rng) {
    PartitionCounts pi;
    for (std::int64_t step = 0; step < n; ++step) {
        if (pi.empty()) {
            rng.next_uniform();  // burn one uniform so every step costs the same
            pi.append_singleton();
            continue;
        }
        const double denom = params.theta + static_cast<double>(pi.total());
        const double target = rng.next_uniform() * denom;
        double acc = 0.0;
        bool seated = false;
        for (std::size_t j = 0; j < static_cast<std::size_t>(pi.num_classes()); ++j) {
            acc += static_cast<double>(pi.count(j)) - params.alpha;
            if (target < acc) {
                pi.increment_class(j);
                seated = true;
                break;
            }
        }
        if (!seated) pi.append_singleton();
    }
    return pi;
}

RankedMasses StickDraw::ranked() const {
    std::vector<double> sorted = size_biased;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    return RankedMasses(std::move(sorted), tail);
}

StickDraw stick_breaking(const PdpParams& params, double tail_eps,
                         RandomStream& rng) {
    if (!(tail_eps > 0.0 && tail_eps < 1.0))
        throw std::invalid_argument("stick_breaking: tail_eps must lie in (0, 1)");
    StickDraw draw;
    double remaining = 1.0;
    for (std::int64_t j = 1; remaining >= tail_eps; ++j) {
        if (j > kMaxSticks)
            throw std::runtime_error(
                "stick_breaking: stick cap reached before the tail target; "
                "tail_eps " + short_double(tail_eps) +
                " is too aggressive for alpha " + short_double(params.alpha));
        const double beta = beta_draw(1.0 - params.alpha,
                                      params.theta + params.alpha * static_cast<double>(j),
                                      rng);
        draw.size_biased.push_back(beta * remaining);
        remaining *= 1.0 - beta;
    }
    draw.tail = remaining;
    return draw;
}

namespace {

// Polar method; deterministic given the stream.
double normal_draw(RandomStream& rng) {
    for (;;) {
        const double a = 2.0 * rng.next_uniform() - 1.0;
        const double b = 2.0 * rng.next_uniform() - 1.0;
        const double s = a * a + b * b;
        if (s > 0.0 && s < 1.0) return a * std::sqrt(-2.0 * std::log(s) / s);
    }
}

}  // namespace

double gamma_draw(double shape, RandomStream& rng) {
    if (!(shape > 0.0))
        throw std::domain_error("gamma_draw: shape must be positive");
    if (shape < 1.0) {
        // Boost through shape+1, then scale by U^(1/shape).
        for (;;) {
            const double g = gamma_draw(shape + 1.0, rng);
            const double u = rng.next_uniform();
            if (u > 0.0) return g * std::pow(u, 1.0 / shape);
        }
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = normal_draw(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.next_uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double beta_draw(double a, double b, RandomStream& rng) {
    for (;;) {
        const double x = gamma_draw(a, rng);
        const double y = gamma_draw(b, rng);
        // Underflowed draws (possible only for tiny shapes) are retried so the
        // result stays inside (0, 1).
        if (x > 0.0 && y > 0.0) return x / (x + y);
    }
}

std::vector<double> dirichlet_draw(const std::vector<double>& shapes,
                                   RandomStream& rng) {
    if (shapes.empty())
        throw std::invalid_argument("dirichlet_draw: need at least one shape");
    std::vector<double> draws(shapes.size());
    for (;;) {
        double sum = 0.0;
        for (std::size_t i = 0; i < shapes.size(); ++i) {
            draws[i] = gamma_draw(shapes[i], rng);
            sum += draws[i];
        }
        if (sum > 0.0) {
            for (double& v : draws) v /= sum;
            return draws;
        }
    }
}

double prior_mean_entropy(const PdpParams& params) {
    return digamma(params.theta + 1.0) - digamma(1.0 - params.alpha);
}

PosteriorEntropyParts posterior_entropy(const PdpParams& params,
                                        const PartitionCounts& pi) {
    const double n = static_cast<double>(pi.total());
    const double k = static_cast<double>(pi.num_classes());
    if (pi.empty()) {
        if (!(params.theta > 0.0))
            throw std::domain_error(
                "posterior_entropy: the empty state needs theta > 0");
        const double psi_one_minus_alpha = digamma(1.0 - params.alpha);
        const double a = params.theta * psi_one_minus_alpha;
        return {a, 0.0, digamma(params.theta + 1.0) - psi_one_minus_alpha};
    }
    const double a = (params.theta + params.alpha * k) * digamma(1.0 - params.alpha);
    double b = 0.0;
    for (const auto c : pi.counts()) {
        const double shifted = static_cast<double>(c) - params.alpha;
        b += shifted * digamma(shifted + 1.0);
    }
    const double value = digamma(params.theta + n + 1.0) - (a + b) / (params.theta + n);
    return {a, b, value};
}

PosteriorDraw posterior_sample(const PdpParams& params, const PartitionCounts& pi,
                               double tail_eps, RandomStream& rng) {
    if (pi.empty())
        throw std::invalid_argument("posterior_sample: need at least one observation");
    const std::size_t k = static_cast<std::size_t>(pi.num_classes());
    std::vector<double> shapes;
    shapes.reserve(k + 1);
    for (const auto c : pi.counts())
        shapes.push_back(static_cast<double>(c) - params.alpha);
    shapes.push_back(params.theta + params.alpha * static_cast<double>(k));
    const std::vector<double> dir = dirichlet_draw(shapes, rng);
    const double leftover = dir[k];

    const PdpParams continuation(params.alpha,
                                 params.theta + params.alpha * static_cast<double>(k));
    const StickDraw sticks = stick_breaking(continuation, tail_eps, rng);

    std::vector<double> combined(dir.begin(), dir.begin() + static_cast<std::ptrdiff_t>(k));
    combined.reserve(k + sticks.size_biased.size());
    for (const double w : sticks.size_biased) combined.push_back(leftover * w);
    std::sort(combined.begin(), combined.end(), std::greater<>());

    return {RankedMasses(std::move(combined), leftover * sticks.tail),
            static_cast<std::int64_t>(k) + sticks.count()};
}

double expected_tail_entropy(const PdpParams& params, const RankedMasses& masses,
                             std::int64_t sticks_drawn) {
    const double tail = masses.tail();
    if (tail <= 0.0) return 0.0;
    const double shifted_mean =
        digamma(params.theta + params.alpha * static_cast<double>(sticks_drawn) + 1.0) -
        digamma(1.0 - params.alpha);
    return tail * shifted_mean - tail * std::log(tail);
}

}  // namespace pentropy
