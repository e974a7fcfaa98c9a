#include "partition_entropy/special_functions.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pentropy {

namespace {

[[noreturn]] void positive_domain_error(const char* fn, double x) {
    throw std::domain_error(std::string(fn) + ": argument must be positive, got " +
                            std::to_string(x));
}

}  // namespace

double digamma(double x) {
    if (!(x > 0.0)) positive_domain_error("digamma", x);
    // psi(x) = psi(x+1) - 1/x until the asymptotic region is reached.
    double shift = 0.0;
    while (x < 8.0) {
        shift -= 1.0 / x;
        x += 1.0;
    }
    // psi(x) ~ ln x - 1/(2x) - sum_k B_{2k} / (2k x^{2k}), truncated at 1/x^14.
    const double z = 1.0 / (x * x);
    const double tail =
        z * (1.0 / 12.0 -
             z * (1.0 / 120.0 -
                  z * (1.0 / 252.0 -
                       z * (1.0 / 240.0 -
                            z * (1.0 / 132.0 -
                                 z * (691.0 / 32760.0 - z * (1.0 / 12.0)))))));
    return shift + std::log(x) - 0.5 / x - tail;
}

double log_gamma(double x) {
    if (!(x > 0.0)) positive_domain_error("log_gamma", x);
    // lnGamma(x) = lnGamma(x+m) - sum ln(x+i); the Stirling series at the
    // shifted point is accumulated in long double so the downstream recurrence
    // checks survive the final rounding to double.
    long double acc = 0.0L;
    long double t = x;
    while (t < 12.0L) {
        acc += std::log(t);
        t += 1.0L;
    }
    const long double z = 1.0L / (t * t);
    const long double series =
        (1.0L / 12.0L -
         z * (1.0L / 360.0L -
              z * (1.0L / 1260.0L -
                   z * (1.0L / 1680.0L -
                        z * (1.0L / 1188.0L -
                             z * (691.0L / 360360.0L - z * (1.0L / 156.0L))))))) /
        t;
    constexpr long double half_log_two_pi = 0.918938533204672741780329736405617639862L;
    const long double value =
        (t - 0.5L) * std::log(t) - t + half_log_two_pi + series - acc;
    return static_cast<double>(value);
}

}  // namespace pentropy
