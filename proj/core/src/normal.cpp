#include "qhub/normal.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "qhub/error.hpp"

namespace qhub::normal {

double pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double ccdf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double log_cdf(double z) {
    if (z > -30.0) return std::log(cdf(z));
    // Asymptotic expansion of the lower tail; erfc underflows not far below this point.
    const double x2 = 1.0 / (z * z);
    const double series = 1.0 - x2 * (1.0 - x2 * (3.0 - x2 * (15.0 - x2 * (105.0 - x2 * 945.0))));
    return -0.5 * z * z - std::log(-z) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

double quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal quantile needs p in (0, 1)");
    // Work in the smaller tail for accuracy.
    if (p < 0.5) return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
    return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * (1.0 - p));
}

} // namespace qhub::normal
