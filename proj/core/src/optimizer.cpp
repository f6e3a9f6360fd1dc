#include "qhub/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qhub/error.hpp"

namespace qhub {

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options) {
    const std::size_t n = start.size();
    if (n == 0) throw DomainError("nelder_mead needs at least one parameter");

    constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;

    std::vector<std::vector<double>> simplex(n + 1, start);
    for (std::size_t i = 0; i < n; ++i)
        simplex[i + 1][i] += std::max(options.min_step, options.step_fraction * std::abs(start[i]));

    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values[i] = objective(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<std::vector<double>> s(n + 1);
        std::vector<double> v(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            s[i] = std::move(simplex[order[i]]);
            v[i] = values[order[i]];
        }
        simplex = std::move(s);
        values = std::move(v);
    };

    auto converged = [&] {
        const double fspread = values[n] - values[0];
        if (!(fspread <= options.relative_tolerance * std::max(std::abs(values[0]), 1e-300))) return false;
        double xscale = 1.0, xspread = 0.0;
        for (std::size_t j = 0; j < n; ++j) xscale = std::max(xscale, std::abs(simplex[0][j]));
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j) xspread = std::max(xspread, std::abs(simplex[i][j] - simplex[0][j]));
        return xspread <= options.relative_tolerance * xscale;
    };

    auto point = [&](const std::vector<double>& centroid, double coef) {
        std::vector<double> p(n);
        for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + coef * (simplex[n][j] - centroid[j]);
        return p;
    };

    NelderMeadResult result;
    sort_simplex();
    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        if (converged()) {
            result.converged = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);

        const auto xr = point(centroid, -kReflect);
        const double fr = objective(xr);
        if (fr < values[0]) {
            const auto xe = point(centroid, -kReflect * kExpand);
            const double fe = objective(xe);
            if (fe < fr) {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
        } else if (fr < values[n - 1]) {
            simplex[n] = xr;
            values[n] = fr;
        } else {
            // Outside contraction when the reflection beat the worst point, inside otherwise.
            const bool outside = fr < values[n];
            const auto xc = point(centroid, outside ? -kContract : kContract);
            const double fc = objective(xc);
            if (fc < (outside ? fr : values[n])) {
                simplex[n] = xc;
                values[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        simplex[i][j] = simplex[0][j] + kShrink * (simplex[i][j] - simplex[0][j]);
                    values[i] = objective(simplex[i]);
                }
            }
        }
        sort_simplex();
        result.trace.push_back(values[0]);
    }
    if (!result.converged && converged()) result.converged = true;

    result.x = simplex[0];
    result.value = values[0];
    result.iterations = iter;
    return result;
}

} // namespace qhub
