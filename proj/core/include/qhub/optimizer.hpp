#pragma once

#include <functional>
#include <span>
#include <vector>

namespace qhub {

struct NelderMeadOptions {
    /// Convergence when both the simplex's value spread and its coordinate spread fall below
    /// this fraction of the best value / coordinate magnitude.
    double relative_tolerance = 1e-8;
    int max_iterations = 10'000;
    /// Initial simplex edge along coordinate i: max(min_step, step_fraction * |x0_i|).
    double step_fraction = 0.1;
    double min_step = 0.1;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Best objective value after each iteration.
    std::vector<double> trace;
};

/// Derivative-free simplex minimisation. Deterministic: no randomness in any step.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> start, const NelderMeadOptions& options = {});

} // namespace qhub
