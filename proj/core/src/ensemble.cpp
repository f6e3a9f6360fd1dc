#include "qhub/ensemble.hpp"

#include <algorithm>

#include "qhub/error.hpp"

namespace qhub {

double median_of(std::vector<double> values) {
    if (values.empty()) throw DomainError("median of an empty set");
    const auto n = values.size();
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(values.begin(), mid, values.end());
    if (n % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(values.begin(), mid);
    return (lower + upper) / 2.0;
}

QuantileForecast combine(std::span<const QuantileForecast> members, const EnsembleSpec& spec) {
    if (spec.min_members < 1) throw DomainError("an ensemble needs min_members >= 1");
    if (members.size() < static_cast<std::size_t>(spec.min_members))
        throw DomainError("ensemble needs at least " + std::to_string(spec.min_members) + " members, got " +
                          std::to_string(members.size()));
    const auto& first = members.front();
    for (const auto& m : members) {
        if (m.target != first.target || m.horizon != first.horizon || m.round_date != first.round_date)
            throw DomainError("ensemble members must share target, horizon and round");
    }

    QuantileForecast out{first.target, first.horizon, first.round_date, {}};
    std::vector<double> level(members.size());
    for (std::size_t i = 0; i < kNumLevels; ++i) {
        for (std::size_t m = 0; m < members.size(); ++m) level[m] = members[m].quantiles[i];
        if (spec.method == EnsembleMethod::mean) {
            // Sorted summation makes the result independent of member order; clamping to the
            // member range keeps identical members exact and preserves level monotonicity.
            std::sort(level.begin(), level.end());
            double sum = 0.0;
            for (double v : level) sum += v;
            out.quantiles[i] = std::clamp(sum / static_cast<double>(level.size()), level.front(), level.back());
        } else {
            out.quantiles[i] = median_of(level);
        }
    }
    return out;
}

} // namespace qhub
