#pragma once

#include <span>
#include <string>
#include <vector>

#include "qhub/core.hpp"

namespace qhub {

enum class EnsembleMethod { mean, median };

struct EnsembleSpec {
    EnsembleMethod method = EnsembleMethod::mean;
    std::vector<std::string> member_aliases;
    int min_members = 1;
};

/// Level-wise mean or median of the members' quantiles. Members must share target, horizon and
/// round; throws DomainError otherwise or when fewer than `min_members` are given.
QuantileForecast combine(std::span<const QuantileForecast> members, const EnsembleSpec& spec);

/// Median with the midpoint convention for even counts.
double median_of(std::vector<double> values);

} // namespace qhub
