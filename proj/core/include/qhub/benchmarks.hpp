#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qhub/core.hpp"
#include "qhub/error.hpp"
#include "qhub/ingestion.hpp"

namespace qhub {

/// Linear-interpolation sample quantile at position 1 + (n - 1) * alpha of the sorted sample.
double empirical_quantile(std::span<const double> sample, double alpha);
/// empirical_quantile at each of the five levels. Throws DomainError on an empty or non-finite sample.
QuantileVector empirical_quantiles(std::span<const double> sample);

struct RollingWindowConfig {
    /// Number of overlapping returns in the rolling sample.
    int window_length = 1000;
};

/// Rolling-sample return quantiles for one DAX horizon: the `window_length` most recent
/// overlapping k-step log-returns ending at or before `anchor_index`.
QuantileVector dax_benchmark_horizon(const PriceSeries& prices, std::size_t anchor_index, int trading_steps,
                                     const RollingWindowConfig& cfg = {});

/// The five DAX benchmark forecasts for a round. Throws DomainError on insufficient history.
std::vector<QuantileForecast> dax_benchmark(const PriceSeries& prices, const RoundSpec& round,
                                            const RollingWindowConfig& cfg = {});

/// Empirical quantiles of the raw NWP ensemble for a weather target; wind is floored at 0.
QuantileForecast raw_ensemble_benchmark(const EnsembleNwpForecast& nwp, TargetKind target);

enum class EmosFamily { normal, truncated_normal };

std::string_view emos_family_name(EmosFamily family);
std::optional<EmosFamily> parse_emos_family(std::string_view name);
/// Normal for temperature, zero-truncated normal for wind.
EmosFamily emos_family_for(TargetKind target);

/// Added to the softplus variance link so the predictive scale stays bounded away from zero.
inline constexpr double kEmosMinVariance = 1e-8;

struct EmosParams {
    EmosFamily family = EmosFamily::normal;
    double a = 0.0;
    double b = 1.0;
    double c = 1.0;
    double d = 0.0;
    /// Audit metadata.
    std::string fitted_at;
    int n_train = 0;

    double location(double ens_mean) const { return a + b * ens_mean; }
    double scale(double ens_variance) const;

    friend bool operator==(const EmosParams&, const EmosParams&) = default;
};

struct EmosTrainingPair {
    double ens_mean = 0.0;
    double ens_variance = 0.0;
    double observed = 0.0;
};

inline constexpr std::size_t kEmosMinTrainingPairs = 30;

/// Raised when the simplex search exhausts its iteration budget.
class EmosFitError : public Error {
public:
    EmosFitError(const std::string& what, double final_objective)
        : Error(what), final_objective_(final_objective) {}
    double final_objective() const noexcept { return final_objective_; }

private:
    double final_objective_;
};

struct EmosFitResult {
    EmosParams params;
    double mean_crps = 0.0;
    int iterations = 0;
    /// Best mean CRPS after each optimizer iteration.
    std::vector<double> objective_trace;
};

/// Minimum-CRPS estimation of location a + b*mean and variance softplus(c + d*var) + floor,
/// by simplex search from (0, 1, 1, 0).
EmosFitResult emos_fit_detailed(std::span<const EmosTrainingPair> training, EmosFamily family);
EmosParams emos_fit(std::span<const EmosTrainingPair> training, EmosFamily family);

/// Predictive quantiles at the five levels via the exact inverse CDF.
QuantileVector emos_quantiles(const EmosParams& params, double ens_mean, double ens_variance);
QuantileForecast emos_predict(const EmosParams& params, double ens_mean, double ens_variance,
                              TargetKind target, const Horizon& horizon, Date round_date);

/// Quantile of a normal distribution truncated below at zero.
double truncated_normal_quantile(double mu, double sigma, double alpha);

/// Closed-form CRPS of N(mu, sigma^2), or of that normal truncated below at zero, at y.
double crps_closed_form(EmosFamily family, double mu, double sigma, double y);

std::string serialize_emos_params(const EmosParams& p);
EmosParams parse_emos_params(std::string_view text);

} // namespace qhub
