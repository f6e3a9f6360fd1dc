#include "qhub/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qhub/normal.hpp"
#include "qhub/optimizer.hpp"
#include "qhub/submission_io.hpp"
#include "text_util.hpp"

namespace qhub {

namespace {

double softplus(double x) { return x > 30.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sorted_quantile(std::span<const double> sorted, double alpha) {
    const double pos = alpha * static_cast<double>(sorted.size() - 1);  // 0-based
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<double> checked_sorted(std::span<const double> sample) {
    if (sample.empty()) throw DomainError("empirical quantiles need a nonempty sample");
    std::vector<double> s(sample.begin(), sample.end());
    if (!std::all_of(s.begin(), s.end(), [](double v) { return std::isfinite(v); }))
        throw DomainError("empirical quantiles need a finite sample");
    std::sort(s.begin(), s.end());
    return s;
}

} // namespace

double empirical_quantile(std::span<const double> sample, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
    const auto s = checked_sorted(sample);
    return sorted_quantile(s, alpha);
}

QuantileVector empirical_quantiles(std::span<const double> sample) {
    const auto s = checked_sorted(sample);
    QuantileVector out{};
    for (std::size_t i = 0; i < kNumLevels; ++i) out[i] = sorted_quantile(s, QuantileLevels::at(i));
    return out;
}

QuantileVector dax_benchmark_horizon(const PriceSeries& prices, std::size_t anchor_index, int trading_steps,
                                     const RollingWindowConfig& cfg) {
    if (cfg.window_length < static_cast<int>(kNumLevels))
        throw DomainError("rolling window must hold at least as many returns as quantile levels");
    if (trading_steps <= 0) throw DomainError("trading_steps must be positive");
    if (anchor_index >= prices.size()) throw DomainError("anchor index outside the price series");
    const auto window = static_cast<std::size_t>(cfg.window_length);
    const auto k = static_cast<std::size_t>(trading_steps);
    if (anchor_index + 1 < window + k)
        throw DomainError("insufficient price history: " + std::to_string(window + k) + " closes needed up to " +
                          format_date(prices.entries()[anchor_index].date) + ", have " +
                          std::to_string(anchor_index + 1));
    const auto& e = prices.entries();
    std::vector<double> returns;
    returns.reserve(window);
    for (std::size_t j = anchor_index + 1 - window; j <= anchor_index; ++j)
        returns.push_back(100.0 * (std::log(e[j].close) - std::log(e[j - k].close)));
    return empirical_quantiles(returns);
}

std::vector<QuantileForecast> dax_benchmark(const PriceSeries& prices, const RoundSpec& round,
                                            const RollingWindowConfig& cfg) {
    const auto anchor = dax_anchor_index(prices, round.round_date);
    if (!anchor) throw DomainError("no DAX close on or before " + format_date(round.round_date));
    std::vector<QuantileForecast> out;
    for (const auto& h : Target{TargetKind::dax}.horizons()) {
        out.push_back({TargetKind::dax, h, round.round_date,
                       dax_benchmark_horizon(prices, *anchor, *h.trading_steps, cfg)});
    }
    return out;
}

QuantileForecast raw_ensemble_benchmark(const EnsembleNwpForecast& nwp, TargetKind target) {
    if (target == TargetKind::dax || nwp_variable_for(target) != nwp.variable)
        throw DomainError("NWP variable " + std::string(nwp_variable_code(nwp.variable)) +
                          " does not forecast target " + std::string(target_name(target)));
    const auto horizon = find_horizon(target, nwp.lead_hours);
    if (!horizon) throw DomainError("lead " + std::to_string(nwp.lead_hours) + "h is not a forecast horizon");
    auto q = empirical_quantiles(nwp.members);
    if (target == TargetKind::wind)
        for (auto& v : q) v = std::max(v, 0.0);
    return {target, *horizon, date_of(nwp.init_time), q};
}

// ---- EMOS -----------------------------------------------------------------

std::string_view emos_family_name(EmosFamily family) {
    return family == EmosFamily::normal ? "normal" : "truncated_normal";
}

std::optional<EmosFamily> parse_emos_family(std::string_view name) {
    if (name == "normal") return EmosFamily::normal;
    if (name == "truncated_normal") return EmosFamily::truncated_normal;
    return std::nullopt;
}

EmosFamily emos_family_for(TargetKind target) {
    switch (target) {
    case TargetKind::temperature: return EmosFamily::normal;
    case TargetKind::wind: return EmosFamily::truncated_normal;
    case TargetKind::dax: break;
    }
    throw DomainError("EMOS is defined for weather targets only");
}

double EmosParams::scale(double ens_variance) const {
    return std::sqrt(softplus(c + d * ens_variance) + kEmosMinVariance);
}

double crps_closed_form(EmosFamily family, double mu, double sigma, double y) {
    if (!(sigma > 0.0)) throw DomainError("CRPS needs a positive scale");
    constexpr double inv_sqrt_pi = std::numbers::inv_sqrtpi;
    if (family == EmosFamily::normal) {
        const double z = (y - mu) / sigma;
        return sigma * (z * (2.0 * normal::cdf(z) - 1.0) + 2.0 * normal::pdf(z) - inv_sqrt_pi);
    }
    // Normal truncated below at 0. Below the truncation point the CDF is zero, so every unit of
    // distance from y up to 0 adds one unit of score.
    if (y < 0.0) return crps_closed_form(family, mu, sigma, 0.0) - y;
    // Ratios of tail probabilities are formed in log space so that a location far below zero
    // does not underflow.
    const double ratio = mu / sigma;
    const double z = (y - mu) / sigma;
    const double log_p = normal::log_cdf(ratio);
    const double upper = std::exp(normal::log_cdf(-z) - log_p);
    const double density = std::exp(-0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi) - log_p);
    const double overlap = std::exp(normal::log_cdf(std::numbers::sqrt2 * ratio) - 2.0 * log_p);
    return sigma * (z * (1.0 - 2.0 * upper) + 2.0 * density - inv_sqrt_pi * overlap);
}

double truncated_normal_quantile(double mu, double sigma, double alpha) {
    if (!(sigma > 0.0)) throw DomainError("truncated normal needs a positive scale");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
    // F(x) = 1 - (1 - Phi((x-mu)/sigma)) / Phi(mu/sigma), solved through the upper tail.
    double tail = (1.0 - alpha) * normal::cdf(mu / sigma);
    tail = std::max(tail, std::numeric_limits<double>::min());
    return std::max(0.0, mu - sigma * normal::quantile(tail));
}

EmosFitResult emos_fit_detailed(std::span<const EmosTrainingPair> training, EmosFamily family) {
    if (training.size() < kEmosMinTrainingPairs)
        throw DomainError("EMOS needs at least " + std::to_string(kEmosMinTrainingPairs) + " training pairs, got " +
                          std::to_string(training.size()));
    double mmin = std::numeric_limits<double>::infinity(), mmax = -mmin;
    for (const auto& p : training) {
        if (!std::isfinite(p.ens_mean) || !std::isfinite(p.ens_variance) || !std::isfinite(p.observed))
            throw DomainError("EMOS training data must be finite");
        if (p.ens_variance < 0.0) throw DomainError("ensemble variance must be nonnegative");
        mmin = std::min(mmin, p.ens_mean);
        mmax = std::max(mmax, p.ens_mean);
    }
    if (!(mmax > mmin)) throw DomainError("degenerate EMOS training data: ensemble mean has zero variance");

    const auto objective = [&](std::span<const double> x) {
        const EmosParams p{family, x[0], x[1], x[2], x[3], {}, 0};
        double sum = 0.0;
        for (const auto& t : training) sum += crps_closed_form(family, p.location(t.ens_mean), p.scale(t.ens_variance), t.observed);
        return sum / static_cast<double>(training.size());
    };

    const auto nm = nelder_mead(objective, {0.0, 1.0, 1.0, 0.0});
    if (!nm.converged)
        throw EmosFitError("EMOS fit did not converge after " + std::to_string(nm.iterations) +
                               " iterations (mean CRPS " + format_number(nm.value) + ")",
                           nm.value);

    EmosFitResult out;
    out.params = {family, nm.x[0], nm.x[1], nm.x[2], nm.x[3], {}, static_cast<int>(training.size())};
    out.mean_crps = nm.value;
    out.iterations = nm.iterations;
    out.objective_trace = nm.trace;
    return out;
}

EmosParams emos_fit(std::span<const EmosTrainingPair> training, EmosFamily family) {
    return emos_fit_detailed(training, family).params;
}

QuantileVector emos_quantiles(const EmosParams& params, double ens_mean, double ens_variance) {
    if (!std::isfinite(ens_mean) || !std::isfinite(ens_variance)) throw DomainError("EMOS inputs must be finite");
    const double mu = params.location(ens_mean);
    const double sigma = params.scale(ens_variance);
    QuantileVector q{};
    for (std::size_t i = 0; i < kNumLevels; ++i) {
        const double alpha = QuantileLevels::at(i);
        q[i] = params.family == EmosFamily::normal ? mu + sigma * normal::quantile(alpha)
                                                   : truncated_normal_quantile(mu, sigma, alpha);
    }
    return q;
}

QuantileForecast emos_predict(const EmosParams& params, double ens_mean, double ens_variance, TargetKind target,
                              const Horizon& horizon, Date round_date) {
    if (target == TargetKind::dax) throw DomainError("EMOS is defined for weather targets only");
    if (params.family != emos_family_for(target))
        throw DomainError("EMOS family does not match target " + std::string(target_name(target)));
    return {target, horizon, round_date, emos_quantiles(params, ens_mean, ens_variance)};
}

std::string serialize_emos_params(const EmosParams& p) {
    std::ostringstream out;
    out << "family=" << emos_family_name(p.family) << "\n"
        << "a=" << format_number(p.a) << "\n"
        << "b=" << format_number(p.b) << "\n"
        << "c=" << format_number(p.c) << "\n"
        << "d=" << format_number(p.d) << "\n"
        << "fitted_at=" << p.fitted_at << "\n"
        << "n_train=" << p.n_train << "\n";
    return out.str();
}

EmosParams parse_emos_params(std::string_view text) {
    EmosParams p;
    bool seen_family = false;
    int seen_coef = 0;
    for (const auto& [no, line] : detail::numbered_lines(text)) {
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw InputError("expected key=value", no);
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        auto number = [&] {
            const auto v = detail::parse_double(value);
            if (!v) throw InputError("malformed number for " + std::string(key), no);
            ++seen_coef;
            return *v;
        };
        if (key == "family") {
            const auto f = parse_emos_family(value);
            if (!f) throw InputError("unknown EMOS family '" + std::string(value) + "'", no);
            p.family = *f;
            seen_family = true;
        } else if (key == "a") p.a = number();
        else if (key == "b") p.b = number();
        else if (key == "c") p.c = number();
        else if (key == "d") p.d = number();
        else if (key == "fitted_at") p.fitted_at = std::string(value);
        else if (key == "n_train") {
            const auto n = detail::parse_int(value);
            if (!n) throw InputError("malformed n_train", no);
            p.n_train = static_cast<int>(*n);
        } else {
            throw InputError("unknown key '" + std::string(key) + "'", no);
        }
    }
    if (!seen_family || seen_coef != 4) throw InputError("EMOS parameter file needs family, a, b, c and d");
    return p;
}

} // namespace qhub
