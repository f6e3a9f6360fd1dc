#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "qhub/core.hpp"

namespace qhub {

struct PricePoint {
    Date date;
    double close = 0.0;

    friend bool operator==(const PricePoint&, const PricePoint&) = default;
};

/// Daily closing prices, strictly increasing in date, all positive.
class PriceSeries {
public:
    PriceSeries() = default;
    /// Throws DomainError when the invariants do not hold.
    explicit PriceSeries(std::vector<PricePoint> entries);

    const std::vector<PricePoint>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    std::optional<std::size_t> index_of(Date d) const;
    /// Index of the latest entry dated on or before `d`.
    std::optional<std::size_t> last_index_on_or_before(Date d) const;
    std::optional<double> close_on(Date d) const;

    friend bool operator==(const PriceSeries&, const PriceSeries&) = default;

private:
    std::vector<PricePoint> entries_;
};

/// Parses a `date,close` CSV. Throws InputError naming the offending line.
PriceSeries parse_prices(std::string_view text);
PriceSeries load_prices(const std::filesystem::path& path);
std::string serialize_prices(const PriceSeries& prices);

/// 100 * (ln P_t - ln P_{t-k}) where t-k is the k-th preceding entry of the series.
double compute_return(const PriceSeries& prices, Date t, int trading_steps);

/// The close that anchors a round's DAX forecasts: the round date's close, or the most recent
/// earlier close when the round date has none.
std::optional<std::size_t> dax_anchor_index(const PriceSeries& prices, Date round_date);

/// Realized DAX target for a round and horizon, relative to the round's anchor close. Empty when
/// the valid date has no close (exchange holiday or data not yet available).
std::optional<double> dax_outcome(const PriceSeries& prices, Date round_date, const Horizon& horizon);

/// Station observations for one weather target.
class ObservationSeries {
public:
    explicit ObservationSeries(TargetKind target) : target_(target) {}

    TargetKind target() const { return target_; }
    const std::map<Timestamp, double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

    /// Observation at the instant; status missing when no value is recorded.
    Observation at(Timestamp t) const;
    /// Adds or replaces a value. Throws DomainError on a non-finite value or negative wind.
    void set(Timestamp t, double value);
    /// Overlays `other` onto this series (values in `other` win).
    void merge(const ObservationSeries& other);

    friend bool operator==(const ObservationSeries&, const ObservationSeries&) = default;

private:
    TargetKind target_;
    std::map<Timestamp, double> values_;
};

/// Parses a `timestamp_utc,value` CSV. Weather series keep only 00:00 and 12:00 UTC stamps.
ObservationSeries parse_observations(std::string_view text, TargetKind target);
ObservationSeries load_observations(const std::filesystem::path& path, TargetKind target);
std::string serialize_observations(const ObservationSeries& series);

enum class NwpVariable {
    mean_sea_level_pressure,
    total_cloud_cover,
    direct_radiation,
    temperature_2m,
    temperature_850hpa,
    wind_10m,
    wind_gust_10m,
};

inline constexpr std::size_t kNwpMembers = 40;
inline constexpr int kMaxLeadHours = 120;

std::string_view nwp_variable_code(NwpVariable v);
std::optional<NwpVariable> parse_nwp_variable(std::string_view code);
/// NWP variable that forecasts a weather target directly.
NwpVariable nwp_variable_for(TargetKind target);

struct EnsembleNwpForecast {
    NwpVariable variable = NwpVariable::temperature_2m;
    Timestamp init_time;
    int lead_hours = 0;
    std::array<double, kNwpMembers> members{};

    double mean() const;
    /// Sample variance with divisor n - 1.
    double variance() const;

    friend bool operator==(const EnsembleNwpForecast&, const EnsembleNwpForecast&) = default;
};

/// Parses the NWP text format:
///
///     init_time=2021-11-03T00:00:00Z
///     variable=temperature_2m lead=36
///     v1,v2,...,v40
///
/// Throws InputError on a member count other than 40, an unknown variable code, a lead outside
/// [0, 120] or a duplicate (variable, lead) block.
std::vector<EnsembleNwpForecast> parse_nwp(std::string_view text);
std::vector<EnsembleNwpForecast> load_nwp_file(const std::filesystem::path& path);
std::string serialize_nwp(const std::vector<EnsembleNwpForecast>& blocks);

/// All ensemble forecasts, keyed by (variable, init time, lead).
class NwpStore {
public:
    void add(const EnsembleNwpForecast& fc);
    void add(const std::vector<EnsembleNwpForecast>& fcs);

    const EnsembleNwpForecast* find(NwpVariable v, Timestamp init, int lead) const;
    /// Forecasts of `v` at `lead` in init-time order.
    std::vector<const EnsembleNwpForecast*> series(NwpVariable v, int lead) const;
    std::size_t size() const { return data_.size(); }

private:
    std::map<std::tuple<NwpVariable, Timestamp, int>, EnsembleNwpForecast> data_;
};

std::string read_text_file(const std::filesystem::path& path);

} // namespace qhub
