#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qhub/calendar.hpp"

namespace qhub {

inline constexpr std::size_t kNumLevels = 5;

/// The five quantile levels every forecast reports, in increasing order.
class QuantileLevels {
public:
    static constexpr std::array<double, kNumLevels> values{0.025, 0.25, 0.5, 0.75, 0.975};

    static constexpr std::size_t size() { return kNumLevels; }
    static constexpr double at(std::size_t i) { return values[i]; }

    /// Column labels as they appear in the submission header (`q0.025`, ...).
    static const std::array<std::string, kNumLevels>& labels();
};

using QuantileVector = std::array<double, kNumLevels>;

// Index constants into a QuantileVector.
inline constexpr std::size_t kQ025 = 0;
inline constexpr std::size_t kQ25 = 1;
inline constexpr std::size_t kQ50 = 2;
inline constexpr std::size_t kQ75 = 3;
inline constexpr std::size_t kQ975 = 4;

enum class TargetKind { dax, temperature, wind };

inline constexpr std::array<TargetKind, 3> kAllTargets{TargetKind::dax, TargetKind::temperature,
                                                       TargetKind::wind};

enum class HorizonUnit { day, hour };

struct Horizon {
    int magnitude = 0;
    HorizonUnit unit = HorizonUnit::day;
    /// Number of trading days a DAX calendar horizon spans; empty for weather horizons.
    std::optional<int> trading_steps;

    /// `"1 day"`, `"36 hour"`.
    std::string label() const;

    friend bool operator==(const Horizon&, const Horizon&) = default;
};

struct Target {
    TargetKind kind;

    std::string_view name() const;
    std::string_view unit() const;
    const std::vector<Horizon>& horizons() const;
    bool is_weather() const { return kind != TargetKind::dax; }

    friend bool operator==(const Target&, const Target&) = default;
};

std::string_view target_name(TargetKind kind);
std::optional<TargetKind> parse_target(std::string_view name);

/// Looks up a horizon by label ("5 day") within the target's horizon set.
std::optional<Horizon> find_horizon(TargetKind kind, std::string_view label);
/// Looks up a horizon by magnitude within the target's horizon set.
std::optional<Horizon> find_horizon(TargetKind kind, int magnitude);
/// Position of the horizon within the target's horizon set; throws DomainError if absent.
std::size_t horizon_index(TargetKind kind, const Horizon& h);

/// A (target, horizon) pair; orders DAX before temperature before wind, horizons ascending.
struct CellKey {
    TargetKind target = TargetKind::dax;
    int horizon = 0;

    std::string label() const;

    friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

/// All 15 cells in canonical order.
const std::vector<CellKey>& all_cells();
Horizon horizon_of(const CellKey& cell);

struct QuantileForecast {
    TargetKind target = TargetKind::dax;
    Horizon horizon;
    Date round_date;
    QuantileVector quantiles{};

    CellKey cell() const { return {target, horizon.magnitude}; }

    friend bool operator==(const QuantileForecast&, const QuantileForecast&) = default;
};

bool is_monotone(const QuantileVector& q);
bool all_finite(const QuantileVector& q);

/// Checks the forecast invariants (finite, non-decreasing, nonnegative wind). Returns a
/// description of the first violation, or nullopt.
std::optional<std::string> check_forecast(const QuantileForecast& fc);

enum class ObservationStatus { observed, missing };

struct Observation {
    TargetKind target = TargetKind::temperature;
    Timestamp valid_time;
    std::optional<double> value;

    ObservationStatus status() const {
        return value ? ObservationStatus::observed : ObservationStatus::missing;
    }
};

/// One weekly submission round.
struct RoundSpec {
    Date round_date;
    /// 23:59 on the round date (treated as UTC; no local time zone handling).
    Timestamp deadline;
    std::vector<TargetKind> targets;

    std::size_t expected_row_count() const;
    bool has_target(TargetKind kind) const;
};

/// Builds a round for a Wednesday. By default all three targets are forecast.
RoundSpec make_round(Date round_date,
                     std::span<const TargetKind> targets = std::span<const TargetKind>(kAllTargets));

/// Nominal DAX close used when a DAX valid time needs a clock time (17:30 UTC).
inline constexpr std::chrono::minutes kDaxCloseOffset{17 * 60 + 30};

/// The instant a (target, horizon) forecast made in `round` refers to. Weather horizons count
/// hours from 00:00 UTC of the round date; DAX horizons count calendar days to that day's close.
Timestamp resolve_valid_time(const RoundSpec& round, TargetKind target, const Horizon& horizon);

} // namespace qhub
