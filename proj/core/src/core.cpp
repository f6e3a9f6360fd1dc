#include "qhub/core.hpp"

#include <algorithm>
#include <cmath>

#include "qhub/error.hpp"

namespace qhub {

namespace {

std::vector<Horizon> make_dax_horizons() {
    // Calendar days from a Wednesday and the trading days they span (Mon-Fri calendar).
    return {{1, HorizonUnit::day, 1}, {2, HorizonUnit::day, 2}, {5, HorizonUnit::day, 3},
            {6, HorizonUnit::day, 4}, {7, HorizonUnit::day, 5}};
}

std::vector<Horizon> make_weather_horizons() {
    std::vector<Horizon> out;
    for (int h : {36, 48, 60, 72, 84}) out.push_back({h, HorizonUnit::hour, std::nullopt});
    return out;
}

} // namespace

const std::array<std::string, kNumLevels>& QuantileLevels::labels() {
    static const std::array<std::string, kNumLevels> labels{"q0.025", "q0.25", "q0.5", "q0.75",
                                                           "q0.975"};
    return labels;
}

std::string Horizon::label() const {
    return std::to_string(magnitude) + (unit == HorizonUnit::day ? " day" : " hour");
}

std::string_view target_name(TargetKind kind) {
    switch (kind) {
    case TargetKind::dax: return "DAX";
    case TargetKind::temperature: return "temperature";
    case TargetKind::wind: return "wind";
    }
    return "";
}

std::optional<TargetKind> parse_target(std::string_view name) {
    for (auto k : kAllTargets)
        if (target_name(k) == name) return k;
    return std::nullopt;
}

std::string_view Target::name() const { return target_name(kind); }

std::string_view Target::unit() const {
    switch (kind) {
    case TargetKind::dax: return "percent log-return";
    case TargetKind::temperature: return "degC";
    case TargetKind::wind: return "km/h";
    }
    return "";
}

const std::vector<Horizon>& Target::horizons() const {
    static const std::vector<Horizon> dax = make_dax_horizons();
    static const std::vector<Horizon> weather = make_weather_horizons();
    return kind == TargetKind::dax ? dax : weather;
}

std::optional<Horizon> find_horizon(TargetKind kind, std::string_view label) {
    for (const auto& h : Target{kind}.horizons())
        if (h.label() == label) return h;
    return std::nullopt;
}

std::optional<Horizon> find_horizon(TargetKind kind, int magnitude) {
    for (const auto& h : Target{kind}.horizons())
        if (h.magnitude == magnitude) return h;
    return std::nullopt;
}

std::size_t horizon_index(TargetKind kind, const Horizon& h) {
    const auto& set = Target{kind}.horizons();
    const auto it = std::find(set.begin(), set.end(), h);
    if (it == set.end())
        throw DomainError("horizon '" + h.label() + "' is not defined for target " +
                          std::string(target_name(kind)));
    return static_cast<std::size_t>(it - set.begin());
}

std::string CellKey::label() const {
    const auto h = find_horizon(target, horizon);
    return std::string(target_name(target)) + " " + (h ? h.value().label() : std::to_string(horizon));
}

const std::vector<CellKey>& all_cells() {
    static const std::vector<CellKey> cells = [] {
        std::vector<CellKey> out;
        for (auto k : kAllTargets)
            for (const auto& h : Target{k}.horizons()) out.push_back({k, h.magnitude});
        return out;
    }();
    return cells;
}

Horizon horizon_of(const CellKey& cell) {
    const auto h = find_horizon(cell.target, cell.horizon);
    if (!h) throw DomainError("unknown cell " + std::to_string(cell.horizon));
    return *h;
}

bool is_monotone(const QuantileVector& q) { return std::is_sorted(q.begin(), q.end()); }

bool all_finite(const QuantileVector& q) {
    return std::all_of(q.begin(), q.end(), [](double v) { return std::isfinite(v); });
}

std::optional<std::string> check_forecast(const QuantileForecast& fc) {
    if (!all_finite(fc.quantiles)) return "quantiles must be finite";
    if (!is_monotone(fc.quantiles)) return "quantiles must be non-decreasing across levels";
    if (fc.target == TargetKind::wind && fc.quantiles[kQ025] < 0.0)
        return "wind quantiles must be nonnegative";
    return std::nullopt;
}

std::size_t RoundSpec::expected_row_count() const {
    std::size_t n = 0;
    for (auto k : targets) n += Target{k}.horizons().size();
    return n;
}

bool RoundSpec::has_target(TargetKind kind) const {
    return std::find(targets.begin(), targets.end(), kind) != targets.end();
}

RoundSpec make_round(Date round_date, std::span<const TargetKind> targets) {
    if (!round_date.ok()) throw DomainError("invalid round date");
    if (!is_wednesday(round_date))
        throw DomainError("round date " + format_date(round_date) + " is not a Wednesday");
    RoundSpec r;
    r.round_date = round_date;
    r.deadline = midnight_utc(round_date) + std::chrono::hours{23} + std::chrono::minutes{59};
    // Canonical target order regardless of how the caller listed them.
    for (auto k : kAllTargets)
        if (std::find(targets.begin(), targets.end(), k) != targets.end()) r.targets.push_back(k);
    if (r.targets.empty()) throw DomainError("a round needs at least one target");
    return r;
}

Timestamp resolve_valid_time(const RoundSpec& round, TargetKind target, const Horizon& horizon) {
    horizon_index(target, horizon);
    if (target == TargetKind::dax)
        return midnight_utc(add_days(round.round_date, horizon.magnitude)) + kDaxCloseOffset;
    return midnight_utc(round.round_date) + std::chrono::hours{horizon.magnitude};
}

} // namespace qhub
