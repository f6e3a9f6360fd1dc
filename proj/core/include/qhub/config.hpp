#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "qhub/calendar.hpp"

namespace qhub {

/// Challenge configuration, read from a `key = value` text file (`#` starts a comment).
struct HubConfig {
    std::string station_id = "station";
    /// Day the station identifier took effect; EMOS training does not mix data from both sides.
    std::optional<Date> station_cutover;
    bool allow_cross_cutover_training = false;
    Date season_start = make_date(2021, 10, 27);
    Date season_end = make_date(2022, 2, 9);
    /// First round with weather targets; earlier rounds forecast the DAX only.
    Date weather_start = make_date(2021, 11, 3);
    std::uint64_t seed = 42;
    int dax_window = 1000;
    int skip_allowance = 2;

    friend bool operator==(const HubConfig&, const HubConfig&) = default;
};

/// Throws InputError on unknown keys or malformed values.
HubConfig parse_config(std::string_view text);
HubConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const HubConfig& cfg);

} // namespace qhub
