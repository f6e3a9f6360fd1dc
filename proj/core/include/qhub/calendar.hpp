#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace qhub {

using Date = std::chrono::year_month_day;
using Timestamp = std::chrono::sys_seconds;

Date make_date(int y, unsigned m, unsigned d);

/// Parses `YYYY-MM-DD`. Returns nullopt on any deviation from that exact shape or an invalid date.
std::optional<Date> parse_date(std::string_view text);
/// Parses the compact `YYYYMMDD` form used in submission file names.
std::optional<Date> parse_compact_date(std::string_view text);
/// Parses `YYYY-MM-DDTHH:MM:SSZ` (the trailing `Z` is optional, seconds are required).
std::optional<Timestamp> parse_timestamp(std::string_view text);

std::string format_date(Date d);
std::string format_compact_date(Date d);
std::string format_timestamp(Timestamp t);

Date add_days(Date d, int days);
Timestamp midnight_utc(Date d);
Date date_of(Timestamp t);

bool is_wednesday(Date d);
bool is_weekday(Date d);

} // namespace qhub
