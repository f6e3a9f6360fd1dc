#include "qhub/calendar.hpp"

#include <charconv>
#include <cstdio>

namespace qhub {

namespace {

using namespace std::chrono;

bool parse_uint(std::string_view text, std::size_t pos, std::size_t len, unsigned& out) {
    if (pos + len > text.size()) return false;
    out = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        const char c = text[i];
        if (c < '0' || c > '9') return false;
        out = out * 10 + static_cast<unsigned>(c - '0');
    }
    return true;
}

std::optional<Date> checked(unsigned y, unsigned m, unsigned d) {
    const Date date{year{static_cast<int>(y)}, month{m}, day{d}};
    if (!date.ok()) return std::nullopt;
    return date;
}

} // namespace

Date make_date(int y, unsigned m, unsigned d) { return Date{year{y}, month{m}, day{d}}; }

std::optional<Date> parse_date(std::string_view text) {
    unsigned y = 0, m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    if (!parse_uint(text, 0, 4, y) || !parse_uint(text, 5, 2, m) || !parse_uint(text, 8, 2, d))
        return std::nullopt;
    return checked(y, m, d);
}

std::optional<Date> parse_compact_date(std::string_view text) {
    unsigned y = 0, m = 0, d = 0;
    if (text.size() != 8) return std::nullopt;
    if (!parse_uint(text, 0, 4, y) || !parse_uint(text, 4, 2, m) || !parse_uint(text, 6, 2, d))
        return std::nullopt;
    return checked(y, m, d);
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);
    if (text.size() != 19 || text[10] != 'T' || text[13] != ':' || text[16] != ':')
        return std::nullopt;
    const auto date = parse_date(text.substr(0, 10));
    if (!date) return std::nullopt;
    unsigned hh = 0, mm = 0, ss = 0;
    if (!parse_uint(text, 11, 2, hh) || !parse_uint(text, 14, 2, mm) || !parse_uint(text, 17, 2, ss))
        return std::nullopt;
    if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
    return Timestamp{sys_days{*date}} + hours{hh} + minutes{mm} + seconds{ss};
}

std::string format_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

std::string format_compact_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d%02u%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

std::string format_timestamp(Timestamp t) {
    const auto day_start = floor<days>(t);
    const hh_mm_ss<seconds> tod{t - day_start};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", format_date(Date{day_start}).c_str(),
                  static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()));
    return buf;
}

Date add_days(Date d, int n) { return Date{sys_days{d} + days{n}}; }

Timestamp midnight_utc(Date d) { return Timestamp{sys_days{d}}; }

Date date_of(Timestamp t) { return Date{floor<days>(t)}; }

bool is_wednesday(Date d) { return weekday{sys_days{d}} == Wednesday; }

bool is_weekday(Date d) {
    const weekday w{sys_days{d}};
    return w != Saturday && w != Sunday;
}

} // namespace qhub
