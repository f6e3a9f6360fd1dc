#pragma once

#include <charconv>
#include <cmath>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace qhub::detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Non-blank lines with their 1-based numbers; CR before LF is dropped.
inline std::vector<std::pair<int, std::string_view>> numbered_lines(std::string_view text) {
    std::vector<std::pair<int, std::string_view>> out;
    int number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find('\n', start);
        auto line = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        ++number;
        line = trim(line);
        if (!line.empty()) out.emplace_back(number, line);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            return out;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
}

inline std::optional<double> parse_double(std::string_view s) {
    double v = 0.0;
    const auto* last = s.data() + s.size();
    const auto res = std::from_chars(s.data(), last, v, std::chars_format::general);
    if (s.empty() || res.ec != std::errc{} || res.ptr != last) return std::nullopt;
    return v;
}

inline std::optional<long long> parse_int(std::string_view s) {
    long long v = 0;
    const auto* last = s.data() + s.size();
    const auto res = std::from_chars(s.data(), last, v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != last) return std::nullopt;
    return v;
}

} // namespace qhub::detail
