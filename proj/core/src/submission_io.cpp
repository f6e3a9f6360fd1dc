#include "qhub/submission_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace qhub {

namespace {

constexpr std::size_t kNumColumns = 8;

const std::array<std::string_view, kNumColumns> kColumns{
    "forecast_date", "target", "horizon", "q0.025", "q0.25", "q0.5", "q0.75", "q0.975"};

bool valid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = 0;
        char32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > s.size()) return false;
        for (std::size_t k = 1; k < len; ++k) {
            const auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        // Overlong encodings, surrogates, out of range.
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
            (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF)
            return false;
        i += len;
    }
    return true;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::string_view unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(unquote(line.substr(start)));
            break;
        }
        out.push_back(unquote(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

bool is_blank(std::string_view s) { return trim(s).empty(); }

enum class NumberStatus { ok, non_numeric, non_finite };

NumberStatus parse_number(std::string_view text, double& out) {
    if (text.empty()) return NumberStatus::non_numeric;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, out, std::chars_format::general);
    if (res.ec == std::errc::result_out_of_range) return NumberStatus::non_finite;
    if (res.ec != std::errc{} || res.ptr != last) return NumberStatus::non_numeric;
    if (!std::isfinite(out)) return NumberStatus::non_finite;
    return NumberStatus::ok;
}

std::string describe_header_problem(const std::vector<std::string_view>& got) {
    std::vector<std::string> missing, extra;
    for (auto col : kColumns)
        if (std::find(got.begin(), got.end(), col) == got.end()) missing.emplace_back(col);
    for (auto col : got)
        if (std::find(kColumns.begin(), kColumns.end(), col) == kColumns.end())
            extra.emplace_back(col);
    std::ostringstream msg;
    msg << "header must be exactly '" << kSubmissionHeader << "'";
    auto join = [&](const char* what, const std::vector<std::string>& cols) {
        msg << "; " << what << ": ";
        for (std::size_t i = 0; i < cols.size(); ++i) msg << (i ? ", " : "") << cols[i];
    };
    if (!missing.empty()) join("missing columns", missing);
    if (!extra.empty()) join("unexpected columns", extra);
    if (missing.empty() && extra.empty()) msg << "; columns are out of order or repeated";
    return msg.str();
}

class ReportBuilder {
public:
    void error(FindingCode code, int line, std::string msg) {
        report_.findings.push_back({Severity::error, code, line, std::move(msg)});
    }
    void warning(FindingCode code, int line, std::string msg) {
        report_.findings.push_back({Severity::warning, code, line, std::move(msg)});
    }
    ValidationReport take() { return std::move(report_); }

private:
    ValidationReport report_;
};

} // namespace

bool is_reserved_alias(std::string_view alias) {
    return alias == kBenchmarkAlias || alias == kEmosAlias || alias == kEnsembleMeanAlias ||
           alias == kEnsembleMedianAlias;
}

bool is_valid_alias(std::string_view alias) {
    if (alias.empty() || alias.size() > 64 || alias.front() == '.') return false;
    return std::all_of(alias.begin(), alias.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '_' || c == '-' || c == '.';
    });
}

std::string_view finding_code_name(FindingCode code) {
    switch (code) {
    case FindingCode::invalid_encoding: return "invalid_encoding";
    case FindingCode::empty_file: return "empty_file";
    case FindingCode::header_mismatch: return "header_mismatch";
    case FindingCode::field_count: return "field_count";
    case FindingCode::bad_date: return "bad_date";
    case FindingCode::wrong_forecast_date: return "wrong_forecast_date";
    case FindingCode::unknown_target: return "unknown_target";
    case FindingCode::target_not_in_round: return "target_not_in_round";
    case FindingCode::unknown_horizon: return "unknown_horizon";
    case FindingCode::duplicate_row: return "duplicate_row";
    case FindingCode::missing_row: return "missing_row";
    case FindingCode::non_numeric: return "non_numeric";
    case FindingCode::non_finite: return "non_finite";
    case FindingCode::non_monotone: return "non_monotone";
    case FindingCode::negative_wind: return "negative_wind";
    case FindingCode::repaired_sort: return "repaired_sort";
    case FindingCode::reserved_alias: return "reserved_alias";
    case FindingCode::invalid_alias: return "invalid_alias";
    }
    return "unknown";
}

Verdict ValidationReport::verdict() const {
    return error_count() == 0 ? Verdict::accepted : Verdict::rejected;
}

std::size_t ValidationReport::error_count() const {
    return static_cast<std::size_t>(std::count_if(findings.begin(), findings.end(), [](const Finding& f) {
        return f.severity == Severity::error;
    }));
}

std::size_t ValidationReport::warning_count() const { return findings.size() - error_count(); }

bool ValidationReport::has(FindingCode code) const {
    return std::any_of(findings.begin(), findings.end(),
                       [code](const Finding& f) { return f.code == code; });
}

std::string ValidationReport::to_text() const {
    std::ostringstream out;
    for (const auto& f : findings) {
        out << (f.line > 0 ? "line " + std::to_string(f.line) : std::string("file")) << ": "
            << (f.severity == Severity::error ? "error" : "warning") << " ["
            << finding_code_name(f.code) << "] " << f.message << "\n";
    }
    return out.str();
}

ParseResult parse_submission(std::string_view raw, const RoundSpec& round, std::string_view alias,
                             const ParseOptions& options) {
    ReportBuilder report;

    if (!is_valid_alias(alias))
        report.error(FindingCode::invalid_alias, 0, "alias '" + std::string(alias) + "' is not a valid pseudonym");
    else if (is_reserved_alias(alias) && !options.allow_reserved_alias)
        report.error(FindingCode::reserved_alias, 0,
                     "alias '" + std::string(alias) + "' is reserved for hub-generated forecasts");

    if (!valid_utf8(raw)) {
        report.error(FindingCode::invalid_encoding, 0, "file is not valid UTF-8");
        return {std::nullopt, report.take()};
    }
    if (raw.starts_with("\xEF\xBB\xBF")) raw.remove_prefix(3);

    // Split into lines, remembering 1-based line numbers.
    std::vector<std::pair<int, std::string_view>> lines;
    {
        int number = 0;
        std::size_t start = 0;
        while (start <= raw.size()) {
            const auto pos = raw.find('\n', start);
            auto line = raw.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
            ++number;
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            if (!is_blank(line)) lines.emplace_back(number, line);
            if (pos == std::string_view::npos) break;
            start = pos + 1;
        }
    }

    if (lines.empty()) {
        report.error(FindingCode::empty_file, 0, "file contains no header and no rows");
        return {std::nullopt, report.take()};
    }

    const auto header = split_fields(lines.front().second);
    if (!std::equal(header.begin(), header.end(), kColumns.begin(), kColumns.end())) {
        report.error(FindingCode::header_mismatch, lines.front().first, describe_header_problem(header));
        return {std::nullopt, report.take()};
    }

    std::map<CellKey, int> seen;  // cell -> first line
    std::vector<QuantileForecast> rows;

    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto [line_no, line] = lines[li];
        const auto fields = split_fields(line);
        if (fields.size() != kNumColumns) {
            report.error(FindingCode::field_count, line_no,
                         "expected " + std::to_string(kNumColumns) + " comma-separated fields, found " +
                             std::to_string(fields.size()) + " (decimal separator must be '.')");
            continue;
        }
        bool row_ok = true;

        const auto date = parse_date(fields[0]);
        if (!date) {
            report.error(FindingCode::bad_date, line_no,
                         "forecast_date '" + std::string(fields[0]) + "' is not a YYYY-MM-DD date");
            row_ok = false;
        } else if (*date != round.round_date) {
            report.error(FindingCode::wrong_forecast_date, line_no,
                         "forecast_date " + format_date(*date) + " does not match round " +
                             format_date(round.round_date));
            row_ok = false;
        }

        const auto target = parse_target(fields[1]);
        std::optional<Horizon> horizon;
        if (!target) {
            report.error(FindingCode::unknown_target, line_no,
                         "unknown target '" + std::string(fields[1]) + "' (expected DAX, temperature or wind)");
            row_ok = false;
        } else {
            horizon = find_horizon(*target, fields[2]);
            if (!horizon) {
                report.error(FindingCode::unknown_horizon, line_no,
                             "horizon '" + std::string(fields[2]) + "' is not defined for target " +
                                 std::string(fields[1]));
                row_ok = false;
            }
            if (!round.has_target(*target)) {
                report.error(FindingCode::target_not_in_round, line_no,
                             "target " + std::string(fields[1]) + " is not forecast in round " +
                                 format_date(round.round_date));
                row_ok = false;
            }
        }

        if (target && horizon) {
            const CellKey key{*target, horizon->magnitude};
            const auto [it, inserted] = seen.emplace(key, line_no);
            if (!inserted) {
                report.error(FindingCode::duplicate_row, line_no,
                             "duplicate row for " + key.label() + " (first seen on line " +
                                 std::to_string(it->second) + ")");
                row_ok = false;
            }
        }

        QuantileVector q{};
        bool numbers_ok = true;
        for (std::size_t k = 0; k < kNumLevels; ++k) {
            const auto field = fields[3 + k];
            switch (parse_number(field, q[k])) {
            case NumberStatus::ok: break;
            case NumberStatus::non_numeric:
                report.error(FindingCode::non_numeric, line_no,
                             std::string(kColumns[3 + k]) + " value '" + std::string(field) + "' is not a number");
                numbers_ok = false;
                break;
            case NumberStatus::non_finite:
                report.error(FindingCode::non_finite, line_no,
                             std::string(kColumns[3 + k]) + " value '" + std::string(field) + "' is not finite");
                numbers_ok = false;
                break;
            }
        }

        if (numbers_ok && !is_monotone(q)) {
            if (options.repair_sort) {
                std::sort(q.begin(), q.end());
                report.warning(FindingCode::repaired_sort, line_no,
                               "quantiles were not non-decreasing; re-sorted ascending");
            } else {
                report.error(FindingCode::non_monotone, line_no,
                             "quantiles must be non-decreasing from q0.025 to q0.975");
                numbers_ok = false;
            }
        }
        if (numbers_ok && target == TargetKind::wind && q[kQ025] < 0.0) {
            report.warning(FindingCode::negative_wind, line_no,
                           "negative wind speed quantile; it will be treated as 0 when scoring");
        }

        if (row_ok && numbers_ok) rows.push_back({*target, *horizon, *date, q});
    }

    if (!options.allow_partial) {
        for (auto kind : round.targets) {
            for (const auto& h : Target{kind}.horizons()) {
                const CellKey key{kind, h.magnitude};
                if (!seen.contains(key))
                    report.error(FindingCode::missing_row, 0, "missing row for " + key.label());
            }
        }
    }

    auto result_report = report.take();
    if (result_report.verdict() == Verdict::rejected) return {std::nullopt, std::move(result_report)};

    std::sort(rows.begin(), rows.end(),
              [](const QuantileForecast& a, const QuantileForecast& b) { return a.cell() < b.cell(); });
    return {SubmissionFile{std::string(alias), round.round_date, std::move(rows)}, std::move(result_report)};
}

std::string format_number(double v) {
    if (v == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string serialize_submission(const SubmissionFile& sub) {
    auto rows = sub.rows;
    std::stable_sort(rows.begin(), rows.end(),
                     [](const QuantileForecast& a, const QuantileForecast& b) { return a.cell() < b.cell(); });
    std::string out(kSubmissionHeader);
    out += '\n';
    const auto date = format_date(sub.round_date);
    for (const auto& row : rows) {
        out += date;
        out += ',';
        out += target_name(row.target);
        out += ',';
        out += row.horizon.label();
        for (double v : row.quantiles) {
            out += ',';
            out += format_number(v);
        }
        out += '\n';
    }
    return out;
}

std::optional<SubmissionFileName> parse_submission_filename(std::string_view filename) {
    if (filename.size() < 8 + 1 + 1 + 4 || !filename.ends_with(".csv") || filename[8] != '_')
        return std::nullopt;
    const auto date = parse_compact_date(filename.substr(0, 8));
    if (!date) return std::nullopt;
    const auto alias = filename.substr(9, filename.size() - 9 - 4);
    if (!is_valid_alias(alias)) return std::nullopt;
    return SubmissionFileName{*date, std::string(alias)};
}

std::string submission_filename(Date round_date, std::string_view alias) {
    return format_compact_date(round_date) + "_" + std::string(alias) + ".csv";
}

} // namespace qhub
