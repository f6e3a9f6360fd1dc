#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qhub/core.hpp"

namespace qhub {

/// Header line of every submission file, byte for byte.
inline constexpr std::string_view kSubmissionHeader =
    "forecast_date,target,horizon,q0.025,q0.25,q0.5,q0.75,q0.975";

/// Aliases reserved for forecasts the hub generates itself.
inline constexpr std::string_view kBenchmarkAlias = "benchmark";
inline constexpr std::string_view kEmosAlias = "emos";
inline constexpr std::string_view kEnsembleMeanAlias = "ensemble_mean";
inline constexpr std::string_view kEnsembleMedianAlias = "ensemble_median";

bool is_reserved_alias(std::string_view alias);
bool is_valid_alias(std::string_view alias);

struct SubmissionFile {
    std::string participant_alias;
    Date round_date;
    /// Canonical order: DAX horizons ascending, then temperature, then wind.
    std::vector<QuantileForecast> rows;

    friend bool operator==(const SubmissionFile&, const SubmissionFile&) = default;
};

enum class Severity { error, warning };

/// Machine-readable finding codes. Names are stable; they appear in reports and JSON.
enum class FindingCode {
    invalid_encoding,
    empty_file,
    header_mismatch,
    field_count,
    bad_date,
    wrong_forecast_date,
    unknown_target,
    target_not_in_round,
    unknown_horizon,
    duplicate_row,
    missing_row,
    non_numeric,
    non_finite,
    non_monotone,
    negative_wind,
    repaired_sort,
    reserved_alias,
    invalid_alias,
};

std::string_view finding_code_name(FindingCode code);

struct Finding {
    Severity severity = Severity::error;
    FindingCode code = FindingCode::empty_file;
    /// 1-based line number in the file; 0 for file-level findings (e.g. a missing row).
    int line = 0;
    std::string message;
};

enum class Verdict { accepted, rejected };

struct ValidationReport {
    std::vector<Finding> findings;

    Verdict verdict() const;
    std::size_t error_count() const;
    std::size_t warning_count() const;
    bool has(FindingCode code) const;
    /// Human-readable multi-line rendering, one finding per line.
    std::string to_text() const;
};

struct ParseOptions {
    /// Sort non-monotone quantile rows instead of rejecting them (organizer-only).
    bool repair_sort = false;
    /// Accept the hub's own reserved aliases.
    bool allow_reserved_alias = false;
    /// Do not require every (target, horizon) of the round to be present. Used for files the
    /// hub generates, where some cells may be unavailable.
    bool allow_partial = false;
};

struct ParseResult {
    /// Present iff the report's verdict is accepted.
    std::optional<SubmissionFile> submission;
    ValidationReport report;
};

/// Parses and validates raw submission bytes for the given round. Total: never throws on any
/// byte input, and lists every problem found rather than stopping at the first.
ParseResult parse_submission(std::string_view raw, const RoundSpec& round, std::string_view alias,
                             const ParseOptions& options = {});

/// Renders a submission in the canonical CSV layout with LF line endings.
std::string serialize_submission(const SubmissionFile& sub);

/// Shortest decimal representation that round-trips to the same double.
std::string format_number(double v);

struct SubmissionFileName {
    Date round_date;
    std::string alias;
};

/// Splits `<YYYYMMDD>_<alias>.csv`; nullopt when the name does not follow the pattern.
std::optional<SubmissionFileName> parse_submission_filename(std::string_view filename);
std::string submission_filename(Date round_date, std::string_view alias);

} // namespace qhub
