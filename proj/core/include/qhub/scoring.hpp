#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qhub/core.hpp"

namespace qhub {

/// Linear quantile score 2 * (1{y < q} - alpha) * (q - y).
double quantile_score(double alpha, double q, double y);

/// Mean quantile score over the five levels; approximates the CRPS.
double crps_approx(const QuantileVector& q, double y);
double crps_approx(const QuantileForecast& fc, double y);

struct IntervalMetrics {
    bool covered_50 = false;
    bool covered_95 = false;
    double len_50 = 0.0;
    double len_95 = 0.0;
    double abs_error = 0.0;
};

/// Central 50% and 95% interval coverage (closed intervals), their lengths, and |median - y|.
IntervalMetrics interval_metrics(const QuantileVector& q, double y);
IntervalMetrics interval_metrics(const QuantileForecast& fc, double y);

struct ScoreRecord {
    std::string participant;
    TargetKind target = TargetKind::dax;
    int horizon = 0;
    Date round_date;
    QuantileVector quantile_scores{};
    double mean_quantile_score = 0.0;
    double abs_error = 0.0;
    bool covered_50 = false;
    bool covered_95 = false;
    double len_50 = 0.0;
    double len_95 = 0.0;
    bool imputed = false;

    CellKey cell() const { return {target, horizon}; }
};

/// Scores one forecast against its observation. Wind quantiles below zero are scored as zero.
ScoreRecord score_forecast(const std::string& participant, const QuantileForecast& fc, double y);

struct CoverageRates {
    double rate_50 = 0.0;  // percent
    double rate_95 = 0.0;  // percent
    std::size_t n = 0;
};

/// Percentage of records whose outcome fell inside the 50% / 95% intervals. Records must share
/// participant, target and horizon; throws DomainError on an empty or mixed input.
CoverageRates coverage_rate(std::span<const ScoreRecord> records);

/// 1 - mean_score / bench_mean_score. Throws DataError when the benchmark score is not positive.
double skill_score(double mean_score, double bench_mean_score);

struct AggregateScore {
    std::string participant;
    TargetKind target = TargetKind::dax;
    int horizon = 0;
    int n_rounds = 0;
    double mean_score = 0.0;
    double bench_mean_score = 0.0;
    double skill = 0.0;

    CellKey cell() const { return {target, horizon}; }
};

/// Per (participant, target, horizon) mean over the rounds the participant was scored in, with
/// skill against the benchmark's mean over the same rounds. Throws DataError when the
/// benchmark lacks a round the participant has.
std::vector<AggregateScore> aggregate(std::span<const ScoreRecord> records,
                                      std::span<const ScoreRecord> benchmark_records);

/// Display rounding: one decimal for percentages, four significant digits for scores.
double round_percent(double v);
double round_score(double v);

std::string score_records_csv(std::span<const ScoreRecord> records);
std::string aggregate_scores_csv(std::span<const AggregateScore> scores);
/// Inverse of score_records_csv. Throws InputError on malformed content.
std::vector<ScoreRecord> parse_score_records_csv(std::string_view text);

} // namespace qhub
