#include "qhub/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "qhub/error.hpp"
#include "qhub/submission_io.hpp"
#include "text_util.hpp"

namespace qhub {

double quantile_score(double alpha, double q, double y) {
    const double indicator = y < q ? 1.0 : 0.0;
    return 2.0 * (indicator - alpha) * (q - y);
}

double crps_approx(const QuantileVector& q, double y) {
    double sum = 0.0;
    for (std::size_t i = 0; i < kNumLevels; ++i) sum += quantile_score(QuantileLevels::at(i), q[i], y);
    return sum / static_cast<double>(kNumLevels);
}

double crps_approx(const QuantileForecast& fc, double y) { return crps_approx(fc.quantiles, y); }

IntervalMetrics interval_metrics(const QuantileVector& q, double y) {
    IntervalMetrics m;
    m.covered_50 = q[kQ25] <= y && y <= q[kQ75];
    m.covered_95 = q[kQ025] <= y && y <= q[kQ975];
    m.len_50 = q[kQ75] - q[kQ25];
    m.len_95 = q[kQ975] - q[kQ025];
    m.abs_error = std::abs(q[kQ50] - y);
    return m;
}

IntervalMetrics interval_metrics(const QuantileForecast& fc, double y) { return interval_metrics(fc.quantiles, y); }

ScoreRecord score_forecast(const std::string& participant, const QuantileForecast& fc, double y) {
    QuantileVector q = fc.quantiles;
    if (fc.target == TargetKind::wind)
        for (auto& v : q) v = std::max(v, 0.0);

    ScoreRecord r;
    r.participant = participant;
    r.target = fc.target;
    r.horizon = fc.horizon.magnitude;
    r.round_date = fc.round_date;
    double sum = 0.0;
    for (std::size_t i = 0; i < kNumLevels; ++i) {
        r.quantile_scores[i] = quantile_score(QuantileLevels::at(i), q[i], y);
        sum += r.quantile_scores[i];
    }
    r.mean_quantile_score = sum / static_cast<double>(kNumLevels);
    const auto m = interval_metrics(q, y);
    r.abs_error = m.abs_error;
    r.covered_50 = m.covered_50;
    r.covered_95 = m.covered_95;
    r.len_50 = m.len_50;
    r.len_95 = m.len_95;
    return r;
}

CoverageRates coverage_rate(std::span<const ScoreRecord> records) {
    if (records.empty()) throw DomainError("coverage needs at least one record");
    const auto& first = records.front();
    std::size_t in50 = 0, in95 = 0;
    for (const auto& r : records) {
        if (r.participant != first.participant || r.cell() != first.cell())
            throw DomainError("coverage records must share participant, target and horizon");
        in50 += r.covered_50;
        in95 += r.covered_95;
    }
    const double n = static_cast<double>(records.size());
    return {100.0 * static_cast<double>(in50) / n, 100.0 * static_cast<double>(in95) / n, records.size()};
}

double skill_score(double mean_score, double bench_mean_score) {
    if (!(bench_mean_score > 0.0))
        throw DataError("benchmark mean score must be positive to form a skill score");
    return 1.0 - mean_score / bench_mean_score;
}

std::vector<AggregateScore> aggregate(std::span<const ScoreRecord> records,
                                      std::span<const ScoreRecord> benchmark_records) {
    std::map<std::pair<CellKey, Date>, double> bench;
    for (const auto& b : benchmark_records) bench[{b.cell(), b.round_date}] = b.mean_quantile_score;

    std::map<std::pair<std::string, CellKey>, std::vector<const ScoreRecord*>> groups;
    for (const auto& r : records) groups[{r.participant, r.cell()}].push_back(&r);

    std::vector<AggregateScore> out;
    for (const auto& [key, recs] : groups) {
        double sum = 0.0, bench_sum = 0.0;
        for (const auto* r : recs) {
            const auto it = bench.find({r->cell(), r->round_date});
            if (it == bench.end())
                throw DataError("benchmark has no score for " + r->cell().label() + " in round " +
                                format_date(r->round_date));
            sum += r->mean_quantile_score;
            bench_sum += it->second;
        }
        const double n = static_cast<double>(recs.size());
        AggregateScore a;
        a.participant = key.first;
        a.target = key.second.target;
        a.horizon = key.second.horizon;
        a.n_rounds = static_cast<int>(recs.size());
        a.mean_score = sum / n;
        a.bench_mean_score = bench_sum / n;
        a.skill = skill_score(a.mean_score, a.bench_mean_score);
        out.push_back(a);
    }
    return out;
}

double round_percent(double v) { return std::round(v * 10.0) / 10.0; }

double round_score(double v) {
    if (v == 0.0 || !std::isfinite(v)) return v;
    const double magnitude = std::floor(std::log10(std::abs(v)));
    const double factor = std::pow(10.0, 3.0 - magnitude);
    return std::round(v * factor) / factor;
}

namespace {

constexpr std::string_view kRecordHeader =
    "participant,target,horizon,round_date,qs_0.025,qs_0.25,qs_0.5,qs_0.75,qs_0.975,"
    "mean_quantile_score,abs_error,covered_50,covered_95,len_50,len_95,imputed";

} // namespace

std::string score_records_csv(std::span<const ScoreRecord> records) {
    std::ostringstream out;
    out << kRecordHeader << "\n";
    for (const auto& r : records) {
        out << r.participant << ',' << target_name(r.target) << ',' << horizon_of(r.cell()).label() << ','
            << format_date(r.round_date);
        for (double q : r.quantile_scores) out << ',' << format_number(q);
        out << ',' << format_number(r.mean_quantile_score) << ',' << format_number(r.abs_error) << ','
            << (r.covered_50 ? 1 : 0) << ',' << (r.covered_95 ? 1 : 0) << ',' << format_number(r.len_50) << ','
            << format_number(r.len_95) << ',' << (r.imputed ? 1 : 0) << "\n";
    }
    return out.str();
}

std::vector<ScoreRecord> parse_score_records_csv(std::string_view text) {
    const auto lines = detail::numbered_lines(text);
    if (lines.empty() || lines.front().second != kRecordHeader) throw InputError("score record header mismatch", 1);
    std::vector<ScoreRecord> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto [no, line] = lines[i];
        const auto f = detail::split(line, ',');
        if (f.size() != 16) throw InputError("expected 16 fields", no);
        ScoreRecord r;
        r.participant = std::string(f[0]);
        const auto target = parse_target(f[1]);
        if (!target) throw InputError("unknown target", no);
        const auto h = find_horizon(*target, f[2]);
        if (!h) throw InputError("unknown horizon", no);
        const auto date = parse_date(f[3]);
        if (!date) throw InputError("malformed round date", no);
        r.target = *target;
        r.horizon = h->magnitude;
        r.round_date = *date;
        auto num = [&](std::size_t k) {
            const auto v = detail::parse_double(f[k]);
            if (!v) throw InputError("malformed number in column " + std::to_string(k + 1), no);
            return *v;
        };
        for (std::size_t k = 0; k < kNumLevels; ++k) r.quantile_scores[k] = num(4 + k);
        r.mean_quantile_score = num(9);
        r.abs_error = num(10);
        r.covered_50 = f[11] == "1";
        r.covered_95 = f[12] == "1";
        r.len_50 = num(13);
        r.len_95 = num(14);
        r.imputed = f[15] == "1";
        out.push_back(std::move(r));
    }
    return out;
}

std::string aggregate_scores_csv(std::span<const AggregateScore> scores) {
    std::ostringstream out;
    out << "participant,target,horizon,n_rounds,mean_score,bench_mean_score,skill\n";
    for (const auto& a : scores) {
        out << a.participant << ',' << target_name(a.target) << ',' << horizon_of(a.cell()).label() << ','
            << a.n_rounds << ',' << format_number(a.mean_score) << ',' << format_number(a.bench_mean_score) << ','
            << format_number(a.skill) << "\n";
    }
    return out.str();
}

} // namespace qhub
