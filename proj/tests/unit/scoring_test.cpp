#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qhub/error.hpp"
#include "qhub/scoring.hpp"

using namespace qhub;

namespace {

QuantileForecast forecast(TargetKind t, int h, QuantileVector q, Date round = make_date(2021, 11, 3)) {
    return {t, *find_horizon(t, h), round, q};
}

ScoreRecord record(const std::string& who, TargetKind t, int h, Date round, double score) {
    ScoreRecord r;
    r.participant = who;
    r.target = t;
    r.horizon = h;
    r.round_date = round;
    r.quantile_scores.fill(score);
    r.mean_quantile_score = score;
    return r;
}

} // namespace

TEST(QuantileScore, WorkedValues) {
    EXPECT_DOUBLE_EQ(quantile_score(0.5, 1.0, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(quantile_score(0.25, 2.0, -1.0), 4.5);
    EXPECT_DOUBLE_EQ(quantile_score(0.25, 2.0, 5.0), 1.5);
    EXPECT_NEAR(quantile_score(0.975, 0.0, 1.0), 1.95, 1e-15);
    EXPECT_NEAR(quantile_score(0.975, 1.0, 0.0), 0.05, 1e-15);
    EXPECT_GE(quantile_score(0.025, -3.0, 4.0), 0.0);
}

TEST(QuantileScore, DegenerateForecastGivesAbsoluteError) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-50, 50);
    for (int i = 0; i < 200; ++i) {
        const double c = u(rng), y = u(rng);
        QuantileVector q;
        q.fill(c);
        EXPECT_NEAR(crps_approx(q, y), std::abs(c - y), 1e-12);
    }
}

TEST(QuantileScore, ScaleEquivariant) {
    const QuantileVector q{-1.8, -0.3, 0.1, 0.6, 1.7};
    QuantileVector scaled;
    for (std::size_t i = 0; i < kNumLevels; ++i) scaled[i] = 3.0 * q[i];
    EXPECT_NEAR(crps_approx(scaled, 1.5), 3.0 * crps_approx(q, 0.5), 1e-12);
}

TEST(IntervalMetrics, WorkedExample) {
    const auto m = interval_metrics(QuantileVector{-1.8, -0.3, 0.1, 0.6, 1.7}, 0.5);
    EXPECT_TRUE(m.covered_50);
    EXPECT_TRUE(m.covered_95);
    EXPECT_NEAR(m.len_50, 0.9, 1e-12);
    EXPECT_NEAR(m.len_95, 3.5, 1e-12);
    EXPECT_NEAR(m.abs_error, 0.4, 1e-12);
}

TEST(IntervalMetrics, EndpointsCountAsCovered) {
    const QuantileVector q{-2, -1, 0, 1, 2};
    EXPECT_TRUE(interval_metrics(q, 1.0).covered_50);
    EXPECT_TRUE(interval_metrics(q, -2.0).covered_95);
    EXPECT_FALSE(interval_metrics(q, 1.0000001).covered_50);
    EXPECT_FALSE(interval_metrics(q, 2.5).covered_95);
}

TEST(ScoreForecast, WindBelowZeroIsScoredAsZero) {
    const auto raw = score_forecast("a", forecast(TargetKind::wind, 36, {-1, 1, 2, 3, 5}), 0.0);
    const auto clamped = score_forecast("a", forecast(TargetKind::wind, 36, {0, 1, 2, 3, 5}), 0.0);
    EXPECT_DOUBLE_EQ(raw.mean_quantile_score, clamped.mean_quantile_score);
    const auto temp = score_forecast("a", forecast(TargetKind::temperature, 36, {-1, 1, 2, 3, 5}), 0.0);
    EXPECT_NE(temp.mean_quantile_score, clamped.mean_quantile_score);
}

TEST(Coverage, PercentOfRecords) {
    std::vector<ScoreRecord> rs;
    for (int i = 0; i < 14; ++i) {
        auto r = record("a", TargetKind::dax, 1, add_days(make_date(2021, 11, 3), 7 * i), 1.0);
        r.covered_50 = i < 10;
        r.covered_95 = i < 13;
        rs.push_back(r);
    }
    const auto c = coverage_rate(rs);
    EXPECT_EQ(c.n, 14u);
    EXPECT_NEAR(round_percent(c.rate_50), 71.4, 1e-12);
    EXPECT_NEAR(round_percent(c.rate_95), 92.9, 1e-12);
    EXPECT_THROW(coverage_rate(std::span<const ScoreRecord>{}), DomainError);
    rs.push_back(record("b", TargetKind::dax, 1, make_date(2021, 11, 3), 1.0));
    EXPECT_THROW(coverage_rate(rs), DomainError);
}

TEST(Skill, Values) {
    EXPECT_DOUBLE_EQ(skill_score(0.8, 1.0), 0.19999999999999996);
    EXPECT_DOUBLE_EQ(skill_score(2.0, 2.0), 0.0);
    EXPECT_LT(skill_score(3.0, 2.0), 0.0);
    EXPECT_THROW(skill_score(1.0, 0.0), DataError);
}

TEST(Aggregate, MeansOverParticipantRoundsAndSelfSkillIsZero) {
    const Date r1 = make_date(2021, 11, 3), r2 = make_date(2021, 11, 10), r3 = make_date(2021, 11, 17);
    std::vector<ScoreRecord> bench{record("benchmark", TargetKind::dax, 1, r1, 2.0),
                                   record("benchmark", TargetKind::dax, 1, r2, 4.0),
                                   record("benchmark", TargetKind::dax, 1, r3, 6.0)};
    std::vector<ScoreRecord> recs{record("a", TargetKind::dax, 1, r1, 1.0), record("a", TargetKind::dax, 1, r3, 3.0)};
    const auto agg = aggregate(recs, bench);
    ASSERT_EQ(agg.size(), 1u);
    EXPECT_EQ(agg[0].n_rounds, 2);
    EXPECT_DOUBLE_EQ(agg[0].mean_score, 2.0);
    EXPECT_DOUBLE_EQ(agg[0].bench_mean_score, 4.0);
    EXPECT_DOUBLE_EQ(agg[0].skill, 0.5);

    const auto self = aggregate(bench, bench);
    ASSERT_EQ(self.size(), 1u);
    EXPECT_DOUBLE_EQ(self[0].skill, 0.0);

    recs.push_back(record("a", TargetKind::dax, 1, make_date(2021, 11, 24), 1.0));
    EXPECT_THROW(aggregate(recs, bench), DataError);
}

TEST(ScoreRecordsCsv, RoundTrips) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-5, 5);
    std::vector<ScoreRecord> rs;
    for (const auto& cell : all_cells()) {
        QuantileVector q;
        for (auto& v : q) v = u(rng);
        std::sort(q.begin(), q.end());
        if (cell.target == TargetKind::wind)
            for (auto& v : q) v = std::abs(v);
        std::sort(q.begin(), q.end());
        auto fc = QuantileForecast{cell.target, horizon_of(cell), make_date(2021, 12, 1), q};
        rs.push_back(score_forecast("zeta_" + std::to_string(cell.horizon), fc, u(rng)));
    }
    rs[2].imputed = true;
    const auto back = parse_score_records_csv(score_records_csv(rs));
    ASSERT_EQ(back.size(), rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) {
        EXPECT_EQ(back[i].participant, rs[i].participant);
        EXPECT_EQ(back[i].cell(), rs[i].cell());
        EXPECT_EQ(back[i].round_date, rs[i].round_date);
        EXPECT_EQ(back[i].quantile_scores, rs[i].quantile_scores);
        EXPECT_EQ(back[i].mean_quantile_score, rs[i].mean_quantile_score);
        EXPECT_EQ(back[i].covered_50, rs[i].covered_50);
        EXPECT_EQ(back[i].len_95, rs[i].len_95);
        EXPECT_EQ(back[i].imputed, rs[i].imputed);
    }
    EXPECT_THROW(parse_score_records_csv("nope\n"), InputError);
}

TEST(DisplayRounding, Digits) {
    EXPECT_DOUBLE_EQ(round_percent(71.428571), 71.4);
    EXPECT_DOUBLE_EQ(round_score(1.234567), 1.235);
    EXPECT_DOUBLE_EQ(round_score(0.00123456), 0.001235);
}
