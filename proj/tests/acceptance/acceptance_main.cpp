// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "oracles.hpp"
#include "qhub/benchmarks.hpp"
#include "qhub/ensemble.hpp"
#include "qhub/ranking.hpp"
#include "qhub/scoring.hpp"
#include "qhub/submission_io.hpp"

using namespace qhub;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Context {
    fs::path hub;
    fs::path fixtures;
    fs::path work;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fmt(double v, int digits = 3) {
    std::ostringstream ss;
    ss.precision(digits);
    ss << v;
    return ss.str();
}

// ---------------------------------------------------------------------------------------------

Outcome qs_propriety(const Context&) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(101);
    std::normal_distribution<double> n01(0.0, 1.0);
    std::vector<double> y(100000);
    for (auto& v : y) v = n01(rng);

    double worst_gap = 0.0;
    bool ok = true;
    for (double alpha : QuantileLevels::values) {
        double best_q = 0.0, best = std::numeric_limits<double>::infinity();
        for (int k = -30; k <= 30; ++k) {
            const double q = k / 10.0;
            double sum = 0.0;
            for (double v : y) sum += quantile_score(alpha, q, v);
            if (sum < best) {
                best = sum;
                best_q = q;
            }
        }
        const double truth = testing::bisect([](double z) { return testing::phi_cdf(z); }, alpha, -10, 10);
        const double gap = std::abs(best_q - truth);
        worst_gap = std::max(worst_gap, gap);
        ok = ok && gap <= 0.1 + 1e-12;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {ok && secs < 10.0, "max |argmin - true quantile| = " + fmt(worst_gap) + " (limit 0.1), " +
                                   fmt(secs) + " s (limit 10 s)"};
}

Outcome degenerate_identity(const Context&) {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double c = u(rng), y = u(rng);
        QuantileVector q;
        q.fill(c);
        worst = std::max(worst, std::abs(crps_approx(q, y) - std::abs(c - y)));
    }
    return {worst <= 1e-12, "max deviation " + fmt(worst) + " over 1000 pairs (limit 1e-12)"};
}

Outcome crps_vs_quadrature(const Context&) {
    const double mus[] = {-2.0, -0.5, 0.0, 1.0, 3.0};
    const double sigmas[] = {0.2, 0.5, 1.0, 2.0, 4.0};
    const double ys[] = {-1.0, 0.0, 0.5, 2.0, 5.0};
    double worst_n = 0.0, worst_t = 0.0;
    for (double mu : mus)
        for (double s : sigmas)
            for (double y : ys) {
                worst_n = std::max(worst_n, std::abs(crps_closed_form(EmosFamily::normal, mu, s, y) -
                                                     testing::normal_crps_quadrature(mu, s, y)));
                worst_t = std::max(worst_t, std::abs(crps_closed_form(EmosFamily::truncated_normal, mu, s, y) -
                                                     testing::truncated_crps_quadrature(mu, s, y)));
            }
    return {worst_n <= 1e-6 && worst_t <= 1e-6,
            "max error normal " + fmt(worst_n) + ", truncated " + fmt(worst_t) + " on 125 points (limit 1e-6)"};
}

Outcome emos_recovery(const Context&) {
    std::mt19937_64 rng(303);
    std::normal_distribution<double> mean_dist(8.0, 4.0), eps(0.0, 1.0);
    std::uniform_real_distribution<double> var_dist(0.5, 2.5);
    std::vector<EmosTrainingPair> train;
    for (int i = 0; i < 5000; ++i) {
        const double m = mean_dist(rng);
        train.push_back({m, var_dist(rng), 0.5 + 0.9 * m + 1.2 * eps(rng)});
    }
    const auto p = emos_fit(train, EmosFamily::normal);
    double worst_sigma = 0.0;
    for (const auto& t : train) worst_sigma = std::max(worst_sigma, std::abs(p.scale(t.ens_variance) - 1.2));
    const bool recovered = std::abs(p.a - 0.5) <= 0.05 && std::abs(p.b - 0.9) <= 0.05 && worst_sigma <= 0.1;

    // Biased, underdispersed 40-member ensemble: fit on one sample, evaluate out of sample.
    auto draw = [&](int n) {
        std::vector<std::pair<std::vector<double>, double>> out;
        std::normal_distribution<double> truth(10.0, 5.0);
        for (int i = 0; i < n; ++i) {
            const double x = truth(rng);
            const double y = x + 1.5 * eps(rng);
            std::vector<double> members(40);
            for (auto& m : members) m = x + 2.0 + 0.5 * eps(rng);
            out.emplace_back(std::move(members), y);
        }
        return out;
    };
    auto moments = [](const std::vector<double>& v) {
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return std::pair{mean, ss / (v.size() - 1)};
    };
    std::vector<EmosTrainingPair> biased_train;
    for (const auto& [members, y] : draw(1000)) {
        const auto [m, v] = moments(members);
        biased_train.push_back({m, v, y});
    }
    const auto biased = emos_fit(biased_train, EmosFamily::normal);
    double emos_score = 0.0, raw_score = 0.0;
    const auto test = draw(1000);
    for (const auto& [members, y] : test) {
        const auto [m, v] = moments(members);
        emos_score += crps_approx(emos_quantiles(biased, m, v), y);
        raw_score += crps_approx(empirical_quantiles(members), y);
    }
    emos_score /= test.size();
    raw_score /= test.size();
    return {recovered && emos_score < raw_score,
            "a=" + fmt(p.a, 4) + " b=" + fmt(p.b, 4) + " max|sigma-1.2|=" + fmt(worst_sigma, 3) +
                "; out-of-sample score emos " + fmt(emos_score, 4) + " vs raw ensemble " + fmt(raw_score, 4)};
}

// ---------------------------------------------------------------------------------------------

bool run(const std::string& cmd) {
    const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
    if (rc != 0) std::cerr << "command failed (" << rc << "): " << cmd << "\n";
    return rc == 0;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

/// Drives the hub CLI through the whole bundled season into `store`.
bool run_season_cli(const Context& ctx, const fs::path& store) {
    const auto season = ctx.fixtures / "season";
    fs::remove_all(store);
    const auto hub = q(ctx.hub) + " --store " + q(store);
    if (!run(hub + " init --config " + q(season / "hub.conf"))) return false;
    if (!run(hub + " load-prices " + q(season / "prices.csv"))) return false;
    for (const char* t : {"temperature", "wind"})
        if (!run(hub + " load-observations " + t + " " + q(season / ("observations_" + std::string(t) + ".csv"))))
            return false;
    if (!run(hub + " load-nwp " + q(season / "nwp") + "/*.txt")) return false;
    std::vector<fs::path> rounds;
    for (const auto& e : fs::directory_iterator(season / "submissions")) rounds.push_back(e.path());
    std::sort(rounds.begin(), rounds.end());
    for (const auto& dir : rounds) {
        const auto date = dir.filename().string();
        if (!run(hub + " open-round " + date)) return false;
        if (!run(hub + " ingest " + date + " " + q(dir))) return false;
        if (!run(hub + " score " + date)) return false;
    }
    return run(hub + " leaderboard");
}

struct CoverageRow {
    const char* target;
    const char* horizon;
    double bench_50, ens_50, bench_95, ens_95;
};

// Target coverage percentages for the benchmark and the mean ensemble.
const CoverageRow kCoverage[] = {
    {"DAX", "1 day", 71.4, 71.4, 100.0, 100.0},          {"DAX", "2 day", 50.0, 42.9, 92.9, 92.9},
    {"DAX", "5 day", 50.0, 50.0, 92.9, 85.7},            {"DAX", "6 day", 35.7, 35.7, 100.0, 85.7},
    {"DAX", "7 day", 53.8, 46.2, 100.0, 100.0},          {"temperature", "36 hour", 15.4, 30.8, 61.5, 92.3},
    {"temperature", "48 hour", 46.2, 76.9, 92.3, 100.0}, {"temperature", "60 hour", 53.8, 76.9, 100.0, 100.0},
    {"temperature", "72 hour", 30.8, 53.8, 76.9, 92.3},  {"temperature", "84 hour", 69.2, 61.5, 92.3, 92.3},
    {"wind", "36 hour", 7.7, 61.5, 53.8, 100.0},         {"wind", "48 hour", 23.1, 46.2, 46.2, 92.3},
    {"wind", "60 hour", 30.8, 61.5, 61.5, 84.6},         {"wind", "72 hour", 30.8, 38.5, 53.8, 92.3},
    {"wind", "84 hour", 53.8, 30.8, 61.5, 92.3},
};

Outcome coverage_reproduction(const Context& ctx) {
    const auto store = ctx.work / "coverage_store";
    if (!run_season_cli(ctx, store)) return {false, "hub CLI pipeline failed"};
    const auto cov = json::parse(slurp(store / "analysis" / "coverage.json"));
    const auto sample = json::parse(slurp(store / "analysis" / "evaluation_sample.json"));
    auto find = [&](const std::string& alias, const std::string& t, const std::string& h) -> const json* {
        for (const auto& r : cov)
            if (r["alias"] == alias && r["target"] == t && r["horizon"] == h) return &r;
        return nullptr;
    };
    int matched = 0;
    std::string mismatches;
    for (const auto& row : kCoverage) {
        const auto* b = find("benchmark", row.target, row.horizon);
        const auto* e = find("ensemble_mean", row.target, row.horizon);
        const bool ok = b && e && (*b)["coverage_50_display"].get<double>() == row.bench_50 &&
                        (*b)["coverage_95_display"].get<double>() == row.bench_95 &&
                        (*e)["coverage_50_display"].get<double>() == row.ens_50 &&
                        (*e)["coverage_95_display"].get<double>() == row.ens_95;
        if (ok) ++matched;
        else mismatches += std::string(" ") + row.target + "/" + row.horizon;
    }
    const int pairs = sample["total_pairs"].get<int>();
    return {matched == 15 && pairs == 199, std::to_string(matched) + "/15 cells match at one decimal" +
                                               (mismatches.empty() ? "" : " (mismatch:" + mismatches + ")") +
                                               "; evaluation pairs " + std::to_string(pairs) + " (expected 199)"};
}

// ---------------------------------------------------------------------------------------------

struct OracleRanking {
    std::vector<std::string> order;
    /// Deepest cascade criterion that separates each participant from anyone it ties with.
    std::map<std::string, Tiebreak> tiebreak;
};

/// Cascade by exhaustive search: the unique permutation in which every adjacent pair is ordered.
OracleRanking brute_force_order(const std::vector<std::string>& names, const std::vector<CellKey>& cells,
                                           const std::vector<std::vector<double>>& scores, std::uint64_t seed) {
    const auto np = names.size();
    std::vector<double> avg(np, 0.0), best(np, 1e9), temp(np, 0.0);
    int n_temp = 0;
    for (const auto& c : cells) n_temp += c.target == TargetKind::temperature;
    for (std::size_t c = 0; c < cells.size(); ++c)
        for (std::size_t p = 0; p < np; ++p) {
            int better = 0, equal = 0;
            for (std::size_t o = 0; o < np; ++o) {
                better += scores[c][o] < scores[c][p];
                equal += scores[c][o] == scores[c][p];
            }
            const double r = 1.0 + better + (equal - 1) / 2.0;
            avg[p] += r / cells.size();
            best[p] = std::min(best[p], r);
            if (cells[c].target == TargetKind::temperature) temp[p] += r / n_temp;
        }
    auto sorted = names;
    std::sort(sorted.begin(), sorted.end());
    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> key(np);
    for (const auto& name : sorted) key[std::find(names.begin(), names.end(), name) - names.begin()] = rng();

    auto before = [&](std::size_t a, std::size_t b) {
        if (std::abs(avg[a] - avg[b]) > 1e-9) return avg[a] < avg[b];
        if (best[a] != best[b]) return best[a] < best[b];
        if (n_temp > 0 && std::abs(temp[a] - temp[b]) > 1e-9) return temp[a] < temp[b];
        return key[a] < key[b];
    };
    OracleRanking out;
    for (std::size_t p = 0; p < np; ++p) {
        Tiebreak t = Tiebreak::none;
        for (std::size_t o = 0; o < np; ++o) {
            if (o == p || std::abs(avg[o] - avg[p]) > 1e-9) continue;
            Tiebreak here = Tiebreak::best_rank;
            if (best[o] == best[p]) here = (n_temp > 0 && std::abs(temp[o] - temp[p]) > 1e-9) ? Tiebreak::temperature_rank
                                                                                            : Tiebreak::coin_flip;
            t = std::max(t, here);
        }
        out.tiebreak[names[p]] = t;
    }
    std::vector<std::size_t> perm(np);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        bool ordered = true;
        for (std::size_t i = 0; i + 1 < np && ordered; ++i) ordered = before(perm[i], perm[i + 1]);
        if (ordered) {
            for (auto i : perm) out.order.push_back(names[i]);
            return out;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

Outcome ranking_oracle(const Context&) {
    const std::vector<CellKey> pool{{TargetKind::dax, 1}, {TargetKind::temperature, 36}, {TargetKind::wind, 36}};
    const std::vector<std::string> all_names{"delta", "alpha", "charlie", "bravo"};
    long instances = 0, order_mismatch = 0, label_mismatch = 0, skill_mismatch = 0;
    for (std::size_t np = 1; np <= 4; ++np) {
        const std::vector<std::string> names(all_names.begin(), all_names.begin() + np);
        for (unsigned mask = 1; mask < 8; ++mask) {
            std::vector<CellKey> cells;
            for (unsigned b = 0; b < 3; ++b)
                if (mask & (1u << b)) cells.push_back(pool[b]);
            const std::size_t n_values = np * cells.size();
            long total = 1;
            for (std::size_t i = 0; i < n_values; ++i) total *= 3;
            for (long code = 0; code < total; ++code) {
                ScoreMatrix sm{names, cells, std::vector<std::vector<double>>(cells.size(), std::vector<double>(np))};
                long rest = code;
                for (std::size_t c = 0; c < cells.size(); ++c)
                    for (std::size_t p = 0; p < np; ++p) {
                        sm.values[c][p] = 1.0 + static_cast<double>(rest % 3);
                        rest /= 3;
                    }
                const std::uint64_t seed = 42 + static_cast<std::uint64_t>(code % 2);
                const auto entries = overall_ranking(rank_cells(sm), seed);
                const auto expected = brute_force_order(names, cells, sm.values, seed);
                std::vector<std::string> got;
                for (const auto& e : entries) {
                    got.push_back(e.alias);
                    if (e.tiebreak_applied != expected.tiebreak.at(e.alias)) ++label_mismatch;
                }
                if (got != expected.order) ++order_mismatch;

                // Skill against a positive benchmark mean orders a cell exactly as the mean score does.
                for (std::size_t c = 0; c < cells.size(); ++c) {
                    const double bench = 1.7 + 0.3 * static_cast<double>(c);
                    std::vector<double> skill(np);
                    for (std::size_t p = 0; p < np; ++p) skill[p] = skill_score(sm.values[c][p], bench);
                    if (fractional_ranks(skill, ScoreOrder::higher_is_better) !=
                        fractional_ranks(sm.values[c], ScoreOrder::lower_is_better))
                        ++skill_mismatch;
                }
                ++instances;
            }
        }
    }
    return {order_mismatch == 0 && label_mismatch == 0 && skill_mismatch == 0,
            std::to_string(instances) + " instances, " + std::to_string(order_mismatch) + " ordering, " +
                std::to_string(label_mismatch) + " tiebreak-label and " + std::to_string(skill_mismatch) +
                " skill/score rank mismatches"};
}

// ---------------------------------------------------------------------------------------------

Outcome ensemble_properties(const Context&) {
    std::mt19937_64 rng(404);
    std::normal_distribution<double> centre(5.0, 10.0);
    std::exponential_distribution<double> gap(0.7);
    std::uniform_int_distribution<int> count(1, 25);
    std::uniform_real_distribution<double> outlier(1e3, 1e6);
    const auto horizon = *find_horizon(TargetKind::wind, 60);
    auto member = [&] {
        QuantileForecast f{TargetKind::wind, horizon, make_date(2021, 11, 3), {}};
        f.quantiles[0] = std::abs(centre(rng));
        for (std::size_t k = 1; k < kNumLevels; ++k) f.quantiles[k] = f.quantiles[k - 1] + gap(rng);
        return f;
    };
    int failures = 0, median_checks = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<QuantileForecast> members(static_cast<std::size_t>(count(rng)));
        for (auto& m : members) m = member();
        for (auto method : {EnsembleMethod::mean, EnsembleMethod::median}) {
            const EnsembleSpec spec{method, {}, 1};
            const auto out = combine(members, spec);
            auto shuffled = members;
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            const std::vector<QuantileForecast> same(members.size(), members[0]);
            if (!is_monotone(out.quantiles) || combine(shuffled, spec).quantiles != out.quantiles ||
                combine(same, spec).quantiles != members[0].quantiles)
                ++failures;
        }
        if (members.size() % 2 == 1 && members.size() >= 3) {
            // Push one member that already lies above every level's median further out.
            const EnsembleSpec spec{EnsembleMethod::median, {}, 1};
            auto& top = members.back();
            for (std::size_t k = 0; k < kNumLevels; ++k) {
                double hi = 0.0;
                for (std::size_t m = 0; m + 1 < members.size(); ++m) hi = std::max(hi, members[m].quantiles[k]);
                top.quantiles[k] = hi + 1.0;
            }
            const auto placed = combine(members, spec);
            const double shift = outlier(rng);
            for (auto& v : top.quantiles) v += shift;
            if (combine(members, spec).quantiles != placed.quantiles) ++failures;
            ++median_checks;
        }
    }
    return {failures == 0, "1000 member sets (mean and median), " + std::to_string(median_checks) +
                               " median outlier checks, " + std::to_string(failures) + " violations"};
}

// ---------------------------------------------------------------------------------------------

Outcome format_golden(const Context& ctx) {
    const auto text = slurp(ctx.fixtures / "formats" / "20211103_example.csv");
    const auto round = make_round(make_date(2021, 11, 3));
    const double expected[15][5] = {
        {-1.8, -0.3, 0.1, 0.6, 1.7},  {-3.0, -0.5, 0.2, 0.9, 2.0},   {-3.0, -0.7, 0.2, 1.2, 2.4},
        {-3.6, -0.9, 0.3, 1.2, 2.7},  {-3.6, -0.9, 0.5, 1.4, 3.2},   {6.5, 8.0, 8.6, 9.2, 10.4},
        {6.2, 7.9, 8.7, 9.2, 10.6},   {7.9, 9.8, 10.9, 11.7, 13.4},  {4.3, 6.8, 7.6, 8.3, 9.7},
        {8.5, 10.4, 11.3, 12.0, 14.2}, {8.7, 13.8, 16.5, 19.4, 26.2}, {5.8, 15.5, 18.9, 23.1, 30.8},
        {9.7, 14.2, 16.7, 19.0, 23.8}, {6.9, 11.9, 14.2, 17.1, 24.3}, {8.9, 14.4, 17.7, 20.8, 26.3},
    };
    const auto golden = parse_submission(text, round, "example");
    bool golden_ok = golden.submission && golden.submission->rows.size() == 15;
    if (golden_ok) {
        for (std::size_t i = 0; i < 15; ++i) {
            const auto& row = golden.submission->rows[i];
            if (row.cell() != all_cells()[i]) golden_ok = false;
            for (std::size_t k = 0; k < kNumLevels; ++k) golden_ok = golden_ok && row.quantiles[k] == expected[i][k];
        }
        const auto again = parse_submission(serialize_submission(*golden.submission), round, "example");
        golden_ok = golden_ok && again.submission && again.submission->rows == golden.submission->rows;
    }

    auto replace_first = [&](std::string from, std::string to) {
        auto t = text;
        t.replace(t.find(from), from.size(), to);
        return t;
    };
    std::vector<std::string> lines;
    {
        std::istringstream in(text);
        for (std::string l; std::getline(in, l);) lines.push_back(l);
    }
    auto join = [](const std::vector<std::string>& ls) {
        std::string out;
        for (const auto& l : ls) out += l + "\n";
        return out;
    };
    auto without_last = lines;
    without_last.pop_back();
    auto duplicated = lines;
    duplicated.push_back(lines[1]);

    const std::vector<std::pair<std::string, FindingCode>> variants{
        {replace_first("q0.975", "q0.95"), FindingCode::header_mismatch},
        {replace_first("2021-11-03,DAX,1 day", "2021-11-10,DAX,1 day"), FindingCode::wrong_forecast_date},
        {replace_first("DAX,1 day", "FTSE,1 day"), FindingCode::unknown_target},
        {replace_first("DAX,1 day", "DAX,3 day"), FindingCode::unknown_horizon},
        {join(duplicated), FindingCode::duplicate_row},
        {join(without_last), FindingCode::missing_row},
        {replace_first("0.1,0.6,1.7", "0.1,zero,1.7"), FindingCode::non_numeric},
        {replace_first("0.1,0.6,1.7", "0.1,0.6,inf"), FindingCode::non_finite},
        {replace_first("0.1,0.6,1.7", "0.6,0.1,1.7"), FindingCode::non_monotone},
        {replace_first("0.1,0.6,1.7", "0.1,0.6"), FindingCode::field_count},
        {replace_first("2021-11-03,DAX,1 day", "2021-11-3x,DAX,1 day"), FindingCode::bad_date},
        {"", FindingCode::empty_file},
    };
    int hits = 0;
    std::string misses;
    for (const auto& [bytes, code] : variants) {
        const auto r = parse_submission(bytes, round, "example");
        if (!r.submission && r.report.verdict() == Verdict::rejected && r.report.has(code)) ++hits;
        else misses += " " + std::string(finding_code_name(code));
    }
    return {golden_ok && hits == 12, std::string("golden file ") + (golden_ok ? "matches" : "DIFFERS") + "; " +
                                         std::to_string(hits) + "/12 malformed variants flagged" +
                                         (misses.empty() ? "" : " (missed:" + misses + ")")};
}

Outcome pipeline_determinism(const Context& ctx) {
    const auto a = ctx.work / "determinism_a", b = ctx.work / "determinism_b";
    if (!run_season_cli(ctx, a) || !run_season_cli(ctx, b)) return {false, "hub CLI pipeline failed"};
    int differing = 0, compared = 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file() || e.path().filename() == ".lock") continue;
        const auto rel = fs::relative(e.path(), a);
        if (rel.string() == "config.txt") continue;
        ++compared;
        if (!fs::exists(b / rel) || slurp(e.path()) != slurp(b / rel)) ++differing;
    }
    const auto lb = slurp(a / "leaderboard.json");
    const bool golden = lb == slurp(ctx.fixtures / "golden" / "leaderboard.json");
    return {differing == 0 && compared > 0 && golden,
            std::to_string(compared) + " artifacts compared across two runs, " + std::to_string(differing) +
                " differ; leaderboard.json " + (golden ? "matches" : "DIFFERS FROM") + " the committed golden"};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qhub acceptance suite"};
    Context ctx;
    app.add_option("--hub", ctx.hub, "path to the hub executable")->required();
    app.add_option("--fixtures", ctx.fixtures, "tests/fixtures directory")->required();
    app.add_option("--work", ctx.work, "scratch directory")->required();
    CLI11_PARSE(app, argc, argv);
    fs::create_directories(ctx.work);

    const std::vector<std::pair<std::string, std::function<Outcome(const Context&)>>> criteria{
        {"quantile-score-propriety", qs_propriety},
        {"degenerate-forecast-identity", degenerate_identity},
        {"closed-form-crps-vs-quadrature", crps_vs_quadrature},
        {"emos-recovery", emos_recovery},
        {"coverage-reproduction", coverage_reproduction},
        {"ranking-oracle", ranking_oracle},
        {"ensemble-properties", ensemble_properties},
        {"format-golden", format_golden},
        {"pipeline-determinism", pipeline_determinism},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check(ctx);
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
