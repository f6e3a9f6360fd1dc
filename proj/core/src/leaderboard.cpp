#include <algorithm>
#include <numeric>
#include <set>

#include "json.hpp"
#include "qhub/api.hpp"
#include "qhub/hub.hpp"

namespace qhub::hub {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 4> kReferenceAliases{kBenchmarkAlias, kEmosAlias, kEnsembleMeanAlias,
                                                            kEnsembleMedianAlias};

using RecordIndex = std::map<std::tuple<std::string, CellKey, Date>, double>;

std::vector<Date> scored_rounds(const Store& store) {
    std::vector<Date> out;
    for (const auto& [d, info] : store.rounds())
        if (info.state == RoundState::scored) out.push_back(d);
    return out;
}

std::vector<ScoreRecord> all_records(const Store& store, const std::vector<Date>& rounds) {
    std::vector<ScoreRecord> out;
    for (auto d : rounds) {
        auto r = store.round_scores(d);
        out.insert(out.end(), r.begin(), r.end());
    }
    return out;
}

double mean(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

} // namespace

Leaderboard compute_leaderboard(const Store& store) {
    Leaderboard lb;
    lb.seed = store.config().seed;
    lb.rounds = scored_rounds(store);

    std::set<std::string> participants;
    std::map<Date, std::set<std::string>> submitted;
    for (auto d : lb.rounds)
        for (const auto& [alias, sub] : store.submissions(d)) {
            participants.insert(alias);
            submitted[d].insert(alias);
        }
    lb.participants.assign(participants.begin(), participants.end());
    for (const auto& p : lb.participants) {
        int missed = 0;
        for (auto d : lb.rounds) missed += submitted[d].contains(p) ? 0 : 1;
        lb.missed_rounds[p] = missed;
    }

    const auto records = all_records(store, lb.rounds);
    RecordIndex index;
    for (const auto& r : records) index[{r.participant, r.cell(), r.round_date}] = r.mean_quantile_score;

    auto lookup = [&](const std::string& alias, const CellKey& c, Date d) -> std::optional<double> {
        const auto it = index.find({alias, c, d});
        if (it == index.end()) return std::nullopt;
        return it->second;
    };

    const std::string bench(kBenchmarkAlias);
    for (const auto& cell : all_cells()) {
        std::vector<Date> rounds;
        for (auto d : lb.rounds)
            if (lookup(bench, cell, d)) rounds.push_back(d);
        if (rounds.empty()) continue;

        CellRoundScores crs{cell, lb.participants, {}};
        bool any = false;
        for (const auto& p : lb.participants) {
            std::vector<std::optional<double>> per_round;
            for (auto d : rounds) {
                per_round.push_back(lookup(p, cell, d));
                any = any || per_round.back().has_value();
            }
            crs.per_round.push_back(std::move(per_round));
        }

        std::vector<double> bench_scores;
        for (auto d : rounds) bench_scores.push_back(*lookup(bench, cell, d));
        const double bench_mean = mean(bench_scores);

        if (any) {
            const auto imputed = impute_missing(crs);
            CellStanding st;
            st.cell = cell;
            st.n_rounds = static_cast<int>(rounds.size());
            st.bench_mean_score = bench_mean;
            st.completed_mean = imputed.completed;
            st.submitted_mean = imputed.submitted_only;
            st.missed_rounds = imputed.missed_rounds;
            for (double s : imputed.completed) st.skill.push_back(skill_score(s, bench_mean));
            st.rank = fractional_ranks(st.completed_mean, ScoreOrder::lower_is_better);
            lb.cells.push_back(std::move(st));
        }

        for (auto alias : kReferenceAliases) {
            std::vector<double> own, against;
            for (auto d : rounds)
                if (const auto s = lookup(std::string(alias), cell, d)) {
                    own.push_back(*s);
                    against.push_back(*lookup(bench, cell, d));
                }
            if (own.empty()) continue;
            auto it = std::find_if(lb.reference.begin(), lb.reference.end(),
                                   [&](const ReferenceRow& r) { return r.alias == alias; });
            if (it == lb.reference.end()) {
                lb.reference.push_back({std::string(alias), {}});
                it = std::prev(lb.reference.end());
            }
            const double m = mean(own);
            it->cells[cell] = {m, skill_score(m, mean(against))};
        }
    }
    std::sort(lb.reference.begin(), lb.reference.end(), [](const ReferenceRow& a, const ReferenceRow& b) {
        const auto pos = [](const std::string& s) {
            return std::find(kReferenceAliases.begin(), kReferenceAliases.end(), s) - kReferenceAliases.begin();
        };
        return pos(a.alias) < pos(b.alias);
    });

    if (!lb.participants.empty() && !lb.cells.empty()) {
        RankMatrix m;
        m.participants = lb.participants;
        for (const auto& st : lb.cells) {
            m.cells.push_back(st.cell);
            m.ranks.push_back(st.rank);
        }
        lb.entries = overall_ranking(m, lb.seed);
    }
    return lb;
}

std::string leaderboard_json(const Leaderboard& lb, int skip_allowance) {
    json doc;
    doc["seed"] = lb.seed;
    json rounds = json::array();
    for (auto d : lb.rounds) rounds.push_back(format_date(d));
    doc["rounds"] = rounds;
    json cells = json::array();
    for (const auto& st : lb.cells)
        cells.push_back({{"target", std::string(target_name(st.cell.target))},
                         {"horizon", horizon_of(st.cell).label()},
                         {"n_rounds", st.n_rounds},
                         {"benchmark_mean_score", st.bench_mean_score}});
    doc["cells"] = cells;

    std::map<std::string, std::size_t> pidx;
    for (std::size_t i = 0; i < lb.participants.size(); ++i) pidx[lb.participants[i]] = i;

    json entries = json::array();
    for (const auto& e : lb.entries) {
        const auto p = pidx.at(e.alias);
        json skill = json::object();
        json score = json::object();
        double summed = 0.0;
        for (const auto& st : lb.cells) {
            skill[st.cell.label()] = st.skill[p];
            score[st.cell.label()] = st.completed_mean[p];
            summed += st.skill[p];
        }
        const int missed = lb.missed_rounds.count(e.alias) ? lb.missed_rounds.at(e.alias) : 0;
        entries.push_back({{"position", e.final_position},
                           {"alias", e.alias},
                           {"kind", "participant"},
                           {"avg_rank", e.average_rank},
                           {"best_rank", e.best_rank},
                           {"temp_avg_rank", nullable(e.temperature_average_rank)},
                           {"tiebreak", std::string(tiebreak_name(e.tiebreak_applied))},
                           {"summed_skill", summed},
                           {"missed_rounds", missed},
                           {"exceeds_skip_allowance", missed > skip_allowance},
                           {"skill", skill},
                           {"mean_score", score}});
    }
    for (const auto& ref : lb.reference) {
        json skill = json::object();
        json score = json::object();
        for (const auto& [cell, v] : ref.cells) {
            score[cell.label()] = v.first;
            skill[cell.label()] = v.second;
        }
        const std::string kind = ref.alias == kBenchmarkAlias ? "benchmark"
                                 : ref.alias == kEmosAlias    ? "postprocessed"
                                                              : "ensemble";
        entries.push_back({{"position", nullptr},
                           {"alias", ref.alias},
                           {"kind", kind},
                           {"avg_rank", nullptr},
                           {"best_rank", nullptr},
                           {"temp_avg_rank", nullptr},
                           {"tiebreak", nullptr},
                           {"summed_skill", nullptr},
                           {"missed_rounds", nullptr},
                           {"exceeds_skip_allowance", nullptr},
                           {"skill", skill},
                           {"mean_score", score}});
    }
    doc["entries"] = entries;
    return doc.dump(2) + "\n";
}

std::string leaderboard_csv(const Leaderboard& lb) {
    std::string out = "position,alias,avg_rank,best_rank,temp_avg_rank,tiebreak\n";
    for (const auto& e : lb.entries) {
        out += std::to_string(e.final_position) + "," + e.alias + "," + format_number(e.average_rank) + "," +
               format_number(e.best_rank) + "," +
               (e.temperature_average_rank ? format_number(*e.temperature_average_rank) : std::string()) + "," +
               std::string(tiebreak_name(e.tiebreak_applied)) + "\n";
    }
    return out;
}

namespace {

std::string coverage_json(const std::vector<ScoreRecord>& records) {
    std::map<std::pair<std::string, CellKey>, std::vector<ScoreRecord>> groups;
    for (const auto& r : records) groups[{r.participant, r.cell()}].push_back(r);
    auto rank_alias = [](const std::string& a) {
        const auto it = std::find(kReferenceAliases.begin(), kReferenceAliases.end(), a);
        return std::pair(it == kReferenceAliases.end() ? 1 : 0, it == kReferenceAliases.end()
                                                                    ? a
                                                                    : std::to_string(it - kReferenceAliases.begin()));
    };
    std::vector<std::pair<std::string, CellKey>> keys;
    for (const auto& [k, v] : groups) keys.push_back(k);
    std::stable_sort(keys.begin(), keys.end(), [&](const auto& a, const auto& b) {
        return std::make_tuple(rank_alias(a.first), a.second) < std::make_tuple(rank_alias(b.first), b.second);
    });
    json out = json::array();
    for (const auto& key : keys) {
        const auto& g = groups.at(key);
        const auto rates = coverage_rate(g);
        double l50 = 0.0, l95 = 0.0;
        for (const auto& r : g) {
            l50 += r.len_50;
            l95 += r.len_95;
        }
        out.push_back({{"alias", key.first},
                       {"target", std::string(target_name(key.second.target))},
                       {"horizon", horizon_of(key.second).label()},
                       {"n", rates.n},
                       {"coverage_50", rates.rate_50},
                       {"coverage_95", rates.rate_95},
                       {"coverage_50_display", round_percent(rates.rate_50)},
                       {"coverage_95_display", round_percent(rates.rate_95)},
                       {"mean_len_50", l50 / g.size()},
                       {"mean_len_95", l95 / g.size()}});
    }
    return out.dump(2) + "\n";
}

std::string share_json(const Store& store, const std::vector<Date>& rounds) {
    json out = json::array();
    const std::string bench(kBenchmarkAlias);
    for (auto d : rounds) {
        const auto records = store.round_scores(d);
        for (auto t : store.round(d).targets) {
            std::vector<ScoreRecord> part, ref;
            for (const auto& r : records) {
                if (r.target != t) continue;
                if (r.participant == bench) ref.push_back(r);
                else if (!is_reserved_alias(r.participant)) part.push_back(r);
            }
            json row = {{"round_date", format_date(d)}, {"target", std::string(target_name(t))}};
            if (ref.empty()) {
                row["share"] = nullptr;
                row["n_participants"] = 0;
                row["n_beating"] = 0;
                row["benchmark_missing"] = true;
            } else {
                const auto s = share_beating_benchmark(part, ref);
                row["share"] = nullable(s.share);
                row["n_participants"] = s.n_participants;
                row["n_beating"] = s.n_beating;
                row["benchmark_missing"] = false;
            }
            out.push_back(row);
        }
    }
    return out.dump(2) + "\n";
}

std::string evaluation_sample_json(const std::vector<ScoreRecord>& records) {
    std::map<TargetKind, int> pairs;
    std::map<CellKey, int> per_cell;
    for (const auto& r : records)
        if (r.participant == kBenchmarkAlias) {
            ++pairs[r.target];
            ++per_cell[r.cell()];
        }
    json by_target = json::object();
    int total = 0;
    for (auto t : kAllTargets) {
        by_target[std::string(target_name(t))] = pairs[t];
        total += pairs[t];
    }
    json by_cell = json::array();
    for (const auto& [c, n] : per_cell)
        by_cell.push_back(
            {{"target", std::string(target_name(c.target))}, {"horizon", horizon_of(c).label()}, {"n", n}});
    json doc = {{"total_pairs", total}, {"pairs_by_target", by_target}, {"pairs_by_cell", by_cell}};
    return doc.dump(2) + "\n";
}

std::string participation_json(const Leaderboard& lb, int skip_allowance) {
    json rows = json::array();
    for (const auto& [alias, missed] : lb.missed_rounds)
        rows.push_back({{"alias", alias},
                        {"rounds_scored", static_cast<int>(lb.rounds.size())},
                        {"missed_rounds", missed},
                        {"exceeds_skip_allowance", missed > skip_allowance}});
    json doc = {{"skip_allowance", skip_allowance}, {"participants", rows}};
    return doc.dump(2) + "\n";
}

} // namespace

Leaderboard publish(Store& store) {
    const auto rounds = scored_rounds(store);
    const auto lb = compute_leaderboard(store);
    const auto& root = store.root();
    const int allowance = store.config().skip_allowance;
    atomic_write(root / "leaderboard.json", leaderboard_json(lb, allowance));
    atomic_write(root / "leaderboard.csv", leaderboard_csv(lb));

    auto records = all_records(store, rounds);
    std::sort(records.begin(), records.end(), [](const ScoreRecord& a, const ScoreRecord& b) {
        return std::tie(a.round_date, a.target, a.horizon, a.participant) <
               std::tie(b.round_date, b.target, b.horizon, b.participant);
    });
    atomic_write(root / "scores" / "records.csv", score_records_csv(records));

    std::set<std::tuple<CellKey, Date>> bench_cells;
    std::vector<ScoreRecord> bench, others;
    for (const auto& r : records)
        if (r.participant == kBenchmarkAlias) {
            bench.push_back(r);
            bench_cells.insert({r.cell(), r.round_date});
        }
    for (const auto& r : records)
        if (r.participant != kBenchmarkAlias && bench_cells.contains({r.cell(), r.round_date})) others.push_back(r);
    auto agg = aggregate(bench, bench);
    const auto agg_others = aggregate(others, bench);
    agg.insert(agg.end(), agg_others.begin(), agg_others.end());
    atomic_write(root / "scores" / "aggregate.csv", aggregate_scores_csv(agg));

    atomic_write(root / "analysis" / "coverage.json", coverage_json(records));
    atomic_write(root / "analysis" / "share_beating_benchmark.json", share_json(store, rounds));
    atomic_write(root / "analysis" / "evaluation_sample.json", evaluation_sample_json(records));
    atomic_write(root / "analysis" / "participation.json", participation_json(lb, allowance));
    return lb;
}

void export_store(const Store& store, const fs::path& out) {
    const auto& root = store.root();
    fs::create_directories(out);
    const auto opts = fs::copy_options::recursive | fs::copy_options::overwrite_existing;
    for (const char* f : {"leaderboard.json", "leaderboard.csv", "rounds.json", "config.txt"})
        if (fs::exists(root / f)) fs::copy_file(root / f, out / f, fs::copy_options::overwrite_existing);
    for (const char* d : {"scores", "analysis"})
        if (fs::exists(root / d)) fs::copy(root / d, out / d, opts);
    for (const auto& [date, info] : store.rounds()) {
        const auto dst = out / "forecasts" / format_date(date);
        fs::create_directories(dst);
        for (const auto& [alias, sub] : store.submissions(date))
            atomic_write(dst / submission_filename(date, alias), serialize_submission(sub));
        for (const auto& [alias, sub] : store.generated(date))
            atomic_write(dst / submission_filename(date, alias), serialize_submission(sub));
    }

    const api::Api api(root);
    const auto api_dir = out / "api";
    auto snapshot = [&](const std::string& path, const std::map<std::string, std::string>& params,
                        const std::string& name) {
        const auto r = api.handle(path, params);
        if (r.status == 200) atomic_write(api_dir / name, r.body);
    };
    snapshot("/api/rounds", {}, "rounds.json");
    snapshot("/api/leaderboard", {}, "leaderboard.json");
    snapshot("/api/analysis/coverage", {}, "analysis_coverage.json");
    snapshot("/api/analysis/share-beating-benchmark", {}, "analysis_share_beating_benchmark.json");
    for (auto t : kAllTargets) {
        const std::string tn(target_name(t));
        snapshot("/api/observations", {{"target", tn}}, "observations_" + tn + ".json");
        for (const auto& h : Target{t}.horizons())
            snapshot("/api/scores", {{"target", tn}, {"horizon", std::to_string(h.magnitude)}},
                     "scores_" + tn + "_" + std::to_string(h.magnitude) + ".json");
        for (const auto& [date, info] : store.rounds())
            if (info.spec().has_target(t))
                snapshot("/api/forecasts", {{"target", tn}, {"round", format_date(date)}},
                         "forecasts_" + tn + "_" + format_date(date) + ".json");
    }
}

} // namespace qhub::hub
