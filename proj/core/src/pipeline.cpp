#include <algorithm>

#include "qhub/benchmarks.hpp"
#include "qhub/ensemble.hpp"
#include "qhub/hub.hpp"

namespace qhub::hub {

namespace fs = std::filesystem;

namespace {

bool has_cell(const SubmissionFile& f, const CellKey& cell) {
    return std::any_of(f.rows.begin(), f.rows.end(), [&](const QuantileForecast& r) { return r.cell() == cell; });
}

const QuantileForecast* find_row(const SubmissionFile& f, const CellKey& cell) {
    for (const auto& r : f.rows)
        if (r.cell() == cell) return &r;
    return nullptr;
}

void sort_rows(SubmissionFile& f) {
    std::sort(f.rows.begin(), f.rows.end(),
              [](const QuantileForecast& a, const QuantileForecast& b) { return a.cell() < b.cell(); });
}

SubmissionFile empty_file(std::string_view alias, Date d) { return {std::string(alias), d, {}}; }

struct RoundInputs {
    std::optional<PriceSeries> prices;
    std::optional<ObservationSeries> temperature;
    std::optional<ObservationSeries> wind;
    NwpStore nwp;

    const std::optional<ObservationSeries>& obs(TargetKind t) const {
        return t == TargetKind::temperature ? temperature : wind;
    }
};

QuantileForecast weather_benchmark(const RoundInputs& in, const RoundSpec& spec, const CellKey& cell) {
    const auto* fc = in.nwp.find(nwp_variable_for(cell.target), midnight_utc(spec.round_date), cell.horizon);
    if (!fc) throw DataError("no NWP ensemble for " + cell.label());
    auto out = raw_ensemble_benchmark(*fc, cell.target);
    out.round_date = spec.round_date;
    return out;
}

QuantileForecast emos_forecast(const RoundInputs& in, const HubConfig& cfg, const RoundSpec& spec,
                               const CellKey& cell, const fs::path& params_dir) {
    const auto var = nwp_variable_for(cell.target);
    const auto round_start = midnight_utc(spec.round_date);
    const auto* current = in.nwp.find(var, round_start, cell.horizon);
    if (!current) throw DataError("no NWP ensemble for " + cell.label());
    const auto& obs = in.obs(cell.target);
    if (!obs) throw DataError("no observations to train EMOS for " + cell.label());

    std::optional<Timestamp> cutover;
    if (cfg.station_cutover && !cfg.allow_cross_cutover_training) cutover = midnight_utc(*cfg.station_cutover);
    const bool round_after_cutover = cutover && round_start >= *cutover;

    std::vector<EmosTrainingPair> pairs;
    for (const auto* fc : in.nwp.series(var, cell.horizon)) {
        const auto valid = fc->init_time + std::chrono::hours(fc->lead_hours);
        if (valid >= round_start) continue;
        if (cutover && (valid >= *cutover) != round_after_cutover) continue;
        const auto y = obs->at(valid).value;
        if (!y) continue;
        pairs.push_back({fc->mean(), fc->variance(), *y});
    }
    auto params = emos_fit(pairs, emos_family_for(cell.target));
    params.fitted_at = format_date(spec.round_date);
    atomic_write(params_dir / (std::string(target_name(cell.target)) + "_" + std::to_string(cell.horizon) + ".txt"),
                 serialize_emos_params(params));
    return emos_predict(params, current->mean(), current->variance(), cell.target, horizon_of(cell),
                        spec.round_date);
}

std::optional<double> outcome(const RoundInputs& in, const RoundSpec& spec, const CellKey& cell) {
    if (cell.target == TargetKind::dax) {
        if (!in.prices) return std::nullopt;
        return dax_outcome(*in.prices, spec.round_date, horizon_of(cell));
    }
    const auto& obs = in.obs(cell.target);
    if (!obs) return std::nullopt;
    return obs->at(resolve_valid_time(spec, cell.target, horizon_of(cell))).value;
}

} // namespace

ScoreDelta score_round(Store& store, Date date) {
    const auto info = store.round(date);
    const auto spec = info.spec();
    if (info.state == RoundState::open) store.set_state(date, RoundState::closed);
    const auto& cfg = store.config();

    RoundInputs in;
    in.prices = store.prices();
    in.temperature = store.observations(TargetKind::temperature);
    in.wind = store.observations(TargetKind::wind);
    in.nwp = store.nwp();

    std::vector<CellKey> cells;
    for (const auto& c : all_cells())
        if (spec.has_target(c.target)) cells.push_back(c);

    ScoreDelta delta;
    delta.round = date;

    const auto gen_dir = store.round_dir(date) / "generated";
    auto generated = store.generated(date);
    auto bench = generated.contains(std::string(kBenchmarkAlias)) ? generated.at(std::string(kBenchmarkAlias))
                                                                  : empty_file(kBenchmarkAlias, date);
    auto emos = generated.contains(std::string(kEmosAlias)) ? generated.at(std::string(kEmosAlias))
                                                            : empty_file(kEmosAlias, date);
    const auto bench_rows = bench.rows.size();
    const auto emos_rows = emos.rows.size();

    if (spec.has_target(TargetKind::dax) && !has_cell(bench, {TargetKind::dax, 1})) {
        try {
            if (!in.prices) throw DataError("no DAX prices loaded");
            RollingWindowConfig wc;
            wc.window_length = cfg.dax_window;
            for (auto& fc : dax_benchmark(*in.prices, spec, wc)) bench.rows.push_back(fc);
        } catch (const Error& e) {
            for (const auto& c : cells)
                if (c.target == TargetKind::dax) delta.issues.push_back({c, std::string(kBenchmarkAlias), e.what()});
        }
    }
    for (const auto& c : cells) {
        if (c.target == TargetKind::dax) continue;
        if (!has_cell(bench, c)) {
            try {
                bench.rows.push_back(weather_benchmark(in, spec, c));
            } catch (const Error& e) {
                delta.issues.push_back({c, std::string(kBenchmarkAlias), e.what()});
            }
        }
        if (!has_cell(emos, c)) {
            try {
                emos.rows.push_back(emos_forecast(in, cfg, spec, c, gen_dir / "emos_params"));
            } catch (const Error& e) {
                delta.issues.push_back({c, std::string(kEmosAlias), e.what()});
            }
        }
    }
    sort_rows(bench);
    sort_rows(emos);
    if (bench.rows.size() != bench_rows) atomic_write(gen_dir / "benchmark.csv", serialize_submission(bench));
    if (emos.rows.size() != emos_rows) atomic_write(gen_dir / "emos.csv", serialize_submission(emos));

    const auto subs = store.submissions(date);
    auto ens_mean = empty_file(kEnsembleMeanAlias, date);
    auto ens_median = empty_file(kEnsembleMedianAlias, date);
    for (const auto& c : cells) {
        std::vector<QuantileForecast> members;
        EnsembleSpec es;
        for (const auto& [alias, sub] : subs)
            if (const auto* row = find_row(sub, c)) {
                members.push_back(*row);
                es.member_aliases.push_back(alias);
            }
        if (members.empty()) continue;
        es.method = EnsembleMethod::mean;
        ens_mean.rows.push_back(combine(members, es));
        es.method = EnsembleMethod::median;
        ens_median.rows.push_back(combine(members, es));
    }
    if (!ens_mean.rows.empty()) {
        atomic_write(gen_dir / "ensemble_mean.csv", serialize_submission(ens_mean));
        atomic_write(gen_dir / "ensemble_median.csv", serialize_submission(ens_median));
    }

    std::map<std::string, const SubmissionFile*> forecasters;
    for (const auto& [alias, sub] : subs) forecasters[alias] = &sub;
    forecasters[std::string(kBenchmarkAlias)] = &bench;
    forecasters[std::string(kEmosAlias)] = &emos;
    forecasters[std::string(kEnsembleMeanAlias)] = &ens_mean;
    forecasters[std::string(kEnsembleMedianAlias)] = &ens_median;

    std::vector<ScoreRecord> records;
    for (const auto& c : cells) {
        const auto y = outcome(in, spec, c);
        if (!y) {
            delta.missing_observations.push_back(c);
            continue;
        }
        delta.scored_cells.push_back(c);
        for (const auto& [alias, file] : forecasters)
            if (const auto* row = find_row(*file, c)) records.push_back(score_forecast(alias, *row, *y));
    }
    if (delta.scored_cells.empty())
        throw StoreError("round " + format_date(date) + " has no observed outcomes yet");

    std::sort(records.begin(), records.end(), [](const ScoreRecord& a, const ScoreRecord& b) {
        return std::tie(a.target, a.horizon, a.participant) < std::tie(b.target, b.horizon, b.participant);
    });
    atomic_write(store.root() / "scores" / "rounds" / (format_date(date) + ".csv"), score_records_csv(records));
    delta.records = records.size();

    store.set_state(date, RoundState::scored);
    publish(store);
    return delta;
}

} // namespace qhub::hub
