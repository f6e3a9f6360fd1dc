#include "qhub/api.hpp"

#include <charconv>
#include <set>

#include "httplib.h"
#include "json.hpp"
#include "qhub/hub.hpp"

namespace qhub::api {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using hub::Store;

namespace {

Response ok(const json& body) { return {200, body.dump(2) + "\n"}; }

Response error(int status, const std::string& message) {
    return {status, json{{"error", message}}.dump(2) + "\n"};
}

struct BadRequest {
    int status;
    std::string message;
};

std::string require(const std::map<std::string, std::string>& params, const std::string& key) {
    const auto it = params.find(key);
    if (it == params.end() || it->second.empty()) throw BadRequest{400, "missing query parameter '" + key + "'"};
    return it->second;
}

TargetKind require_target(const std::map<std::string, std::string>& params) {
    const auto name = require(params, "target");
    const auto t = parse_target(name);
    if (!t) throw BadRequest{400, "unknown target '" + name + "'"};
    return *t;
}

json published(const fs::path& path) {
    if (!fs::exists(path)) return json::array();
    return json::parse(read_text_file(path));
}

json quantiles_json(const QuantileVector& q) {
    json out = json::object();
    for (std::size_t i = 0; i < kNumLevels; ++i) out[QuantileLevels::labels()[i]] = q[i];
    return out;
}

std::string kind_of(const std::string& alias) {
    if (alias == kBenchmarkAlias) return "benchmark";
    if (alias == kEmosAlias) return "postprocessed";
    if (alias == kEnsembleMeanAlias || alias == kEnsembleMedianAlias) return "ensemble";
    return "participant";
}

Response rounds(const Store& store) {
    json out = json::array();
    for (const auto& [d, info] : store.rounds()) {
        json targets = json::array();
        for (auto t : info.targets) targets.push_back(std::string(target_name(t)));
        out.push_back({{"round_date", format_date(d)},
                       {"state", std::string(hub::round_state_name(info.state))},
                       {"targets", targets},
                       {"n_submissions", store.submissions(d).size()}});
    }
    return ok(out);
}

Response leaderboard(const Store& store) {
    const auto path = store.root() / "leaderboard.json";
    if (!fs::exists(path)) return ok(json::array());
    return ok(json::parse(read_text_file(path)).at("entries"));
}

Response forecasts(const Store& store, const std::map<std::string, std::string>& params) {
    const auto target = require_target(params);
    const auto round_text = require(params, "round");
    const auto date = parse_date(round_text);
    if (!date) throw BadRequest{400, "bad round date '" + round_text + "'"};
    if (!store.rounds().contains(*date)) throw BadRequest{404, "round " + round_text + " not found"};
    const auto spec = store.round(*date).spec();
    if (!spec.has_target(target))
        throw BadRequest{404, std::string(target_name(target)) + " is not forecast in round " + round_text};

    auto all = store.submissions(*date);
    for (auto& [alias, sub] : store.generated(*date)) all.emplace(alias, std::move(sub));

    json rows = json::array();
    for (const auto& [alias, sub] : all)
        for (const auto& fc : sub.rows) {
            if (fc.target != target) continue;
            rows.push_back({{"alias", alias},
                            {"kind", kind_of(alias)},
                            {"horizon", fc.horizon.label()},
                            {"valid_time", format_timestamp(resolve_valid_time(spec, target, fc.horizon))},
                            {"quantiles", quantiles_json(fc.quantiles)}});
        }

    json obs = json::array();
    const auto prices = target == TargetKind::dax ? store.prices() : std::nullopt;
    const auto series = target == TargetKind::dax ? std::nullopt : store.observations(target);
    for (const auto& h : Target{target}.horizons()) {
        std::optional<double> y;
        if (prices) y = dax_outcome(*prices, *date, h);
        if (series) y = series->at(resolve_valid_time(spec, target, h)).value;
        obs.push_back({{"horizon", h.label()},
                       {"valid_time", format_timestamp(resolve_valid_time(spec, target, h))},
                       {"value", y ? json(*y) : json(nullptr)}});
    }
    return ok({{"round_date", round_text},
               {"target", std::string(target_name(target))},
               {"forecasts", rows},
               {"observations", obs}});
}

Response observations(const Store& store, const std::map<std::string, std::string>& params) {
    const auto target = require_target(params);
    json values = json::array();
    if (target == TargetKind::dax) {
        if (const auto prices = store.prices())
            for (const auto& p : prices->entries()) values.push_back({{"date", format_date(p.date)}, {"close", p.close}});
    } else if (const auto series = store.observations(target)) {
        for (const auto& [t, v] : series->values())
            values.push_back({{"timestamp_utc", format_timestamp(t)}, {"value", v}});
    }
    return ok({{"target", std::string(target_name(target))}, {"values", values}});
}

Response scores(const Store& store, const std::map<std::string, std::string>& params) {
    const auto target = require_target(params);
    const auto htext = require(params, "horizon");
    auto horizon = find_horizon(target, htext);
    if (!horizon) {
        int magnitude = 0;
        const auto [p, ec] = std::from_chars(htext.data(), htext.data() + htext.size(), magnitude);
        if (ec == std::errc() && p == htext.data() + htext.size()) horizon = find_horizon(target, magnitude);
    }
    if (!horizon) throw BadRequest{400, "unknown horizon '" + htext + "' for " + std::string(target_name(target))};
    const CellKey cell{target, horizon->magnitude};

    std::vector<ScoreRecord> cell_records;
    for (const auto& [d, info] : store.rounds()) {
        if (info.state != hub::RoundState::scored) continue;
        for (auto& r : store.round_scores(d))
            if (r.cell() == cell) cell_records.push_back(std::move(r));
    }

    json records = json::array();
    for (const auto& r : cell_records) {
        json qs = json::object();
        for (std::size_t i = 0; i < kNumLevels; ++i) qs[QuantileLevels::labels()[i]] = r.quantile_scores[i];
        records.push_back({{"alias", r.participant},
                           {"kind", kind_of(r.participant)},
                           {"round_date", format_date(r.round_date)},
                           {"mean_quantile_score", r.mean_quantile_score},
                           {"quantile_scores", qs},
                           {"abs_error", r.abs_error},
                           {"covered_50", r.covered_50},
                           {"covered_95", r.covered_95},
                           {"len_50", r.len_50},
                           {"len_95", r.len_95}});
    }

    std::vector<ScoreRecord> bench;
    for (const auto& r : cell_records)
        if (r.participant == kBenchmarkAlias) bench.push_back(r);
    json agg = json::array();
    if (!bench.empty()) {
        std::set<Date> bench_rounds;
        for (const auto& r : bench) bench_rounds.insert(r.round_date);
        std::vector<ScoreRecord> usable;
        for (const auto& r : cell_records)
            if (bench_rounds.contains(r.round_date)) usable.push_back(r);
        for (const auto& a : aggregate(usable, bench))
            agg.push_back({{"alias", a.participant},
                           {"kind", kind_of(a.participant)},
                           {"n_rounds", a.n_rounds},
                           {"mean_score", a.mean_score},
                           {"benchmark_mean_score", a.bench_mean_score},
                           {"skill", a.skill}});
    }
    return ok({{"target", std::string(target_name(target))},
               {"horizon", horizon->label()},
               {"records", records},
               {"aggregate", agg}});
}

} // namespace

Api::Api(fs::path root) : root_(std::move(root)) { (void)Store::open(root_); }

Response Api::handle(const std::string& path, const std::map<std::string, std::string>& params) const {
    try {
        const auto store = Store::open(root_);
        if (path == "/api/rounds") return rounds(store);
        if (path == "/api/leaderboard") return leaderboard(store);
        if (path == "/api/forecasts") return forecasts(store, params);
        if (path == "/api/observations") return observations(store, params);
        if (path == "/api/scores") return scores(store, params);
        if (path == "/api/analysis/coverage") return ok(published(store.root() / "analysis" / "coverage.json"));
        if (path == "/api/analysis/share-beating-benchmark")
            return ok(published(store.root() / "analysis" / "share_beating_benchmark.json"));
        return error(404, "no such endpoint: " + path);
    } catch (const BadRequest& e) {
        return error(e.status, e.message);
    } catch (const json::exception& e) {
        return error(500, std::string("corrupt store: ") + e.what());
    } catch (const std::exception& e) {
        return error(500, e.what());
    }
}

void serve(const fs::path& root, const std::string& host, int port, const std::function<void()>& on_ready) {
    const Api api(root);
    httplib::Server server;
    server.Get(R"(/api/.*)", [&api](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> params;
        for (const auto& [k, v] : req.params) params.emplace(k, v);
        const auto r = api.handle(req.path, params);
        res.status = r.status;
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_content(r.body, r.content_type);
    });
    // Without SO_REUSEPORT a second server on the same port fails to bind instead of sharing it.
    server.set_socket_options([](int sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    if (!server.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
    if (on_ready) on_ready();
    server.listen_after_bind();
}

} // namespace qhub::api
