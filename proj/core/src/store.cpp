#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

#include <openssl/evp.h>

#include "json.hpp"
#include "qhub/hub.hpp"
#include "text_util.hpp"

namespace qhub::hub {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw StoreError("SHA-256 computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

json read_json(const fs::path& path) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw StoreError("corrupt JSON in " + path.string() + ": " + e.what());
    }
}

std::vector<TargetKind> targets_for(const HubConfig& cfg, Date d) {
    if (d < cfg.weather_start) return {TargetKind::dax};
    return {kAllTargets.begin(), kAllTargets.end()};
}

} // namespace

std::string_view round_state_name(RoundState s) {
    switch (s) {
    case RoundState::open: return "open";
    case RoundState::closed: return "closed";
    case RoundState::scored: return "scored";
    }
    return "open";
}

std::optional<RoundState> parse_round_state(std::string_view s) {
    for (auto st : {RoundState::open, RoundState::closed, RoundState::scored})
        if (round_state_name(st) == s) return st;
    return std::nullopt;
}

WriterLock::WriterLock(const fs::path& root) : path_(root / ".lock") {
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        if (errno == EEXIST)
            throw StoreError("store is locked by another writer (remove " + path_.string() + " if it is stale)");
        throw StoreError("cannot create lock file " + path_.string() + ": " + std::strerror(errno));
    }
    const auto pid = std::to_string(::getpid()) + "\n";
    [[maybe_unused]] const auto n = ::write(fd, pid.data(), pid.size());
    ::close(fd);
}

WriterLock::~WriterLock() {
    std::error_code ec;
    fs::remove(path_, ec);
}

void atomic_write(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const auto tmp = fs::path(path.string() + ".tmp." + std::to_string(::getpid()));
    const int fd = ::open(tmp.c_str(), O_CREAT | O_TRUNC | O_WRONLY, 0644);
    if (fd < 0) throw StoreError("cannot write " + tmp.string() + ": " + std::strerror(errno));
    std::size_t written = 0;
    while (written < content.size()) {
        const auto n = ::write(fd, content.data() + written, content.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            ::close(fd);
            throw StoreError("write failed for " + tmp.string() + ": " + std::strerror(errno));
        }
        written += static_cast<std::size_t>(n);
    }
    ::fsync(fd);
    ::close(fd);
    fs::rename(tmp, path);
}

// ---- Store ----------------------------------------------------------------

Store Store::init(const fs::path& root, const HubConfig& config) {
    if (fs::exists(root / "config.txt")) throw StoreError("a hub store already exists at " + root.string());
    fs::create_directories(root / "data" / "nwp");
    fs::create_directories(root / "rounds");
    fs::create_directories(root / "scores" / "rounds");
    fs::create_directories(root / "analysis");
    atomic_write(root / "config.txt", serialize_config(config));
    Store s(root, config);
    s.save_rounds();
    return s;
}

Store Store::open(const fs::path& root) {
    if (!fs::exists(root / "config.txt")) throw StoreError("no hub store at " + root.string() + " (run 'hub init')");
    HubConfig cfg;
    try {
        cfg = load_config(root / "config.txt");
    } catch (const InputError& e) {
        throw StoreError(std::string("corrupt config.txt: ") + e.what());
    }
    Store s(root, cfg);
    s.load_rounds();
    return s;
}

void Store::load_rounds() {
    const auto path = root_ / "rounds.json";
    if (!fs::exists(path)) throw StoreError("corrupt store: rounds.json is missing");
    const auto doc = read_json(path);
    if (!doc.is_array()) throw StoreError("corrupt store: rounds.json is not an array");
    try {
        for (const auto& r : doc) {
            RoundInfo info;
            const auto date = parse_date(r.at("round_date").get<std::string>());
            const auto state = parse_round_state(r.at("state").get<std::string>());
            if (!date || !state) throw StoreError("corrupt store: bad round entry in rounds.json");
            info.date = *date;
            info.state = *state;
            for (const auto& t : r.at("targets")) {
                const auto k = parse_target(t.get<std::string>());
                if (!k) throw StoreError("corrupt store: unknown target in rounds.json");
                info.targets.push_back(*k);
            }
            rounds_[info.date] = info;
        }
    } catch (const json::exception& e) {
        throw StoreError(std::string("corrupt store: ") + e.what());
    }
}

void Store::save_rounds() {
    json doc = json::array();
    for (const auto& [d, info] : rounds_) {
        json targets = json::array();
        for (auto k : info.targets) targets.push_back(std::string(target_name(k)));
        doc.push_back({{"round_date", format_date(d)}, {"state", std::string(round_state_name(info.state))},
                       {"targets", targets}});
    }
    atomic_write(root_ / "rounds.json", doc.dump(2) + "\n");
}

const RoundInfo& Store::round(Date d) const {
    const auto it = rounds_.find(d);
    if (it == rounds_.end()) throw StoreError("round " + format_date(d) + " has not been opened");
    return it->second;
}

void Store::add_round(const RoundInfo& info) {
    if (rounds_.contains(info.date)) throw StoreError("round " + format_date(info.date) + " already exists");
    rounds_[info.date] = info;
    save_rounds();
}

void Store::set_state(Date d, RoundState s) {
    auto it = rounds_.find(d);
    if (it == rounds_.end()) throw StoreError("round " + format_date(d) + " has not been opened");
    const auto from = it->second.state;
    const bool legal = from == s || (from == RoundState::open && s == RoundState::closed) ||
                       (from == RoundState::closed && s == RoundState::scored);
    if (!legal)
        throw StoreError("illegal round transition " + std::string(round_state_name(from)) + " -> " +
                         std::string(round_state_name(s)));
    if (from == s) return;
    it->second.state = s;
    save_rounds();
}

fs::path Store::round_dir(Date d) const { return root_ / "rounds" / format_date(d); }

std::optional<PriceSeries> Store::prices() const {
    const auto path = root_ / "data" / "prices.csv";
    if (!fs::exists(path)) return std::nullopt;
    return load_prices(path);
}

std::optional<ObservationSeries> Store::observations(TargetKind target) const {
    const auto path = root_ / "data" / ("observations_" + std::string(target_name(target)) + ".csv");
    if (!fs::exists(path)) return std::nullopt;
    return load_observations(path, target);
}

NwpStore Store::nwp() const {
    NwpStore out;
    const auto dir = root_ / "data" / "nwp";
    if (!fs::exists(dir)) return out;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out.add(load_nwp_file(f));
    return out;
}

std::map<std::string, SubmissionFile> Store::submissions(Date d) const {
    std::map<std::string, SubmissionFile> out;
    const auto dir = round_dir(d) / "submissions";
    const auto index_path = dir / "index.json";
    if (!fs::exists(index_path)) return out;
    const auto index = read_json(index_path);
    const auto spec = round(d).spec();
    ParseOptions opts;
    opts.repair_sort = true;
    for (const auto& [alias, versions] : index.items()) {
        if (!versions.is_array() || versions.empty()) throw StoreError("corrupt submission index for " + alias);
        const auto latest = versions.back().get<std::string>();
        const auto raw = read_text_file(dir / alias / (latest + ".csv"));
        auto parsed = parse_submission(raw, spec, alias, opts);
        if (!parsed.submission) throw StoreError("stored submission " + alias + "/" + latest + " no longer validates");
        out.emplace(alias, std::move(*parsed.submission));
    }
    return out;
}

std::map<std::string, SubmissionFile> Store::generated(Date d) const {
    std::map<std::string, SubmissionFile> out;
    const auto spec = round(d).spec();
    ParseOptions opts;
    opts.allow_reserved_alias = true;
    opts.allow_partial = true;
    for (auto alias : {kBenchmarkAlias, kEmosAlias, kEnsembleMeanAlias, kEnsembleMedianAlias}) {
        const auto path = round_dir(d) / "generated" / (std::string(alias) + ".csv");
        if (!fs::exists(path)) continue;
        auto parsed = parse_submission(read_text_file(path), spec, alias, opts);
        if (!parsed.submission) throw StoreError("corrupt generated forecast " + path.string());
        out.emplace(std::string(alias), std::move(*parsed.submission));
    }
    return out;
}

std::vector<ScoreRecord> Store::round_scores(Date d) const {
    const auto path = root_ / "scores" / "rounds" / (format_date(d) + ".csv");
    if (!fs::exists(path)) return {};
    try {
        return parse_score_records_csv(read_text_file(path));
    } catch (const InputError& e) {
        throw StoreError("corrupt score file " + path.string() + ": " + e.what());
    }
}

// ---- lifecycle ------------------------------------------------------------

RoundSpec open_round(Store& store, Date date) {
    const auto& cfg = store.config();
    if (!is_wednesday(date)) throw DomainError(format_date(date) + " is not a Wednesday");
    if (date < cfg.season_start || cfg.season_end < date)
        throw DomainError(format_date(date) + " is outside the season " + format_date(cfg.season_start) + " .. " +
                          format_date(cfg.season_end));
    RoundInfo info{date, RoundState::open, targets_for(cfg, date)};
    store.add_round(info);
    return info.spec();
}

void close_round(Store& store, Date date) { store.set_state(date, RoundState::closed); }

IngestSummary ingest_directory(Store& store, Date date, const fs::path& dir, const ParseOptions& options) {
    const auto& info = store.round(date);
    if (info.state == RoundState::scored)
        throw StoreError("round " + format_date(date) + " is already scored; submissions are closed");
    if (!fs::is_directory(dir)) throw StoreError(dir.string() + " is not a directory");
    const auto spec = info.spec();

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());

    const auto sub_dir = store.round_dir(date) / "submissions";
    const auto index_path = sub_dir / "index.json";
    json index = fs::exists(index_path) ? read_json(index_path) : json::object();

    ParseOptions opts = options;
    opts.allow_reserved_alias = false;
    opts.allow_partial = false;

    IngestSummary summary;
    for (const auto& path : files) {
        const auto name = path.filename().string();
        const auto parsed_name = parse_submission_filename(name);
        if (!parsed_name) {
            summary.skipped.emplace_back(name, "file name does not match <YYYYMMDD>_<alias>.csv");
            continue;
        }
        if (parsed_name->round_date != date) {
            summary.skipped.emplace_back(name, "file belongs to round " + format_date(parsed_name->round_date));
            continue;
        }
        const auto raw = read_text_file(path);
        auto result = parse_submission(raw, spec, parsed_name->alias, opts);
        if (!result.submission) {
            summary.rejected.emplace_back(parsed_name->alias, std::move(result.report));
            continue;
        }
        const auto hash = sha256_hex(raw);
        auto& versions = index[parsed_name->alias];
        if (versions.is_null()) versions = json::array();
        if (std::find(versions.begin(), versions.end(), hash) != versions.end()) {
            summary.duplicates.push_back(parsed_name->alias);
            continue;
        }
        atomic_write(sub_dir / parsed_name->alias / (hash + ".csv"), raw);
        versions.push_back(hash);
        summary.accepted.push_back(parsed_name->alias);
    }

    // Keep the index in alias order so the file is stable across ingests.
    json sorted = json::object();
    std::vector<std::string> aliases;
    for (const auto& [alias, v] : index.items()) aliases.push_back(alias);
    std::sort(aliases.begin(), aliases.end());
    for (const auto& a : aliases) sorted[a] = index[a];
    atomic_write(index_path, sorted.dump(2) + "\n");

    json report = {{"round_date", format_date(date)},
                   {"accepted", summary.accepted},
                   {"duplicates", summary.duplicates},
                   {"rejected", json::array()},
                   {"skipped", json::array()}};
    for (const auto& [alias, rep] : summary.rejected) {
        json findings = json::array();
        for (const auto& f : rep.findings)
            findings.push_back({{"severity", f.severity == Severity::error ? "error" : "warning"},
                                {"code", std::string(finding_code_name(f.code))},
                                {"line", f.line},
                                {"message", f.message}});
        report["rejected"].push_back({{"alias", alias}, {"findings", findings}});
    }
    for (const auto& [name, reason] : summary.skipped)
        report["skipped"].push_back({{"file", name}, {"reason", reason}});
    atomic_write(store.round_dir(date) / "ingest_report.json", report.dump(2) + "\n");
    return summary;
}

void load_prices_file(Store& store, const fs::path& file) {
    const auto incoming = load_prices(file);
    std::map<Date, double> merged;
    if (auto existing = store.prices())
        for (const auto& p : existing->entries()) merged[p.date] = p.close;
    for (const auto& p : incoming.entries()) merged[p.date] = p.close;
    std::vector<PricePoint> entries;
    entries.reserve(merged.size());
    for (const auto& [d, c] : merged) entries.push_back({d, c});
    atomic_write(store.root() / "data" / "prices.csv", serialize_prices(PriceSeries(std::move(entries))));
}

void load_observations_file(Store& store, TargetKind target, const fs::path& file) {
    const auto incoming = load_observations(file, target);
    auto merged = store.observations(target).value_or(ObservationSeries(target));
    merged.merge(incoming);
    atomic_write(store.root() / "data" / ("observations_" + std::string(target_name(target)) + ".csv"),
                 serialize_observations(merged));
}

std::size_t load_nwp_into_store(Store& store, const fs::path& file) {
    auto blocks = load_nwp_file(file);
    if (blocks.empty()) return 0;
    const auto init = blocks.front().init_time;
    const auto hours = std::chrono::duration_cast<std::chrono::hours>(init - midnight_utc(date_of(init))).count();
    char suffix[8];
    std::snprintf(suffix, sizeof suffix, "%02d", static_cast<int>(hours));
    const auto path = store.root() / "data" / "nwp" / (format_compact_date(date_of(init)) + suffix + ".txt");
    if (fs::exists(path)) {
        for (const auto& old : load_nwp_file(path)) {
            const bool replaced = std::any_of(blocks.begin(), blocks.end(), [&](const EnsembleNwpForecast& b) {
                return b.variable == old.variable && b.lead_hours == old.lead_hours;
            });
            if (!replaced) blocks.push_back(old);
        }
    }
    std::sort(blocks.begin(), blocks.end(), [](const EnsembleNwpForecast& a, const EnsembleNwpForecast& b) {
        return std::pair(a.variable, a.lead_hours) < std::pair(b.variable, b.lead_hours);
    });
    atomic_write(path, serialize_nwp(blocks));
    return blocks.size();
}

} // namespace qhub::hub
