#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qhub/config.hpp"
#include "qhub/core.hpp"
#include "qhub/error.hpp"
#include "qhub/ingestion.hpp"
#include "qhub/ranking.hpp"
#include "qhub/scoring.hpp"
#include "qhub/submission_io.hpp"

namespace qhub::hub {

/// Store-level failure: missing or corrupt files, lock contention, illegal state transitions.
class StoreError : public Error {
public:
    using Error::Error;
};

enum class RoundState { open, closed, scored };

std::string_view round_state_name(RoundState s);
std::optional<RoundState> parse_round_state(std::string_view s);

struct RoundInfo {
    Date date;
    RoundState state = RoundState::open;
    std::vector<TargetKind> targets;

    RoundSpec spec() const { return make_round(date, targets); }
};

/// Holds the single-writer lock of a store for its lifetime.
class WriterLock {
public:
    explicit WriterLock(const std::filesystem::path& root);
    ~WriterLock();
    WriterLock(const WriterLock&) = delete;
    WriterLock& operator=(const WriterLock&) = delete;

private:
    std::filesystem::path path_;
};

/// Writes via a temporary file and an atomic rename.
void atomic_write(const std::filesystem::path& path, std::string_view content);

/// Directory-tree persistence:
///
///     config.txt  rounds.json  leaderboard.json  leaderboard.csv
///     data/prices.csv  data/observations_<target>.csv  data/nwp/<init>.txt
///     rounds/<date>/submissions/<alias>/<sha256>.csv  rounds/<date>/submissions/index.json
///     rounds/<date>/generated/<alias>.csv  rounds/<date>/ingest_report.json
///     scores/rounds/<date>.csv  scores/records.csv  scores/aggregate.csv  analysis/*.json
class Store {
public:
    /// Opens an initialized store; throws StoreError when it is missing or corrupt.
    static Store open(const std::filesystem::path& root);
    /// Creates a new store. Throws StoreError when `root` already holds one.
    static Store init(const std::filesystem::path& root, const HubConfig& config);

    const std::filesystem::path& root() const { return root_; }
    const HubConfig& config() const { return config_; }
    const std::map<Date, RoundInfo>& rounds() const { return rounds_; }
    const RoundInfo& round(Date d) const;

    std::filesystem::path round_dir(Date d) const;
    void save_rounds();
    void set_state(Date d, RoundState s);
    void add_round(const RoundInfo& info);

    std::optional<PriceSeries> prices() const;
    std::optional<ObservationSeries> observations(TargetKind target) const;
    NwpStore nwp() const;

    /// Latest accepted submission per participant alias.
    std::map<std::string, SubmissionFile> submissions(Date d) const;
    /// Hub-generated forecasts (benchmark, emos, ensembles) keyed by reserved alias.
    std::map<std::string, SubmissionFile> generated(Date d) const;
    std::vector<ScoreRecord> round_scores(Date d) const;

private:
    Store(std::filesystem::path root, HubConfig config) : root_(std::move(root)), config_(std::move(config)) {}
    void load_rounds();

    std::filesystem::path root_;
    HubConfig config_;
    std::map<Date, RoundInfo> rounds_;
};

RoundSpec open_round(Store& store, Date date);
void close_round(Store& store, Date date);

struct IngestSummary {
    std::vector<std::string> accepted;
    std::vector<std::string> duplicates;
    std::vector<std::pair<std::string, ValidationReport>> rejected;
    /// (file name, reason) for files not matching `<YYYYMMDD>_<alias>.csv` or this round.
    std::vector<std::pair<std::string, std::string>> skipped;
};

/// Validates every `<YYYYMMDD>_<alias>.csv` in `dir` against the round and persists accepted files.
/// Re-ingesting identical content is a no-op; changed content becomes a new version.
IngestSummary ingest_directory(Store& store, Date date, const std::filesystem::path& dir,
                               const ParseOptions& options = {});

void load_prices_file(Store& store, const std::filesystem::path& file);
void load_observations_file(Store& store, TargetKind target, const std::filesystem::path& file);
/// Returns the number of ensemble blocks stored.
std::size_t load_nwp_into_store(Store& store, const std::filesystem::path& file);

struct CellIssue {
    CellKey cell;
    std::string alias;
    std::string message;
};

struct ScoreDelta {
    Date round;
    std::size_t records = 0;
    std::vector<CellKey> scored_cells;
    std::vector<CellKey> missing_observations;
    std::vector<CellIssue> issues;
};

/// Generates benchmarks (where absent) and ensembles, scores every forecast whose observation is
/// known, and refreshes the leaderboard and analyses. Idempotent.
ScoreDelta score_round(Store& store, Date date);

struct CellStanding {
    CellKey cell;
    int n_rounds = 0;
    double bench_mean_score = 0.0;
    /// Per participant (leaderboard order of `Leaderboard::participants`).
    std::vector<double> completed_mean;
    std::vector<std::optional<double>> submitted_mean;
    std::vector<double> skill;
    std::vector<double> rank;
    std::vector<int> missed_rounds;
};

struct ReferenceRow {
    std::string alias;
    /// cell -> (mean score, skill) over the rounds the alias was scored in.
    std::map<CellKey, std::pair<double, double>> cells;
};

struct Leaderboard {
    std::uint64_t seed = 0;
    std::vector<Date> rounds;
    std::vector<std::string> participants;
    std::vector<CellStanding> cells;
    std::vector<LeaderboardEntry> entries;
    std::vector<ReferenceRow> reference;
    /// alias -> rounds without an accepted submission.
    std::map<std::string, int> missed_rounds;
};

/// Builds the leaderboard from every scored round in the store.
Leaderboard compute_leaderboard(const Store& store);
std::string leaderboard_json(const Leaderboard& lb, int skip_allowance);
std::string leaderboard_csv(const Leaderboard& lb);

/// Recomputes and writes leaderboard.json/.csv, scores/, and analysis/ artifacts.
Leaderboard publish(Store& store);

/// Copies the public artifacts (scores, leaderboard, analyses, forecasts) to `out` and writes
/// JSON snapshots of every API endpoint under `out/api/`.
void export_store(const Store& store, const std::filesystem::path& out);

} // namespace qhub::hub
