#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qhub/core.hpp"
#include "qhub/scoring.hpp"

namespace qhub {

/// Scores of every participant in one cell, per round; nullopt where the participant did not
/// submit. Every participant vector has one entry per scored round of the cell.
struct CellRoundScores {
    CellKey cell;
    std::vector<std::string> participants;
    std::vector<std::vector<std::optional<double>>> per_round;
};

struct ImputedCell {
    CellKey cell;
    /// Average over all rounds of the cell, missed rounds filled with `imputed_value`.
    std::vector<double> completed;
    /// Average over submitted rounds only; nullopt for a participant who never submitted.
    std::vector<std::optional<double>> submitted_only;
    /// 1.01 times the worst submitted-rounds average.
    double imputed_value = 0.0;
    std::vector<int> missed_rounds;
};

inline constexpr double kImputationFactor = 1.01;

/// Fills missed rounds with 1.01 x the worst participant's average in the cell. Throws
/// DomainError when nobody submitted.
ImputedCell impute_missing(const CellRoundScores& scores);

/// Which direction of a cell value is better.
enum class ScoreOrder { lower_is_better, higher_is_better };

/// Fractional ranks (1 = best); ties receive the average of the positions they span.
std::vector<double> fractional_ranks(std::span<const double> values, ScoreOrder order);

struct ScoreMatrix {
    std::vector<std::string> participants;
    std::vector<CellKey> cells;
    /// values[c][p]: participant p's score (or skill) in cell c.
    std::vector<std::vector<double>> values;
};

struct RankMatrix {
    std::vector<std::string> participants;
    std::vector<CellKey> cells;
    /// ranks[c][p]
    std::vector<std::vector<double>> ranks;
};

/// Ranks every cell. Throws DomainError on non-finite or missing values.
RankMatrix rank_cells(const ScoreMatrix& matrix, ScoreOrder order = ScoreOrder::lower_is_better);

enum class Tiebreak { none, best_rank, temperature_rank, coin_flip };

std::string_view tiebreak_name(Tiebreak t);

struct LeaderboardEntry {
    std::string alias;
    double average_rank = 0.0;
    double best_rank = 0.0;
    /// Empty when the matrix has no temperature cells.
    std::optional<double> temperature_average_rank;
    int final_position = 0;
    Tiebreak tiebreak_applied = Tiebreak::none;
};

/// Keys for the final coin flip: one 64-bit draw per participant from mt19937_64(seed), handed
/// out in lexicographic alias order. A smaller key wins.
std::vector<std::uint64_t> coin_flip_keys(std::span<const std::string> participants, std::uint64_t seed);

/// Orders participants by average rank, then best rank, then temperature average rank, then
/// the seeded coin flip.
std::vector<LeaderboardEntry> overall_ranking(const RankMatrix& matrix, std::uint64_t seed);

/// Share of submitting participants whose mean score across the round's horizons is strictly
/// below the benchmark's. `records` and `benchmark_records` hold one round and one target.
/// Returns nullopt when no participant submitted; throws DataError when the benchmark is missing.
struct ShareBeatingBenchmark {
    std::optional<double> share;
    int n_participants = 0;
    int n_beating = 0;
};

ShareBeatingBenchmark share_beating_benchmark(std::span<const ScoreRecord> records,
                                              std::span<const ScoreRecord> benchmark_records);

} // namespace qhub
