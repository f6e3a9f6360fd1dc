#include "qhub/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <limits>
#include <random>

#include "qhub/error.hpp"

namespace qhub {

ImputedCell impute_missing(const CellRoundScores& scores) {
    const auto np = scores.participants.size();
    if (scores.per_round.size() != np) throw DomainError("one score vector per participant required");
    const std::size_t n_rounds = np ? scores.per_round.front().size() : 0;

    ImputedCell out;
    out.cell = scores.cell;
    out.submitted_only.resize(np);
    out.missed_rounds.resize(np, 0);
    std::optional<double> worst;
    for (std::size_t p = 0; p < np; ++p) {
        if (scores.per_round[p].size() != n_rounds)
            throw DomainError("participants must have one entry per round of the cell");
        double sum = 0.0;
        int n = 0;
        for (const auto& s : scores.per_round[p]) {
            if (s) {
                sum += *s;
                ++n;
            }
        }
        out.missed_rounds[p] = static_cast<int>(n_rounds) - n;
        if (n > 0) {
            out.submitted_only[p] = sum / n;
            worst = std::max(worst.value_or(*out.submitted_only[p]), *out.submitted_only[p]);
        }
    }
    if (!worst) throw DomainError("no participant submitted for " + scores.cell.label());

    out.imputed_value = kImputationFactor * *worst;
    out.completed.resize(np);
    for (std::size_t p = 0; p < np; ++p) {
        double sum = 0.0;
        for (const auto& s : scores.per_round[p]) sum += s ? *s : out.imputed_value;
        out.completed[p] = sum / static_cast<double>(n_rounds);
    }
    return out;
}

std::vector<double> fractional_ranks(std::span<const double> values, ScoreOrder order) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return order == ScoreOrder::lower_is_better ? values[a] < values[b] : values[a] > values[b];
    });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && values[idx[j + 1]] == values[idx[i]]) ++j;
        // Positions i+1 .. j+1 share the average rank.
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

RankMatrix rank_cells(const ScoreMatrix& matrix, ScoreOrder order) {
    if (matrix.values.size() != matrix.cells.size()) throw DomainError("one value row per cell required");
    RankMatrix out{matrix.participants, matrix.cells, {}};
    for (std::size_t c = 0; c < matrix.cells.size(); ++c) {
        const auto& row = matrix.values[c];
        if (row.size() != matrix.participants.size())
            throw DomainError("every participant needs a value in " + matrix.cells[c].label());
        for (double v : row)
            if (!std::isfinite(v)) throw DomainError("non-finite score in " + matrix.cells[c].label());
        out.ranks.push_back(fractional_ranks(row, order));
    }
    return out;
}

std::string_view tiebreak_name(Tiebreak t) {
    switch (t) {
    case Tiebreak::none: return "none";
    case Tiebreak::best_rank: return "best_rank";
    case Tiebreak::temperature_rank: return "temperature_rank";
    case Tiebreak::coin_flip: return "coin_flip";
    }
    return "none";
}

std::vector<std::uint64_t> coin_flip_keys(std::span<const std::string> participants, std::uint64_t seed) {
    std::vector<std::size_t> idx(participants.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return participants[a] < participants[b]; });
    std::mt19937_64 gen(seed);
    std::vector<std::uint64_t> keys(participants.size());
    for (auto i : idx) keys[i] = gen();
    return keys;
}

std::vector<LeaderboardEntry> overall_ranking(const RankMatrix& matrix, std::uint64_t seed) {
    const auto np = matrix.participants.size();
    const auto nc = matrix.cells.size();
    std::vector<LeaderboardEntry> entries(np);
    std::size_t n_temp = 0;
    for (const auto& cell : matrix.cells) n_temp += cell.target == TargetKind::temperature;

    for (std::size_t p = 0; p < np; ++p) {
        double sum = 0.0, temp_sum = 0.0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < nc; ++c) {
            const double r = matrix.ranks[c][p];
            sum += r;
            best = std::min(best, r);
            if (matrix.cells[c].target == TargetKind::temperature) temp_sum += r;
        }
        auto& e = entries[p];
        e.alias = matrix.participants[p];
        e.average_rank = nc ? sum / static_cast<double>(nc) : 0.0;
        e.best_rank = nc ? best : 0.0;
        if (n_temp) e.temperature_average_rank = temp_sum / static_cast<double>(n_temp);
    }

    const auto keys = coin_flip_keys(matrix.participants, seed);
    std::vector<std::size_t> order(np);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ea = entries[a];
        const auto& eb = entries[b];
        if (ea.average_rank != eb.average_rank) return ea.average_rank < eb.average_rank;
        if (ea.best_rank != eb.best_rank) return ea.best_rank < eb.best_rank;
        if (ea.temperature_average_rank != eb.temperature_average_rank)
            return ea.temperature_average_rank < eb.temperature_average_rank;
        return keys[a] < keys[b];
    });

    // Criteria the sort falls through for a pair: 0 = average rank differs, 1 = best rank,
    // 2 = temperature rank, 3 = coin flip. Tied groups are contiguous, so neighbours suffice.
    auto depth = [&](const LeaderboardEntry& a, const LeaderboardEntry& b) {
        if (a.average_rank != b.average_rank) return 0;
        if (a.best_rank != b.best_rank) return 1;
        if (a.temperature_average_rank != b.temperature_average_rank) return 2;
        return 3;
    };
    constexpr Tiebreak by_depth[] = {Tiebreak::none, Tiebreak::best_rank, Tiebreak::temperature_rank,
                                     Tiebreak::coin_flip};
    for (std::size_t i = 0; i < np; ++i) {
        int d = 0;
        if (i > 0) d = std::max(d, depth(entries[order[i]], entries[order[i - 1]]));
        if (i + 1 < np) d = std::max(d, depth(entries[order[i]], entries[order[i + 1]]));
        entries[order[i]].tiebreak_applied = by_depth[d];
    }

    std::vector<LeaderboardEntry> out;
    out.reserve(np);
    for (std::size_t i = 0; i < np; ++i) {
        out.push_back(entries[order[i]]);
        out.back().final_position = static_cast<int>(i + 1);
    }
    return out;
}

ShareBeatingBenchmark share_beating_benchmark(std::span<const ScoreRecord> records,
                                              std::span<const ScoreRecord> benchmark_records) {
    if (benchmark_records.empty()) throw DataError("benchmark has no scores for this round and target");
    const auto& first = benchmark_records.front();
    std::map<int, double> bench;
    for (const auto& b : benchmark_records) {
        if (b.target != first.target || b.round_date != first.round_date)
            throw DomainError("benchmark records must share round and target");
        bench[b.horizon] = b.mean_quantile_score;
    }

    std::map<std::string, std::map<int, double>> by_participant;
    for (const auto& r : records) {
        if (r.target != first.target || r.round_date != first.round_date)
            throw DomainError("participant records must share the benchmark's round and target");
        by_participant[r.participant][r.horizon] = r.mean_quantile_score;
    }

    ShareBeatingBenchmark out;
    for (const auto& [alias, scores] : by_participant) {
        double own = 0.0, ref = 0.0;
        bool complete = true;
        for (const auto& [h, b] : bench) {
            const auto it = scores.find(h);
            if (it == scores.end()) {
                complete = false;
                break;
            }
            own += it->second;
            ref += b;
        }
        if (!complete) continue;
        ++out.n_participants;
        if (ref > own) ++out.n_beating;
    }
    if (out.n_participants > 0) out.share = static_cast<double>(out.n_beating) / out.n_participants;
    return out;
}

} // namespace qhub
