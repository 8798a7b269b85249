#include "ocdm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "ocdm/strategies.hpp"

namespace ocdm {

std::uint64_t guarded_binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // result stays <= guard here, so the product cannot overflow.
        result = result * (n - k + i) / i;
        if (result > kOracleSubsetGuard) return kOracleSubsetGuard + 1;
    }
    return result;
}

OracleResult brute_force_select(std::span<const Sample> pool, std::size_t keep,
                                const ClassDistribution& target,
                                DistanceKind kind, KlDirection direction) {
    const std::size_t n = pool.size();
    if (keep == 0 || keep > n)
        throw std::invalid_argument("brute_force_select: need 1 <= keep <= |pool|");
    const std::uint64_t subsets = guarded_binomial(n, keep);
    if (subsets > kOracleSubsetGuard)
        throw InstanceTooLargeError(
            "brute_force_select: C(" + std::to_string(n) + ", " +
            std::to_string(keep) + ") exceeds the enumeration guard of " +
            std::to_string(kOracleSubsetGuard));

    ClassCounts pooled = rebuild_counts(pool);
    if (pooled.num_classes() > target.size())
        throw std::invalid_argument(
            "brute_force_select: pool has classes the target does not cover");

    CountDistanceEvaluator evaluator(target, kind, direction);
    std::vector<std::int64_t> counts(target.size(), 0);
    std::int64_t total = 0;

    std::vector<std::size_t> indices(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        indices[i] = i;
        for (ClassId c : pool[i].labels) ++counts[c];
        total += static_cast<std::int64_t>(pool[i].labels.size());
    }

    constexpr double kTol = 1e-12;
    OracleResult result;
    result.best_distance = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, std::vector<std::size_t>>> near_best;

    const auto add_sample = [&](std::size_t i) {
        for (ClassId c : pool[i].labels) ++counts[c];
        total += static_cast<std::int64_t>(pool[i].labels.size());
    };
    const auto drop_sample = [&](std::size_t i) {
        for (ClassId c : pool[i].labels) --counts[c];
        total -= static_cast<std::int64_t>(pool[i].labels.size());
    };

    while (true) {
        const double d = evaluator.eval(counts, total);
        ++result.subsets_evaluated;
        if (d < result.best_distance) result.best_distance = d;
        if (d <= result.best_distance + kTol) near_best.emplace_back(d, indices);

        // Lexicographic successor; the changed suffix drives count updates.
        std::size_t i = keep;
        while (i > 0 && indices[i - 1] == n - keep + (i - 1)) --i;
        if (i == 0) break;
        --i;
        for (std::size_t j = i; j < keep; ++j) drop_sample(indices[j]);
        ++indices[i];
        for (std::size_t j = i + 1; j < keep; ++j) indices[j] = indices[j - 1] + 1;
        for (std::size_t j = i; j < keep; ++j) add_sample(indices[j]);
    }

    for (auto& [d, subset] : near_best)
        if (d - result.best_distance <= kTol)
            result.optimal_subsets.push_back(std::move(subset));
    return result;
}

GapStatistics greedy_gap(std::span<const Sample> pool, std::size_t keep,
                         const ClassDistribution& target, DistanceKind kind,
                         std::size_t trials, std::uint64_t base_seed,
                         KlDirection direction) {
    if (trials == 0) throw std::invalid_argument("greedy_gap: trials must be >= 1");
    OracleResult oracle = brute_force_select(pool, keep, target, kind, direction);

    GapStatistics stats;
    stats.oracle_best = oracle.best_distance;
    stats.gaps.reserve(trials);
    std::size_t matches = 0;
    double sum = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_seed(base_seed, t));
        std::vector<Sample> copy(pool.begin(), pool.end());
        GreedyResult greedy = greedy_reduce(std::move(copy), keep, target, kind,
                                            direction, rng);
        const double gap = greedy.final_distance - oracle.best_distance;
        stats.gaps.push_back(gap);
        stats.max_gap = std::max(stats.max_gap, gap);
        sum += gap;
        if (gap <= 1e-12) ++matches;
    }
    stats.mean_gap = sum / static_cast<double>(trials);
    stats.match_rate = static_cast<double>(matches) / static_cast<double>(trials);
    return stats;
}

}  // namespace ocdm
