#pragma once

#include <vector>

#include "ocdm/core.hpp"
#include "ocdm/distributions.hpp"

namespace ocdm {

/// Thrown when a brute-force instance exceeds the enumeration guard.
struct InstanceTooLargeError : std::domain_error {
    explicit InstanceTooLargeError(const std::string& what)
        : std::domain_error(what) {}
};

/// Subsets whose enumeration cost the brute-force solver will accept.
inline constexpr std::uint64_t kOracleSubsetGuard = 2'000'000;

struct OracleResult {
    double best_distance = 0.0;
    /// Every size-M index set whose distance is within kTieTolerance-like
    /// 1e-12 of the minimum, in lexicographic order.
    std::vector<std::vector<std::size_t>> optimal_subsets;
    std::uint64_t subsets_evaluated = 0;
};

/// C(n, k), or kOracleSubsetGuard + 1 as soon as the value exceeds the guard.
std::uint64_t guarded_binomial(std::uint64_t n, std::uint64_t k);

/// Exact solver: enumerates every size-M subset of the pool and returns the
/// minimum distance to the target plus all minimizers. Enumeration walks
/// combinations in lexicographic order, updating counts incrementally
/// between adjacent subsets. Throws InstanceTooLargeError when
/// C(|pool|, M) exceeds the guard.
OracleResult brute_force_select(std::span<const Sample> pool, std::size_t keep,
                                const ClassDistribution& target,
                                DistanceKind kind,
                                KlDirection direction = KlDirection::MemoryFirst);

struct GapStatistics {
    double oracle_best = 0.0;
    double mean_gap = 0.0;
    double max_gap = 0.0;
    /// Fraction of trials whose greedy distance matched the oracle optimum
    /// within 1e-12.
    double match_rate = 0.0;
    std::vector<double> gaps;
};

/// Runs the greedy deletion `trials` times with distinct seeds against the
/// exact optimum for the same pool. gap = greedy distance - oracle best.
GapStatistics greedy_gap(std::span<const Sample> pool, std::size_t keep,
                         const ClassDistribution& target, DistanceKind kind,
                         std::size_t trials, std::uint64_t base_seed,
                         KlDirection direction = KlDirection::MemoryFirst);

}  // namespace ocdm
