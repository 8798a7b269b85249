#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string_view>
#include <vector>

#include "ocdm/core.hpp"
#include "ocdm/distributions.hpp"

namespace ocdm {

/// What one buffer update did. Distances are only meaningful for strategies
/// that evaluate a target (greedy and its single-label-only variant); the
/// others leave them as NaN. scan_count counts candidate evaluations in the
/// greedy deletion loop.
struct UpdateReport {
    std::vector<std::uint64_t> deleted_sample_ids;
    double distance_before = std::numeric_limits<double>::quiet_NaN();
    double distance_after = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t scan_count = 0;
};

/// Stream-side context a strategy may consult. `freq` has already been
/// updated with the incoming batch; `stream_count_before` is the number of
/// samples that arrived before this batch (for per-sample position counting).
struct UpdateContext {
    const FrequencyTracker& freq;
    std::uint64_t stream_count_before = 0;
};

class UpdateStrategy {
public:
    virtual ~UpdateStrategy() = default;
    virtual UpdateReport update(MemoryBuffer& buf, std::vector<Sample> batch,
                                const UpdateContext& ctx) = 0;
    virtual std::string_view name() const = 0;
};

enum class StrategyKind { Ocdm, Reservoir, OnlyOne, Random, Max };

struct StrategyOptions {
    AllocationPower rho{0.0};
    DistanceKind distance = DistanceKind::KlDivergence;
    KlDirection direction = KlDirection::MemoryFirst;
    std::uint64_t seed = 1;
};

std::unique_ptr<UpdateStrategy> make_strategy(StrategyKind kind,
                                              const StrategyOptions& options);

StrategyKind strategy_kind_from_name(std::string_view name);
std::string_view strategy_name(StrategyKind kind);

/// Tolerance below which two candidate distances count as tied; ties are
/// broken uniformly at random.
inline constexpr double kTieTolerance = 1e-12;

/// Observer invoked before each greedy deletion commits, with the remaining
/// pool, the chosen index and its evaluated post-deletion distance. Used by
/// tests to re-check step optimality against an independent scan.
struct GreedyStep {
    std::span<const Sample> pool;
    std::size_t chosen_index;
    double chosen_distance;
};
using GreedyObserver = std::function<void(const GreedyStep&)>;

struct GreedyResult {
    std::vector<Sample> kept;
    std::vector<Sample> deleted;
    double final_distance = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t scan_count = 0;
};

/// Greedy deletion: shrinks `pool` to `target_size` by repeatedly removing
/// the sample whose removal leaves the class distribution closest to
/// `target`. Each step evaluates every remaining candidate by decrementing a
/// working copy of the counts, measuring the distance, and restoring.
GreedyResult greedy_reduce(std::vector<Sample> pool, std::size_t target_size,
                           const ClassDistribution& target, DistanceKind kind,
                           KlDirection direction, Rng& rng,
                           const GreedyObserver* observer = nullptr);

/// One greedy deletion step over explicit candidates: returns the index whose
/// removal minimizes the post-deletion distance (ties uniform at random).
/// `working` must hold the pooled counts including every candidate. When
/// `out_distances` is given it receives one evaluated distance per candidate.
struct ArgminResult {
    std::size_t index = 0;
    double distance = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t scans = 0;
};
ArgminResult greedy_delete_argmin(const ClassCounts& working,
                                  std::span<const Sample> candidates,
                                  const ClassDistribution& target,
                                  DistanceKind kind, KlDirection direction,
                                  Rng& rng,
                                  std::vector<double>* out_distances = nullptr);

}  // namespace ocdm
