#pragma once

#include <span>
#include <vector>

#include "ocdm/core.hpp"

namespace ocdm {

/// Normalized nonnegative vector over the currently known class universe.
struct ClassDistribution {
    std::vector<double> probs;

    std::size_t size() const { return probs.size(); }
    /// Entries nonnegative and summing to 1 within 1e-9.
    bool valid() const;
};

/// Exponent shaping the target distribution: 0 allocates classes equally,
/// 1 allocates proportionally to stream frequency.
struct AllocationPower {
    double rho = 0.0;

    AllocationPower() = default;
    explicit AllocationPower(double r) : rho(r) {
        if (rho < 0.0 || rho > 1.0)
            throw std::invalid_argument("AllocationPower: rho must lie in [0, 1]");
    }
};

enum class DistanceKind {
    KlDivergence,
    TotalVariation,
};

/// Which distribution goes in the first (reference) slot of the KL sum.
/// MemoryFirst computes KL(memory || target). Total variation is symmetric,
/// so the choice only matters for KL.
enum class KlDirection {
    MemoryFirst,
    TargetFirst,
};

/// probs[j] = counts[j] / total label mass.
/// Throws std::domain_error when all counts are zero.
ClassDistribution empirical_distribution(const ClassCounts& counts);

/// Same, zero-padded to at least `min_classes` entries so it can be compared
/// against a wider target.
ClassDistribution empirical_distribution(const ClassCounts& counts,
                                         std::size_t min_classes);

/// probs[i] = freq[i]^rho / sum_j freq[j]^rho over classes seen so far;
/// classes never seen get probability 0 (for rho = 0 as well: 0^0 is treated
/// as 0 here, not 1). Throws std::domain_error when nothing has been seen.
ClassDistribution target_distribution(const FrequencyTracker& freq,
                                      AllocationPower rho);

/// Distance between two equal-length distributions.
///
/// KL is computed in nats with additive smoothing: both inputs get +1e-12
/// per class and are renormalized first, so disjoint support yields a large
/// finite value instead of infinity. Total variation is 0.5 * L1.
/// Throws std::invalid_argument on length mismatch.
double distance(std::span<const double> p, std::span<const double> q,
                DistanceKind kind);

double distance(const ClassDistribution& p, const ClassDistribution& q,
                DistanceKind kind);

/// Smoothing constant used by the KL path, exposed for tests.
inline constexpr double kKlSmoothingEpsilon = 1e-12;

/// Distance between a buffer's class counts (zero-padded to the target's
/// width) and the target, honoring the configured KL direction.
double memory_target_distance(const ClassCounts& counts,
                              const ClassDistribution& target,
                              DistanceKind kind, KlDirection direction);

/// Allocation-free distance evaluation from a raw count vector, numerically
/// identical to empirical_distribution + distance. Meant for hot loops that
/// evaluate many candidate count states against one fixed target.
class CountDistanceEvaluator {
public:
    CountDistanceEvaluator(ClassDistribution target, DistanceKind kind,
                           KlDirection direction);

    /// `counts` must have exactly target().size() entries; `total` is the
    /// label mass (must be > 0).
    double eval(std::span<const std::int64_t> counts, std::int64_t total);

    const ClassDistribution& target() const { return target_; }

private:
    ClassDistribution target_;
    DistanceKind kind_;
    KlDirection direction_;
    std::vector<double> probs_;
};

}  // namespace ocdm
