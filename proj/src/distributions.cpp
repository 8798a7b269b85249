#include "ocdm/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace ocdm {

bool ClassDistribution::valid() const {
    if (probs.empty()) return false;
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) return false;
        sum += p;
    }
    return std::abs(sum - 1.0) <= 1e-9;
}

ClassDistribution empirical_distribution(const ClassCounts& counts) {
    return empirical_distribution(counts, counts.num_classes());
}

ClassDistribution empirical_distribution(const ClassCounts& counts,
                                         std::size_t min_classes) {
    const std::int64_t total = counts.total_labels();
    if (total <= 0)
        throw std::domain_error("empirical_distribution: no labels counted");
    ClassDistribution dist;
    dist.probs.assign(std::max(counts.num_classes(), min_classes), 0.0);
    auto values = counts.values();
    for (std::size_t j = 0; j < values.size(); ++j)
        dist.probs[j] = static_cast<double>(values[j]) / static_cast<double>(total);
    return dist;
}

ClassDistribution target_distribution(const FrequencyTracker& freq,
                                      AllocationPower rho) {
    auto values = freq.values();
    ClassDistribution dist;
    dist.probs.assign(values.size(), 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] > 0) {
            dist.probs[i] = std::pow(static_cast<double>(values[i]), rho.rho);
            sum += dist.probs[i];
        }
    }
    if (sum <= 0.0)
        throw std::domain_error("target_distribution: no classes seen yet");
    for (double& p : dist.probs) p /= sum;
    return dist;
}

namespace {

double kl_divergence(std::span<const double> p, std::span<const double> q) {
    // Additive smoothing, then renormalization by the implied 1 + C*eps.
    const double denom = 1.0 + static_cast<double>(p.size()) * kKlSmoothingEpsilon;
    double sum = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double pj = (p[j] + kKlSmoothingEpsilon) / denom;
        const double qj = (q[j] + kKlSmoothingEpsilon) / denom;
        sum += pj * std::log(pj / qj);
    }
    // Rounding can leave a tiny negative residue when p ~= q.
    return sum < 0.0 ? 0.0 : sum;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
    double sum = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) sum += std::abs(p[j] - q[j]);
    return 0.5 * sum;
}

}  // namespace

double distance(std::span<const double> p, std::span<const double> q,
                DistanceKind kind) {
    if (p.size() != q.size())
        throw std::invalid_argument("distance: distribution lengths differ");
    switch (kind) {
        case DistanceKind::KlDivergence:
            return kl_divergence(p, q);
        case DistanceKind::TotalVariation:
            return total_variation(p, q);
    }
    throw std::invalid_argument("distance: unknown kind");
}

double distance(const ClassDistribution& p, const ClassDistribution& q,
                DistanceKind kind) {
    return distance(std::span<const double>(p.probs),
                    std::span<const double>(q.probs), kind);
}

double memory_target_distance(const ClassCounts& counts,
                              const ClassDistribution& target,
                              DistanceKind kind, KlDirection direction) {
    ClassDistribution p = empirical_distribution(counts, target.size());
    return direction == KlDirection::MemoryFirst ? distance(p, target, kind)
                                                 : distance(target, p, kind);
}

CountDistanceEvaluator::CountDistanceEvaluator(ClassDistribution target,
                                               DistanceKind kind,
                                               KlDirection direction)
    : target_(std::move(target)),
      kind_(kind),
      direction_(direction),
      probs_(target_.size(), 0.0) {}

double CountDistanceEvaluator::eval(std::span<const std::int64_t> counts,
                                    std::int64_t total) {
    if (counts.size() != probs_.size())
        throw std::invalid_argument(
            "CountDistanceEvaluator: count vector width differs from target");
    const double t = static_cast<double>(total);
    for (std::size_t j = 0; j < counts.size(); ++j)
        probs_[j] = static_cast<double>(counts[j]) / t;
    std::span<const double> p(probs_);
    std::span<const double> q(target_.probs);
    return direction_ == KlDirection::MemoryFirst ? distance(p, q, kind_)
                                                  : distance(q, p, kind_);
}

}  // namespace ocdm
