#include "ocdm/strategies.hpp"

#include <algorithm>
#include <cassert>
#include <optional>
#include <utility>

namespace ocdm {

namespace {

void decrement(std::vector<std::int64_t>& counts, std::int64_t& total,
               const LabelSet& labels) {
    for (ClassId c : labels) --counts[c];
    total -= static_cast<std::int64_t>(labels.size());
}

void increment(std::vector<std::int64_t>& counts, std::int64_t& total,
               const LabelSet& labels) {
    for (ClassId c : labels) ++counts[c];
    total += static_cast<std::int64_t>(labels.size());
}

// Inserts min(batch.size(), free_space) randomly chosen batch samples and
// returns the leftovers, in place, as the shrunken batch.
std::vector<Sample> warmup_fill(MemoryBuffer& buf, std::vector<Sample> batch,
                                Rng& rng) {
    const std::size_t take = std::min(batch.size(), buf.free_space());
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j =
            i + static_cast<std::size_t>(rng.below(batch.size() - i));
        std::swap(batch[i], batch[j]);
        buf.insert(std::move(batch[i]));
    }
    batch.erase(batch.begin(),
                batch.begin() + static_cast<std::ptrdiff_t>(take));
    return batch;
}

}  // namespace

ArgminResult greedy_delete_argmin(const ClassCounts& working,
                                  std::span<const Sample> candidates,
                                  const ClassDistribution& target,
                                  DistanceKind kind, KlDirection direction,
                                  Rng& rng,
                                  std::vector<double>* out_distances) {
    if (candidates.empty())
        throw std::invalid_argument("greedy_delete_argmin: no candidates");
    std::vector<std::int64_t> counts(working.values().begin(),
                                     working.values().end());
    counts.resize(std::max(counts.size(), target.size()), 0);
    if (counts.size() > target.size())
        throw std::invalid_argument(
            "greedy_delete_argmin: pool has classes the target does not cover");
    std::int64_t total = working.total_labels();

    CountDistanceEvaluator evaluator(target, kind, direction);
    std::vector<double> local;
    std::vector<double>& dists = out_distances ? *out_distances : local;
    dists.clear();
    dists.reserve(candidates.size());

    double best = std::numeric_limits<double>::infinity();
    for (const Sample& s : candidates) {
        decrement(counts, total, s.labels);
        const double d = evaluator.eval(counts, total);
        increment(counts, total, s.labels);
        dists.push_back(d);
        best = std::min(best, d);
    }

    std::vector<std::size_t> ties;
    for (std::size_t j = 0; j < dists.size(); ++j)
        if (dists[j] - best <= kTieTolerance) ties.push_back(j);
    const std::size_t chosen = ties[static_cast<std::size_t>(rng.below(ties.size()))];

    ArgminResult result;
    result.index = chosen;
    result.distance = dists[chosen];
    result.scans = candidates.size();
    return result;
}

GreedyResult greedy_reduce(std::vector<Sample> pool, std::size_t target_size,
                           const ClassDistribution& target, DistanceKind kind,
                           KlDirection direction, Rng& rng,
                           const GreedyObserver* observer) {
    if (target_size == 0)
        throw std::invalid_argument("greedy_reduce: target size must be >= 1");
    GreedyResult result;
    if (pool.size() <= target_size) {
        result.kept = std::move(pool);
        if (!result.kept.empty())
            result.final_distance = memory_target_distance(
                rebuild_counts(result.kept), target, kind, direction);
        return result;
    }

    ClassCounts pooled = rebuild_counts(pool);
    if (pooled.num_classes() > target.size())
        throw std::invalid_argument(
            "greedy_reduce: pool has classes the target does not cover");
    std::vector<std::int64_t> counts(pooled.values().begin(),
                                     pooled.values().end());
    counts.resize(target.size(), 0);
    std::int64_t total = pooled.total_labels();

    CountDistanceEvaluator evaluator(target, kind, direction);
    std::vector<double> dists;
    std::vector<std::size_t> ties;
    dists.reserve(pool.size());

    const std::size_t deletions = pool.size() - target_size;
    result.deleted.reserve(deletions);
    for (std::size_t k = 0; k < deletions; ++k) {
        dists.clear();
        double best = std::numeric_limits<double>::infinity();
        for (const Sample& s : pool) {
            decrement(counts, total, s.labels);
            const double d = evaluator.eval(counts, total);
            increment(counts, total, s.labels);
            dists.push_back(d);
            best = std::min(best, d);
        }
        result.scan_count += pool.size();

        ties.clear();
        for (std::size_t j = 0; j < dists.size(); ++j)
            if (dists[j] - best <= kTieTolerance) ties.push_back(j);
        const std::size_t chosen =
            ties[static_cast<std::size_t>(rng.below(ties.size()))];

        if (observer) (*observer)({pool, chosen, dists[chosen]});

        decrement(counts, total, pool[chosen].labels);
        std::swap(pool[chosen], pool.back());
        result.deleted.push_back(std::move(pool.back()));
        pool.pop_back();
    }

    result.final_distance = evaluator.eval(counts, total);
    result.kept = std::move(pool);
    return result;
}

namespace {

// Greedy distribution-matching update; the single-label-only variant
// differs just by a batch filter.
class GreedyFamilyStrategy : public UpdateStrategy {
public:
    GreedyFamilyStrategy(const StrategyOptions& options, bool single_label_only)
        : rho_(options.rho),
          kind_(options.distance),
          direction_(options.direction),
          single_label_only_(single_label_only),
          rng_(options.seed) {}

    UpdateReport update(MemoryBuffer& buf, std::vector<Sample> batch,
                        const UpdateContext& ctx) override {
        if (single_label_only_) {
            std::erase_if(batch,
                          [](const Sample& s) { return s.labels.multi_label(); });
        }

        UpdateReport report;
        std::optional<ClassDistribution> target;
        if (ctx.freq.any_seen()) target = target_distribution(ctx.freq, rho_);
        if (target && buf.size() > 0)
            report.distance_before =
                memory_target_distance(buf.counts(), *target, kind_, direction_);

        if (!buf.full() && !batch.empty())
            batch = warmup_fill(buf, std::move(batch), rng_);

        if (!batch.empty()) {
            if (!target)
                throw std::logic_error(
                    "greedy update: frequency tracker must observe the batch "
                    "before the update");
            std::vector<Sample> pool = buf.take_all();
            pool.reserve(pool.size() + batch.size());
            for (Sample& s : batch) pool.push_back(std::move(s));
            GreedyResult greedy = greedy_reduce(std::move(pool), buf.capacity(),
                                                *target, kind_, direction_, rng_);
            report.scan_count = greedy.scan_count;
            for (const Sample& s : greedy.deleted)
                report.deleted_sample_ids.push_back(s.sample_id);
            buf.replace_all(std::move(greedy.kept));
        }

        if (target && buf.size() > 0)
            report.distance_after =
                memory_target_distance(buf.counts(), *target, kind_, direction_);
        return report;
    }

    std::string_view name() const override {
        return single_label_only_ ? "onlyone" : "ocdm";
    }

private:
    AllocationPower rho_;
    DistanceKind kind_;
    KlDirection direction_;
    bool single_label_only_;
    Rng rng_;
};

class ReservoirStrategy : public UpdateStrategy {
public:
    explicit ReservoirStrategy(const StrategyOptions& options)
        : rng_(options.seed) {}

    UpdateReport update(MemoryBuffer& buf, std::vector<Sample> batch,
                        const UpdateContext& ctx) override {
        UpdateReport report;
        std::uint64_t position = ctx.stream_count_before;
        for (Sample& s : batch) {
            ++position;  // 1-indexed global position of this sample
            if (!buf.full()) {
                buf.insert(std::move(s));
                continue;
            }
            const std::uint64_t slot = rng_.below(position);
            if (slot < buf.capacity()) {
                Sample evicted =
                    buf.replace(static_cast<std::size_t>(slot), std::move(s));
                report.deleted_sample_ids.push_back(evicted.sample_id);
            }
        }
        return report;
    }

    std::string_view name() const override { return "reservoir"; }

private:
    Rng rng_;
};

class RandomStrategy : public UpdateStrategy {
public:
    explicit RandomStrategy(const StrategyOptions& options)
        : rng_(options.seed) {}

    UpdateReport update(MemoryBuffer& buf, std::vector<Sample> batch,
                        const UpdateContext&) override {
        UpdateReport report;
        if (!buf.full() && !batch.empty())
            batch = warmup_fill(buf, std::move(batch), rng_);
        if (batch.empty()) return report;

        std::vector<Sample> pool = buf.take_all();
        for (Sample& s : batch) pool.push_back(std::move(s));
        while (pool.size() > buf.capacity()) {
            const std::size_t j =
                static_cast<std::size_t>(rng_.below(pool.size()));
            std::swap(pool[j], pool.back());
            report.deleted_sample_ids.push_back(pool.back().sample_id);
            pool.pop_back();
        }
        buf.replace_all(std::move(pool));
        return report;
    }

    std::string_view name() const override { return "random"; }

private:
    Rng rng_;
};

class MaxStrategy : public UpdateStrategy {
public:
    explicit MaxStrategy(const StrategyOptions& options) : rng_(options.seed) {}

    UpdateReport update(MemoryBuffer& buf, std::vector<Sample> batch,
                        const UpdateContext&) override {
        UpdateReport report;
        if (!buf.full() && !batch.empty())
            batch = warmup_fill(buf, std::move(batch), rng_);
        if (batch.empty()) return report;

        std::vector<Sample> pool = buf.take_all();
        for (Sample& s : batch) pool.push_back(std::move(s));
        ClassCounts counts = rebuild_counts(pool);

        std::vector<ClassId> top_classes;
        std::vector<std::size_t> holders;
        while (pool.size() > buf.capacity()) {
            auto values = counts.values();
            const std::int64_t top =
                *std::max_element(values.begin(), values.end());
            top_classes.clear();
            for (std::size_t c = 0; c < values.size(); ++c)
                if (values[c] == top)
                    top_classes.push_back(static_cast<ClassId>(c));
            const ClassId target_class = top_classes[static_cast<std::size_t>(
                rng_.below(top_classes.size()))];

            holders.clear();
            for (std::size_t j = 0; j < pool.size(); ++j)
                if (pool[j].labels.contains(target_class)) holders.push_back(j);
            const std::size_t victim =
                holders[static_cast<std::size_t>(rng_.below(holders.size()))];

            counts.remove(pool[victim].labels);
            std::swap(pool[victim], pool.back());
            report.deleted_sample_ids.push_back(pool.back().sample_id);
            pool.pop_back();
        }
        buf.replace_all(std::move(pool));
        return report;
    }

    std::string_view name() const override { return "max"; }

private:
    Rng rng_;
};

}  // namespace

std::unique_ptr<UpdateStrategy> make_strategy(StrategyKind kind,
                                              const StrategyOptions& options) {
    switch (kind) {
        case StrategyKind::Ocdm:
            return std::make_unique<GreedyFamilyStrategy>(options, false);
        case StrategyKind::OnlyOne:
            return std::make_unique<GreedyFamilyStrategy>(options, true);
        case StrategyKind::Reservoir:
            return std::make_unique<ReservoirStrategy>(options);
        case StrategyKind::Random:
            return std::make_unique<RandomStrategy>(options);
        case StrategyKind::Max:
            return std::make_unique<MaxStrategy>(options);
    }
    throw std::invalid_argument("make_strategy: unknown strategy kind");
}

StrategyKind strategy_kind_from_name(std::string_view name) {
    if (name == "ocdm") return StrategyKind::Ocdm;
    if (name == "reservoir") return StrategyKind::Reservoir;
    if (name == "onlyone") return StrategyKind::OnlyOne;
    if (name == "random") return StrategyKind::Random;
    if (name == "max") return StrategyKind::Max;
    throw std::invalid_argument("unknown strategy: " + std::string(name));
}

std::string_view strategy_name(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::Ocdm: return "ocdm";
        case StrategyKind::Reservoir: return "reservoir";
        case StrategyKind::OnlyOne: return "onlyone";
        case StrategyKind::Random: return "random";
        case StrategyKind::Max: return "max";
    }
    return "unknown";
}

}  // namespace ocdm
