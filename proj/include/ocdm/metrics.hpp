#pragma once

#include <filesystem>
#include <map>

#include "ocdm/core.hpp"
#include "ocdm/distributions.hpp"
#include "ocdm/strategies.hpp"
#include "ocdm/streamgen.hpp"

namespace ocdm {

struct StepRecord {
    std::uint64_t step = 0;
    double distance = 0.0;
    double update_us = 0.0;
    std::uint64_t scan_count = 0;
    /// Buffer class counts at this step; empty unless the step fell on the
    /// trace's snapshot period.
    std::vector<std::int64_t> counts;
};

/// One experiment run, recorded after each completed batch update.
struct RunTrace {
    /// Snapshot buffer counts every this-many steps (0 disables, 1 = every
    /// step). The final step is always snapshotted so summaries can see the
    /// final histogram.
    std::uint64_t snapshot_period = 1;
    std::vector<StepRecord> steps;
};

/// Appends one step: the distance between the buffer's class distribution
/// and target_distribution(freq, rho), plus timing and scan instrumentation.
/// Throws std::domain_error on an empty buffer.
void record_step(RunTrace& trace, const MemoryBuffer& buf,
                 const FrequencyTracker& freq, AllocationPower rho,
                 DistanceKind kind, KlDirection direction, double update_us,
                 std::uint64_t scan_count);

struct Summary {
    double final_distance = 0.0;
    double mean_update_us = 0.0;
    std::map<Tier, std::int64_t> tier_counts;
    std::int64_t max_class_count = 0;
    std::int64_t min_class_count = 0;
};

/// Aggregates a finished trace. Tier counts and class-count extremes come
/// from the last snapshotted counts, restricted to classes in `tiers`
/// (i.e. classes actually seen in the stream).
/// Throws std::domain_error on an empty trace.
Summary summarize(const RunTrace& trace, const std::map<ClassId, Tier>& tiers);

/// `step,distance,update_us,scan_count` rows; one line per recorded step.
void write_trace_csv(const std::filesystem::path& path, const RunTrace& trace);

/// `class_id,count,tier` rows for every class in `tiers`.
void write_histogram_csv(const std::filesystem::path& path,
                         const ClassCounts& counts,
                         const std::map<ClassId, Tier>& tiers);

struct RunConfig {
    std::size_t capacity = 1000;
    AllocationPower rho{0.0};
    DistanceKind kind = DistanceKind::KlDivergence;
    KlDirection direction = KlDirection::MemoryFirst;
    std::uint64_t snapshot_period = 1;
    /// When false, update_us is recorded as 0 so outputs are byte-stable.
    bool measure_time = true;
};

struct RunResult {
    RunTrace trace;
    ClassCounts final_counts;
    FrequencyTracker freq;
    std::uint64_t total_samples = 0;
    std::uint64_t total_scans = 0;
};

/// Drives one strategy over one stream: per batch, observes frequencies,
/// applies the update (timed around the strategy call only), records a step.
RunResult run_stream(BatchSource& stream, UpdateStrategy& strategy,
                     const RunConfig& config);

}  // namespace ocdm
