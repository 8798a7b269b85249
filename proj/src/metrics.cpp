#include "ocdm/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>

namespace ocdm {

void record_step(RunTrace& trace, const MemoryBuffer& buf,
                 const FrequencyTracker& freq, AllocationPower rho,
                 DistanceKind kind, KlDirection direction, double update_us,
                 std::uint64_t scan_count) {
    if (buf.size() == 0)
        throw std::domain_error("record_step: buffer is empty");
    StepRecord record;
    record.step = trace.steps.empty() ? 0 : trace.steps.back().step + 1;
    ClassDistribution target = target_distribution(freq, rho);
    record.distance =
        memory_target_distance(buf.counts(), target, kind, direction);
    record.update_us = update_us;
    record.scan_count = scan_count;
    if (trace.snapshot_period > 0 &&
        record.step % trace.snapshot_period == 0) {
        auto values = buf.counts().values();
        record.counts.assign(values.begin(), values.end());
    }
    trace.steps.push_back(std::move(record));
}

Summary summarize(const RunTrace& trace, const std::map<ClassId, Tier>& tiers) {
    if (trace.steps.empty())
        throw std::domain_error("summarize: empty trace");

    Summary summary;
    summary.final_distance = trace.steps.back().distance;
    double total_us = 0.0;
    for (const StepRecord& s : trace.steps) total_us += s.update_us;
    summary.mean_update_us = total_us / static_cast<double>(trace.steps.size());

    const std::vector<std::int64_t>* counts = nullptr;
    for (auto it = trace.steps.rbegin(); it != trace.steps.rend(); ++it) {
        if (!it->counts.empty()) {
            counts = &it->counts;
            break;
        }
    }
    if (counts == nullptr)
        throw std::domain_error("summarize: trace has no counts snapshot");

    summary.tier_counts = {{Tier::Majority, 0}, {Tier::Moderate, 0},
                           {Tier::Minority, 0}};
    bool first = true;
    for (const auto& [class_id, tier] : tiers) {
        const std::int64_t count =
            class_id < counts->size() ? (*counts)[class_id] : 0;
        summary.tier_counts[tier] += count;
        if (first) {
            summary.max_class_count = summary.min_class_count = count;
            first = false;
        } else {
            summary.max_class_count = std::max(summary.max_class_count, count);
            summary.min_class_count = std::min(summary.min_class_count, count);
        }
    }
    return summary;
}

void write_trace_csv(const std::filesystem::path& path, const RunTrace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write trace file: " + path.string());
    out << "step,distance,update_us,scan_count\n";
    out << std::setprecision(12);
    for (const StepRecord& s : trace.steps)
        out << s.step << ',' << s.distance << ',' << s.update_us << ','
            << s.scan_count << '\n';
}

void write_histogram_csv(const std::filesystem::path& path,
                         const ClassCounts& counts,
                         const std::map<ClassId, Tier>& tiers) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write histogram file: " + path.string());
    out << "class_id,count,tier\n";
    for (const auto& [class_id, tier] : tiers)
        out << class_id << ',' << counts.at(class_id) << ','
            << tier_name(tier) << '\n';
}

RunResult run_stream(BatchSource& stream, UpdateStrategy& strategy,
                     const RunConfig& config) {
    using clock = std::chrono::steady_clock;

    RunResult result;
    result.trace.snapshot_period = config.snapshot_period;
    MemoryBuffer buf(config.capacity);

    while (auto batch = stream.next_batch()) {
        if (batch->empty()) continue;
        const std::uint64_t before = result.total_samples;
        result.freq.observe_batch(*batch);
        result.total_samples += batch->size();

        const UpdateContext ctx{result.freq, before};
        const auto t0 = clock::now();
        UpdateReport report = strategy.update(buf, std::move(*batch), ctx);
        const auto t1 = clock::now();
        const double us =
            config.measure_time
                ? std::chrono::duration<double, std::micro>(t1 - t0).count()
                : 0.0;
        result.total_scans += report.scan_count;
        record_step(result.trace, buf, result.freq, config.rho, config.kind,
                    config.direction, us, report.scan_count);
    }

    // Always leave a final snapshot for summaries and histograms.
    if (!result.trace.steps.empty() && result.trace.steps.back().counts.empty()) {
        auto values = buf.counts().values();
        result.trace.steps.back().counts.assign(values.begin(), values.end());
    }
    result.final_counts = buf.counts();
    return result;
}

}  // namespace ocdm
