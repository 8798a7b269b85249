#pragma once

#include <string>
#include <vector>

#include "ocdm/metrics.hpp"
#include "ocdm/oracle.hpp"
#include "ocdm/streamgen.hpp"

namespace ocdm::cli {

/// Synthetic-stream shape used by `run` and `gen`. When `stream_file` is
/// set it overrides the generator entirely.
struct StreamConfig {
    std::string stream_file;
    std::size_t tasks = 4;
    std::size_t classes_per_task = 8;
    std::int64_t max_class_size = 2400;
    std::int64_t min_class_size = 70;
    double colabel = 0.8;
    std::vector<std::size_t> task_order;  // empty = listed order
    bool shuffle = true;

    /// Materializes the synthetic StreamSpec for one seed.
    StreamSpec to_spec(std::uint64_t seed, std::int64_t batch_size) const;
};

struct ExperimentConfig {
    StreamConfig stream;
    std::string strategy = "ocdm";
    double rho = 0.0;
    std::string distance = "kl";               // kl | tv
    std::string kl_direction = "memory-first"; // memory-first | target-first
    std::size_t memory = 1000;
    std::int64_t batch = 10;
    std::vector<std::uint64_t> seeds = {1};
    std::string out_dir = "out";
    std::size_t jobs = 1;
    bool timing = true;
    std::uint64_t snapshot_period = 1;
};

/// Runs every seed (in parallel up to `jobs`), writing per-seed trace and
/// histogram files plus one aggregate summary.csv into out_dir.
void run_experiment(const ExperimentConfig& config);

struct OracleGapConfig {
    std::size_t pool_size = 12;
    std::size_t memory = 8;
    std::size_t classes = 3;
    std::size_t instances = 20;
    std::size_t trials = 20;
    bool single_label = false;
    double rho = 0.0;
    std::string distance = "kl";
    std::uint64_t seed = 1;
    std::string out_file = "oracle_gap.csv";
};

struct OracleGapReport {
    std::vector<GapStatistics> per_instance;
    double aggregate_match_rate = 0.0;
    double worst_gap = 0.0;
};

OracleGapReport run_oracle_gap(const OracleGapConfig& config);

struct BenchConfig {
    std::vector<std::size_t> memory_values = {250, 500, 1000, 2000};
    std::int64_t batch = 10;
    std::size_t updates = 100;
    std::size_t classes = 16;
    std::uint64_t seed = 1;
    std::string out_file;  // empty = no file
};

struct BenchPoint {
    std::size_t memory = 0;
    double mean_update_us = 0.0;
    std::uint64_t scans_per_update = 0;
};

struct BenchReport {
    std::vector<BenchPoint> points;
    double slope = 0.0;      // microseconds per memory slot
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Times full-buffer greedy updates across memory sizes and fits
/// mean update time against memory size.
BenchReport run_bench(const BenchConfig& config);

/// Full command-line entry point. Exit codes: 0 success, 1 runtime error,
/// 2 usage/config error.
int cli_main(const std::vector<std::string>& args);

DistanceKind parse_distance(const std::string& name);
KlDirection parse_direction(const std::string& name);

}  // namespace ocdm::cli
