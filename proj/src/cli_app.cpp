#include "ocdm/cli_app.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace ocdm::cli {

namespace fs = std::filesystem;

DistanceKind parse_distance(const std::string& name) {
    if (name == "kl") return DistanceKind::KlDivergence;
    if (name == "tv") return DistanceKind::TotalVariation;
    throw std::invalid_argument("unknown distance kind: " + name);
}

KlDirection parse_direction(const std::string& name) {
    if (name == "memory-first") return KlDirection::MemoryFirst;
    if (name == "target-first") return KlDirection::TargetFirst;
    throw std::invalid_argument("unknown KL direction: " + name);
}

StreamSpec StreamConfig::to_spec(std::uint64_t seed,
                                 std::int64_t batch_size) const {
    StreamSpec spec;
    spec.batch_size = batch_size;
    spec.seed = seed;
    spec.shuffle_within_task = shuffle;
    const std::vector<std::int64_t> sizes =
        power_law_sizes(classes_per_task, max_class_size, min_class_size);
    for (std::size_t t = 0; t < tasks; ++t) {
        TaskSpec task;
        for (std::size_t c = 0; c < classes_per_task; ++c)
            task.classes.push_back(
                static_cast<ClassId>(t * classes_per_task + c));
        task.class_sizes = sizes;
        task.colabel_prob = colabel;
        spec.tasks.push_back(std::move(task));
    }
    if (!task_order.empty()) spec = reorder_tasks(spec, task_order);
    return spec;
}

namespace {

struct SeedOutcome {
    std::uint64_t seed = 0;
    Summary summary;
};

void write_summary_csv(const fs::path& path,
                       const std::vector<SeedOutcome>& outcomes) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write summary file: " + path.string());
    out << std::setprecision(12);
    out << "seed,final_distance,mean_update_us,majority_count,moderate_count,"
           "minority_count,max_class_count,min_class_count\n";
    Summary mean;
    for (const SeedOutcome& o : outcomes) {
        out << o.seed << ',' << o.summary.final_distance << ','
            << o.summary.mean_update_us << ','
            << o.summary.tier_counts.at(Tier::Majority) << ','
            << o.summary.tier_counts.at(Tier::Moderate) << ','
            << o.summary.tier_counts.at(Tier::Minority) << ','
            << o.summary.max_class_count << ',' << o.summary.min_class_count
            << '\n';
        mean.final_distance += o.summary.final_distance;
        mean.mean_update_us += o.summary.mean_update_us;
    }
    const double n = static_cast<double>(outcomes.size());
    out << "mean," << mean.final_distance / n << ',' << mean.mean_update_us / n
        << ",,,,,\n";
}

void run_one_seed(const ExperimentConfig& config, std::uint64_t seed,
                  SeedOutcome& outcome) {
    const DistanceKind kind = parse_distance(config.distance);
    const KlDirection direction = parse_direction(config.kl_direction);
    const StrategyKind strategy_kind = strategy_kind_from_name(config.strategy);

    StrategyOptions options;
    options.rho = AllocationPower(config.rho);
    options.distance = kind;
    options.direction = direction;
    options.seed = derive_seed(seed, 1);
    auto strategy = make_strategy(strategy_kind, options);

    RunConfig run_config;
    run_config.capacity = config.memory;
    run_config.rho = AllocationPower(config.rho);
    run_config.kind = kind;
    run_config.direction = direction;
    run_config.snapshot_period = config.snapshot_period;
    run_config.measure_time = config.timing;

    RunResult result;
    if (!config.stream.stream_file.empty()) {
        FileStream stream =
            load_stream_file(config.stream.stream_file, config.batch);
        result = run_stream(stream, *strategy, run_config);
    } else {
        GeneratedStream stream =
            generate_stream(config.stream.to_spec(derive_seed(seed, 0),
                                                  config.batch));
        result = run_stream(stream, *strategy, run_config);
    }

    const auto tiers = tier_classes(result.freq);
    const fs::path dir(config.out_dir);
    write_trace_csv(dir / ("trace_seed" + std::to_string(seed) + ".csv"),
                    result.trace);
    write_histogram_csv(dir / ("hist_seed" + std::to_string(seed) + ".csv"),
                        result.final_counts, tiers);
    outcome.seed = seed;
    outcome.summary = summarize(result.trace, tiers);
}

}  // namespace

void run_experiment(const ExperimentConfig& config) {
    if (config.seeds.empty())
        throw std::invalid_argument("run: at least one seed required");
    if (config.memory < 1)
        throw std::invalid_argument("run: memory capacity must be >= 1");
    if (config.batch < 1)
        throw std::invalid_argument("run: batch size must be >= 1");
    if (config.rho < 0.0 || config.rho > 1.0)
        throw std::invalid_argument("run: rho must lie in [0, 1]");
    fs::create_directories(config.out_dir);

    std::vector<SeedOutcome> outcomes(config.seeds.size());
    const std::size_t jobs =
        std::max<std::size_t>(1, std::min(config.jobs, config.seeds.size()));
    if (jobs == 1) {
        for (std::size_t i = 0; i < config.seeds.size(); ++i)
            run_one_seed(config, config.seeds[i], outcomes[i]);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        std::mutex error_mutex;
        std::string first_error;
        for (std::size_t w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= config.seeds.size()) return;
                    try {
                        run_one_seed(config, config.seeds[i], outcomes[i]);
                    } catch (const std::exception& e) {
                        std::scoped_lock lock(error_mutex);
                        if (first_error.empty()) first_error = e.what();
                    }
                }
            });
        }
        for (std::thread& t : workers) t.join();
        if (!first_error.empty()) throw std::runtime_error(first_error);
    }

    write_summary_csv(fs::path(config.out_dir) / "summary.csv", outcomes);
}

OracleGapReport run_oracle_gap(const OracleGapConfig& config) {
    if (config.memory == 0 || config.memory >= config.pool_size)
        throw std::invalid_argument("oracle-gap: need 0 < memory < pool size");
    if (config.classes == 0)
        throw std::invalid_argument("oracle-gap: need at least one class");
    const DistanceKind kind = parse_distance(config.distance);

    OracleGapReport report;
    double match_sum = 0.0;
    for (std::size_t instance = 0; instance < config.instances; ++instance) {
        Rng rng(derive_seed(config.seed, instance));
        std::vector<Sample> pool;
        FrequencyTracker freq;
        for (std::size_t i = 0; i < config.pool_size; ++i) {
            std::vector<ClassId> labels;
            labels.push_back(static_cast<ClassId>(rng.below(config.classes)));
            if (!config.single_label) {
                for (std::size_t c = 0; c < config.classes; ++c)
                    if (rng.unit() < 0.35)
                        labels.push_back(static_cast<ClassId>(c));
            }
            Sample s{static_cast<std::uint64_t>(i), LabelSet(std::move(labels)), {}};
            freq.observe(s.labels);
            pool.push_back(std::move(s));
        }
        const ClassDistribution target =
            target_distribution(freq, AllocationPower(config.rho));
        GapStatistics stats =
            greedy_gap(pool, config.memory, target, kind, config.trials,
                       derive_seed(config.seed, 1000 + instance));
        match_sum += stats.match_rate;
        report.worst_gap = std::max(report.worst_gap, stats.max_gap);
        report.per_instance.push_back(std::move(stats));
    }
    report.aggregate_match_rate =
        match_sum / static_cast<double>(config.instances);

    if (!config.out_file.empty()) {
        std::ofstream out(config.out_file, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write report: " + config.out_file);
        out << std::setprecision(12);
        out << "instance,oracle_best,mean_gap,max_gap,match_rate\n";
        for (std::size_t i = 0; i < report.per_instance.size(); ++i) {
            const GapStatistics& g = report.per_instance[i];
            out << i << ',' << g.oracle_best << ',' << g.mean_gap << ','
                << g.max_gap << ',' << g.match_rate << '\n';
        }
        out << "aggregate,,," << report.worst_gap << ','
            << report.aggregate_match_rate << '\n';
    }
    return report;
}

namespace {

std::vector<Sample> random_batch(Rng& rng, std::size_t classes,
                                 std::int64_t batch, std::uint64_t& next_id) {
    std::vector<Sample> samples;
    for (std::int64_t i = 0; i < batch; ++i) {
        std::vector<ClassId> labels;
        labels.push_back(static_cast<ClassId>(rng.below(classes)));
        while (labels.size() < 3 && rng.unit() < 0.4)
            labels.push_back(static_cast<ClassId>(rng.below(classes)));
        samples.push_back(Sample{next_id++, LabelSet(std::move(labels)), {}});
    }
    return samples;
}

}  // namespace

BenchReport run_bench(const BenchConfig& config) {
    using clock = std::chrono::steady_clock;
    if (config.memory_values.empty())
        throw std::invalid_argument("bench: need at least one memory size");

    BenchReport report;
    for (std::size_t memory : config.memory_values) {
        Rng rng(derive_seed(config.seed, memory));
        std::uint64_t next_id = 0;
        MemoryBuffer buf(memory);
        FrequencyTracker freq;
        StrategyOptions options;
        options.seed = derive_seed(config.seed, memory + 1);
        auto strategy = make_strategy(StrategyKind::Ocdm, options);

        std::uint64_t stream_count = 0;
        while (!buf.full()) {
            auto batch = random_batch(rng, config.classes, config.batch, next_id);
            freq.observe_batch(batch);
            const UpdateContext ctx{freq, stream_count};
            stream_count += batch.size();
            strategy->update(buf, std::move(batch), ctx);
        }

        const std::size_t warmup = std::max<std::size_t>(2, config.updates / 10);
        BenchPoint point;
        point.memory = memory;
        double total_us = 0.0;
        for (std::size_t u = 0; u < warmup + config.updates; ++u) {
            auto batch = random_batch(rng, config.classes, config.batch, next_id);
            freq.observe_batch(batch);
            const UpdateContext ctx{freq, stream_count};
            stream_count += batch.size();
            const auto t0 = clock::now();
            UpdateReport rep = strategy->update(buf, std::move(batch), ctx);
            const auto t1 = clock::now();
            if (u < warmup) continue;
            total_us += std::chrono::duration<double, std::micro>(t1 - t0).count();
            point.scans_per_update = rep.scan_count;
        }
        point.mean_update_us = total_us / static_cast<double>(config.updates);
        report.points.push_back(point);
    }

    // Least-squares fit of mean time against memory size.
    const double n = static_cast<double>(report.points.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const BenchPoint& p : report.points) {
        const double x = static_cast<double>(p.memory);
        sx += x;
        sy += p.mean_update_us;
        sxx += x * x;
        sxy += x * p.mean_update_us;
        syy += p.mean_update_us * p.mean_update_us;
    }
    const double var_x = sxx - sx * sx / n;
    const double var_y = syy - sy * sy / n;
    const double cov = sxy - sx * sy / n;
    if (var_x > 0.0) {
        report.slope = cov / var_x;
        report.intercept = (sy - report.slope * sx) / n;
        report.r_squared = var_y > 0.0 ? cov * cov / (var_x * var_y) : 1.0;
    }

    if (!config.out_file.empty()) {
        std::ofstream out(config.out_file, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write report: " + config.out_file);
        out << std::setprecision(12);
        out << "memory,mean_update_us,scans_per_update\n";
        for (const BenchPoint& p : report.points)
            out << p.memory << ',' << p.mean_update_us << ','
                << p.scans_per_update << '\n';
        out << "fit,slope=" << report.slope << ",intercept=" << report.intercept
            << ",r2=" << report.r_squared << '\n';
    }
    return report;
}

namespace {

void add_stream_options(CLI::App* cmd, StreamConfig& stream) {
    cmd->add_option("--stream-file", stream.stream_file,
                    "Load the stream from a file instead of generating one");
    cmd->add_option("--tasks", stream.tasks, "Number of synthetic tasks");
    cmd->add_option("--classes-per-task", stream.classes_per_task,
                    "Classes per synthetic task");
    cmd->add_option("--max-class-size", stream.max_class_size,
                    "Largest expected per-class sample count per task");
    cmd->add_option("--min-class-size", stream.min_class_size,
                    "Smallest expected per-class sample count per task");
    cmd->add_option("--colabel", stream.colabel,
                    "Co-label probability scale in [0, 1]");
    cmd->add_option("--task-order", stream.task_order,
                    "Permutation of task indices, e.g. 3,0,1,2")
        ->delimiter(',');
    cmd->add_flag("--shuffle,!--no-shuffle", stream.shuffle,
                  "Shuffle samples within each task (default on)");
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"Replay-buffer strategies for imbalanced multi-label streams"};
    app.require_subcommand(1);

    ExperimentConfig run_config;
    CLI::App* run_cmd = app.add_subcommand(
        "run", "Run a strategy over a stream and write traces");
    run_cmd->set_config("--config", "", "Flat key=value config file");
    add_stream_options(run_cmd, run_config.stream);
    run_cmd->add_option("--strategy", run_config.strategy,
                        "ocdm | reservoir | onlyone | random | max")
        ->check(CLI::IsMember({"ocdm", "reservoir", "onlyone", "random", "max"}));
    run_cmd->add_option("--rho", run_config.rho, "Allocation power in [0, 1]")
        ->check(CLI::Range(0.0, 1.0));
    run_cmd->add_option("--distance", run_config.distance, "kl | tv")
        ->check(CLI::IsMember({"kl", "tv"}));
    run_cmd->add_option("--kl-direction", run_config.kl_direction,
                        "memory-first | target-first")
        ->check(CLI::IsMember({"memory-first", "target-first"}));
    run_cmd->add_option("--memory", run_config.memory, "Memory capacity");
    run_cmd->add_option("--batch", run_config.batch, "Stream batch size");
    run_cmd->add_option("--seeds", run_config.seeds,
                        "Comma-separated seed list")
        ->delimiter(',')
        ->envname("OCDM_SEED");
    run_cmd->add_option("--out", run_config.out_dir, "Output directory");
    run_cmd->add_option("--jobs", run_config.jobs, "Parallel seed jobs");
    run_cmd->add_flag("--timing,!--no-timing", run_config.timing,
                      "Record wall-clock update times (default on; disable "
                      "for byte-stable outputs)");
    run_cmd->add_option("--snapshot-period", run_config.snapshot_period,
                        "Record buffer counts every N steps (0 = final only)");

    OracleGapConfig gap_config;
    CLI::App* gap_cmd = app.add_subcommand(
        "oracle-gap", "Compare greedy deletion against the exact optimum");
    gap_cmd->set_config("--config", "", "Flat key=value config file");
    gap_cmd->add_option("--pool-size", gap_config.pool_size, "Pool size");
    gap_cmd->add_option("--memory", gap_config.memory, "Samples to keep");
    gap_cmd->add_option("--classes", gap_config.classes, "Class universe size");
    gap_cmd->add_option("--instances", gap_config.instances,
                        "Random instances to solve");
    gap_cmd->add_option("--trials", gap_config.trials,
                        "Greedy trials per instance");
    gap_cmd->add_flag("--single-label", gap_config.single_label,
                      "Generate single-label pools only");
    gap_cmd->add_option("--rho", gap_config.rho, "Allocation power")
        ->check(CLI::Range(0.0, 1.0));
    gap_cmd->add_option("--distance", gap_config.distance, "kl | tv")
        ->check(CLI::IsMember({"kl", "tv"}));
    gap_cmd->add_option("--seed", gap_config.seed, "Base seed")
        ->envname("OCDM_SEED");
    gap_cmd->add_option("--out", gap_config.out_file, "Report file");

    BenchConfig bench_config;
    CLI::App* bench_cmd = app.add_subcommand(
        "bench", "Time greedy updates across memory sizes");
    bench_cmd->set_config("--config", "", "Flat key=value config file");
    bench_cmd->add_option("--memory-list", bench_config.memory_values,
                          "Memory sizes, e.g. 250,500,1000,2000")
        ->delimiter(',');
    bench_cmd->add_option("--batch", bench_config.batch, "Batch size");
    bench_cmd->add_option("--updates", bench_config.updates,
                          "Timed updates per memory size");
    bench_cmd->add_option("--classes", bench_config.classes,
                          "Class universe size");
    bench_cmd->add_option("--seed", bench_config.seed, "Base seed")
        ->envname("OCDM_SEED");
    bench_cmd->add_option("--out", bench_config.out_file, "Report file");

    StreamConfig gen_stream;
    std::string gen_out = "stream.tsv";
    std::uint64_t gen_seed = 1;
    std::int64_t gen_batch = 10;
    CLI::App* gen_cmd =
        app.add_subcommand("gen", "Write a synthetic stream file");
    gen_cmd->set_config("--config", "", "Flat key=value config file");
    add_stream_options(gen_cmd, gen_stream);
    gen_cmd->add_option("--seed", gen_seed, "Stream seed")->envname("OCDM_SEED");
    gen_cmd->add_option("--batch", gen_batch, "Batch size recorded in spec");
    gen_cmd->add_option("--out", gen_out, "Output stream file");

    // CLI11 wants argv in reverse order for its vector overload.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) {
            run_experiment(run_config);
        } else if (gap_cmd->parsed()) {
            OracleGapReport report = run_oracle_gap(gap_config);
            std::cout << "oracle-gap: instances=" << report.per_instance.size()
                      << " match_rate=" << report.aggregate_match_rate
                      << " worst_gap=" << report.worst_gap << '\n';
        } else if (bench_cmd->parsed()) {
            BenchReport report = run_bench(bench_config);
            for (const BenchPoint& p : report.points)
                std::cout << "bench: memory=" << p.memory
                          << " mean_update_us=" << p.mean_update_us
                          << " scans_per_update=" << p.scans_per_update << '\n';
            std::cout << "bench: slope=" << report.slope
                      << " intercept=" << report.intercept
                      << " r2=" << report.r_squared << '\n';
        } else if (gen_cmd->parsed()) {
            GeneratedStream stream =
                generate_stream(gen_stream.to_spec(gen_seed, gen_batch));
            write_stream_file(gen_out, stream.samples());
            std::cout << "gen: wrote " << stream.samples().size()
                      << " samples to " << gen_out << '\n';
        }
    } catch (const InstanceTooLargeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace ocdm::cli
