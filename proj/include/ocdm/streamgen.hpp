#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ocdm/core.hpp"

namespace ocdm {

/// Thrown by the stream-file loader; the message names the offending line.
struct StreamParseError : std::runtime_error {
    explicit StreamParseError(const std::string& what)
        : std::runtime_error(what) {}
};

/// One task of a synthetic stream: a disjoint slice of the class universe
/// with an imbalance profile and a co-labeling model.
///
/// class_sizes are the expected total per-class label counts (primary draws
/// plus co-label additions). The generator solves a small linear system so
/// that the realized counts track class_sizes in expectation; infeasible
/// profiles (a class receiving more co-labels than its target size) are
/// clipped at zero primary draws.
struct TaskSpec {
    std::vector<ClassId> classes;
    std::vector<std::int64_t> class_sizes;
    /// Scalar model: class j is co-added to a sample with primary class i
    /// with probability colabel_prob * class_sizes[j] / max(class_sizes).
    double colabel_prob = 0.0;
    /// Optional explicit matrix, indexed by position within `classes`;
    /// entry [i][j] is the probability that j is added when the primary is i.
    /// When non-empty it overrides the scalar model. Diagonal is ignored.
    std::vector<std::vector<double>> colabel_matrix;
    /// Total samples to draw. 0 means infer from class_sizes and the
    /// co-label model so realized counts match class_sizes.
    std::int64_t n_samples = 0;
};

struct StreamSpec {
    std::vector<TaskSpec> tasks;
    std::int64_t batch_size = 10;
    std::uint64_t seed = 1;
    bool shuffle_within_task = true;
};

/// Frequency tiers. Boundary counts (exactly 100 or exactly 600 with the
/// defaults) are moderate.
struct TierThresholds {
    std::int64_t majority_min = 600;  // strictly more than this => majority
    std::int64_t minority_max = 100;  // strictly less than this => minority

    TierThresholds() = default;
    TierThresholds(std::int64_t majority, std::int64_t minority)
        : majority_min(majority), minority_max(minority) {
        if (minority_max >= majority_min)
            throw std::invalid_argument(
                "TierThresholds: minority_max must be below majority_min");
    }
};

enum class Tier { Majority, Moderate, Minority };

std::string_view tier_name(Tier tier);

/// Uniform source of sample batches; implemented by the synthetic generator
/// and the stream-file reader.
class BatchSource {
public:
    virtual ~BatchSource() = default;
    /// Next batch, or nullopt at end of stream.
    virtual std::optional<std::vector<Sample>> next_batch() = 0;
};

/// Materialized synthetic stream. Deterministic: the same spec and seed
/// reproduce the same sample ids, labels and order, bit for bit.
class GeneratedStream : public BatchSource {
public:
    explicit GeneratedStream(const StreamSpec& spec);

    std::optional<std::vector<Sample>> next_batch() override;

    std::span<const Sample> samples() const { return samples_; }
    /// Number of batches each task contributes, in stream order.
    const std::vector<std::size_t>& batches_per_task() const {
        return batches_per_task_;
    }
    std::size_t num_classes() const { return num_classes_; }

private:
    std::vector<Sample> samples_;
    std::vector<std::size_t> task_ends_;  // exclusive sample index per task
    std::vector<std::size_t> batches_per_task_;
    std::size_t num_classes_ = 0;
    std::int64_t batch_size_;
    std::size_t cursor_ = 0;
    std::size_t task_index_ = 0;
};

/// Validates the spec and materializes the stream.
GeneratedStream generate_stream(const StreamSpec& spec);

/// Same tasks in a new order; everything else unchanged.
StreamSpec reorder_tasks(const StreamSpec& spec,
                         const std::vector<std::size_t>& permutation);

/// Fraction of class-c samples that carry more than one label.
/// Throws std::domain_error if no sample carries c.
double mlr(std::span<const Sample> dataset, ClassId c);

/// Unweighted mean of mlr over every class present in the dataset.
/// Throws std::domain_error on an empty dataset.
double amlr(std::span<const Sample> dataset);

/// Assigns each seen class to a tier by its stream frequency.
std::map<ClassId, Tier> tier_classes(const FrequencyTracker& freq,
                                     const TierThresholds& thresholds = {});

/// Line-delimited label stream: `sample_id<TAB>comma-separated-class-ids`,
/// ASCII, LF endings, no header.
class FileStream : public BatchSource {
public:
    FileStream(std::vector<Sample> samples, std::int64_t batch_size);
    std::optional<std::vector<Sample>> next_batch() override;
    std::span<const Sample> samples() const { return samples_; }

private:
    std::vector<Sample> samples_;
    std::int64_t batch_size_;
    std::size_t cursor_ = 0;
};

/// Parses a stream file into batches of `batch_size`. Parse errors name the
/// 1-based line number.
FileStream load_stream_file(const std::filesystem::path& path,
                            std::int64_t batch_size);

/// Writes samples in the stream-file format above.
void write_stream_file(const std::filesystem::path& path,
                       std::span<const Sample> samples);

/// Geometric interpolation from `largest` down to `smallest` over `classes`
/// entries; the stock long-tailed profile used by the CLI.
std::vector<std::int64_t> power_law_sizes(std::size_t classes,
                                          std::int64_t largest,
                                          std::int64_t smallest);

}  // namespace ocdm
