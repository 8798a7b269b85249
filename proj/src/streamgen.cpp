#include "ocdm/streamgen.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace ocdm {

std::string_view tier_name(Tier tier) {
    switch (tier) {
        case Tier::Majority: return "majority";
        case Tier::Moderate: return "moderate";
        case Tier::Minority: return "minority";
    }
    return "unknown";
}

namespace {

void validate_spec(const StreamSpec& spec) {
    if (spec.tasks.empty())
        throw std::invalid_argument("StreamSpec: at least one task required");
    if (spec.batch_size < 1)
        throw std::invalid_argument("StreamSpec: batch_size must be >= 1");
    std::set<ClassId> seen;
    for (const TaskSpec& task : spec.tasks) {
        if (task.classes.empty())
            throw std::invalid_argument("TaskSpec: task without classes");
        if (task.classes.size() != task.class_sizes.size())
            throw std::invalid_argument(
                "TaskSpec: classes and class_sizes lengths differ");
        for (std::int64_t s : task.class_sizes)
            if (s <= 0)
                throw std::invalid_argument("TaskSpec: class sizes must be positive");
        for (ClassId c : task.classes)
            if (!seen.insert(c).second)
                throw std::invalid_argument(
                    "StreamSpec: classes must be disjoint across tasks");
        if (task.colabel_prob < 0.0 || task.colabel_prob > 1.0)
            throw std::invalid_argument("TaskSpec: colabel_prob outside [0, 1]");
        if (!task.colabel_matrix.empty()) {
            if (task.colabel_matrix.size() != task.classes.size())
                throw std::invalid_argument("TaskSpec: colabel_matrix shape mismatch");
            for (const auto& row : task.colabel_matrix) {
                if (row.size() != task.classes.size())
                    throw std::invalid_argument(
                        "TaskSpec: colabel_matrix shape mismatch");
                for (double p : row)
                    if (p < 0.0 || p > 1.0)
                        throw std::invalid_argument(
                            "TaskSpec: colabel probability outside [0, 1]");
            }
        }
        if (task.n_samples < 0)
            throw std::invalid_argument("TaskSpec: n_samples must be >= 0");
    }
}

// Co-label probabilities for a task, zero diagonal.
std::vector<std::vector<double>> colabel_matrix_for(const TaskSpec& task) {
    const std::size_t k = task.classes.size();
    std::vector<std::vector<double>> matrix(k, std::vector<double>(k, 0.0));
    if (!task.colabel_matrix.empty()) {
        matrix = task.colabel_matrix;
        for (std::size_t i = 0; i < k; ++i) matrix[i][i] = 0.0;
        return matrix;
    }
    const std::int64_t largest =
        *std::max_element(task.class_sizes.begin(), task.class_sizes.end());
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (i != j)
                matrix[i][j] = task.colabel_prob *
                               static_cast<double>(task.class_sizes[j]) /
                               static_cast<double>(largest);
    return matrix;
}

// Expected counts satisfy size_j = primaries_j + sum_i primaries_i * P[i][j],
// so the primary-draw weights come from solving (I + P^T) x = sizes, clipped
// at zero for infeasible profiles.
std::vector<double> primary_weights(const TaskSpec& task,
                                    const std::vector<std::vector<double>>& P) {
    const std::size_t k = task.classes.size();
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(
        static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    Eigen::VectorXd s(static_cast<Eigen::Index>(k));
    for (std::size_t j = 0; j < k; ++j) {
        s(static_cast<Eigen::Index>(j)) =
            static_cast<double>(task.class_sizes[j]);
        for (std::size_t i = 0; i < k; ++i)
            if (i != j)
                A(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) +=
                    P[i][j];
    }
    Eigen::VectorXd x = A.partialPivLu().solve(s);
    std::vector<double> weights(k);
    for (std::size_t i = 0; i < k; ++i)
        weights[i] = std::max(0.0, x(static_cast<Eigen::Index>(i)));
    return weights;
}

std::size_t draw_categorical(const std::vector<double>& cumulative, Rng& rng) {
    const double u = rng.unit() * cumulative.back();
    const auto it =
        std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative.begin()),
        cumulative.size() - 1);
}

std::vector<Sample> generate_task(const TaskSpec& task, Rng& rng,
                                  bool shuffle, std::uint64_t& next_id) {
    const std::size_t k = task.classes.size();
    const auto P = colabel_matrix_for(task);
    const std::vector<double> weights = primary_weights(task, P);

    double weight_sum = 0.0;
    std::vector<double> cumulative(k);
    for (std::size_t i = 0; i < k; ++i) {
        weight_sum += weights[i];
        cumulative[i] = weight_sum;
    }
    if (weight_sum <= 0.0)
        throw std::invalid_argument(
            "TaskSpec: no feasible primary-class weights (all clipped to zero)");

    const std::int64_t n = task.n_samples > 0
                               ? task.n_samples
                               : static_cast<std::int64_t>(std::llround(weight_sum));
    if (n < 1)
        throw std::invalid_argument("TaskSpec: task would generate no samples");

    std::vector<Sample> samples;
    samples.reserve(static_cast<std::size_t>(n));
    std::vector<ClassId> labels;
    for (std::int64_t draw = 0; draw < n; ++draw) {
        const std::size_t primary = draw_categorical(cumulative, rng);
        labels.clear();
        labels.push_back(task.classes[primary]);
        for (std::size_t j = 0; j < k; ++j) {
            if (j == primary || P[primary][j] <= 0.0) continue;
            if (rng.unit() < P[primary][j]) labels.push_back(task.classes[j]);
        }
        samples.push_back(Sample{next_id++, LabelSet(labels), {}});
    }
    if (shuffle) rng.shuffle(samples);
    return samples;
}

}  // namespace

GeneratedStream::GeneratedStream(const StreamSpec& spec)
    : batch_size_(spec.batch_size) {
    validate_spec(spec);
    Rng rng(spec.seed);
    std::uint64_t next_id = 0;
    for (const TaskSpec& task : spec.tasks) {
        std::vector<Sample> generated =
            generate_task(task, rng, spec.shuffle_within_task, next_id);
        const std::size_t batches =
            (generated.size() + static_cast<std::size_t>(batch_size_) - 1) /
            static_cast<std::size_t>(batch_size_);
        batches_per_task_.push_back(batches);
        for (Sample& s : generated) samples_.push_back(std::move(s));
        task_ends_.push_back(samples_.size());
        for (ClassId c : task.classes)
            num_classes_ = std::max(num_classes_, static_cast<std::size_t>(c) + 1);
    }
}

std::optional<std::vector<Sample>> GeneratedStream::next_batch() {
    if (cursor_ >= samples_.size()) return std::nullopt;
    // Batches never straddle a task boundary; a task's last batch may be short.
    while (task_index_ < task_ends_.size() && cursor_ >= task_ends_[task_index_])
        ++task_index_;
    const std::size_t limit = task_ends_[task_index_];
    const std::size_t end =
        std::min(limit, cursor_ + static_cast<std::size_t>(batch_size_));
    std::vector<Sample> batch(samples_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                              samples_.begin() + static_cast<std::ptrdiff_t>(end));
    cursor_ = end;
    return batch;
}

GeneratedStream generate_stream(const StreamSpec& spec) {
    return GeneratedStream(spec);
}

StreamSpec reorder_tasks(const StreamSpec& spec,
                         const std::vector<std::size_t>& permutation) {
    if (permutation.size() != spec.tasks.size())
        throw std::invalid_argument("reorder_tasks: permutation length mismatch");
    std::vector<bool> used(permutation.size(), false);
    for (std::size_t p : permutation) {
        if (p >= permutation.size() || used[p])
            throw std::invalid_argument("reorder_tasks: not a permutation");
        used[p] = true;
    }
    StreamSpec reordered = spec;
    reordered.tasks.clear();
    for (std::size_t p : permutation) reordered.tasks.push_back(spec.tasks[p]);
    return reordered;
}

double mlr(std::span<const Sample> dataset, ClassId c) {
    std::int64_t with_class = 0;
    std::int64_t multi = 0;
    for (const Sample& s : dataset) {
        if (!s.labels.contains(c)) continue;
        ++with_class;
        if (s.labels.multi_label()) ++multi;
    }
    if (with_class == 0)
        throw std::domain_error("mlr: class absent from dataset");
    return static_cast<double>(multi) / static_cast<double>(with_class);
}

double amlr(std::span<const Sample> dataset) {
    if (dataset.empty()) throw std::domain_error("amlr: empty dataset");
    std::set<ClassId> classes;
    for (const Sample& s : dataset)
        for (ClassId c : s.labels) classes.insert(c);
    double sum = 0.0;
    for (ClassId c : classes) sum += mlr(dataset, c);
    return sum / static_cast<double>(classes.size());
}

std::map<ClassId, Tier> tier_classes(const FrequencyTracker& freq,
                                     const TierThresholds& thresholds) {
    std::map<ClassId, Tier> tiers;
    auto values = freq.values();
    for (std::size_t c = 0; c < values.size(); ++c) {
        if (values[c] <= 0) continue;  // never seen
        Tier tier = Tier::Moderate;
        if (values[c] > thresholds.majority_min) tier = Tier::Majority;
        else if (values[c] < thresholds.minority_max) tier = Tier::Minority;
        tiers[static_cast<ClassId>(c)] = tier;
    }
    return tiers;
}

FileStream::FileStream(std::vector<Sample> samples, std::int64_t batch_size)
    : samples_(std::move(samples)), batch_size_(batch_size) {
    if (batch_size_ < 1)
        throw std::invalid_argument("FileStream: batch_size must be >= 1");
}

std::optional<std::vector<Sample>> FileStream::next_batch() {
    if (cursor_ >= samples_.size()) return std::nullopt;
    const std::size_t end =
        std::min(samples_.size(), cursor_ + static_cast<std::size_t>(batch_size_));
    std::vector<Sample> batch(samples_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                              samples_.begin() + static_cast<std::ptrdiff_t>(end));
    cursor_ = end;
    return batch;
}

namespace {

std::uint64_t parse_u64(const std::string& text, std::size_t line_no,
                        const char* what) {
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
        throw StreamParseError("line " + std::to_string(line_no) + ": bad " +
                               what + " '" + text + "'");
    try {
        return std::stoull(text);
    } catch (const std::exception&) {
        throw StreamParseError("line " + std::to_string(line_no) + ": bad " +
                               what + " '" + text + "'");
    }
}

}  // namespace

FileStream load_stream_file(const std::filesystem::path& path,
                            std::int64_t batch_size) {
    std::ifstream in(path);
    if (!in)
        throw StreamParseError("cannot open stream file: " + path.string());

    std::vector<Sample> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw StreamParseError("line " + std::to_string(line_no) +
                                   ": missing tab separator");
        if (line.find('\t', tab + 1) != std::string::npos)
            throw StreamParseError("line " + std::to_string(line_no) +
                                   ": unknown extra field");
        const std::uint64_t id =
            parse_u64(line.substr(0, tab), line_no, "sample id");

        std::vector<ClassId> labels;
        std::stringstream fields(line.substr(tab + 1));
        std::string field;
        while (std::getline(fields, field, ',')) {
            const std::uint64_t value = parse_u64(field, line_no, "class id");
            if (value > std::numeric_limits<ClassId>::max())
                throw StreamParseError("line " + std::to_string(line_no) +
                                       ": class id out of range");
            labels.push_back(static_cast<ClassId>(value));
        }
        if (labels.empty())
            throw StreamParseError("line " + std::to_string(line_no) +
                                   ": empty label list");
        samples.push_back(Sample{id, LabelSet(std::move(labels)), {}});
    }
    return FileStream(std::move(samples), batch_size);
}

void write_stream_file(const std::filesystem::path& path,
                       std::span<const Sample> samples) {
    std::ofstream out(path, std::ios::binary);  // binary keeps LF endings
    if (!out)
        throw std::runtime_error("cannot write stream file: " + path.string());
    for (const Sample& s : samples) {
        out << s.sample_id << '\t';
        bool first = true;
        for (ClassId c : s.labels) {
            if (!first) out << ',';
            out << c;
            first = false;
        }
        out << '\n';
    }
}

std::vector<std::int64_t> power_law_sizes(std::size_t classes,
                                          std::int64_t largest,
                                          std::int64_t smallest) {
    if (classes == 0)
        throw std::invalid_argument("power_law_sizes: need at least one class");
    if (smallest < 1 || largest < smallest)
        throw std::invalid_argument("power_law_sizes: need largest >= smallest >= 1");
    std::vector<std::int64_t> sizes(classes);
    if (classes == 1) {
        sizes[0] = largest;
        return sizes;
    }
    const double ratio = static_cast<double>(smallest) / static_cast<double>(largest);
    for (std::size_t i = 0; i < classes; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(classes - 1);
        sizes[i] = std::max<std::int64_t>(
            1, std::llround(static_cast<double>(largest) * std::pow(ratio, t)));
    }
    return sizes;
}

}  // namespace ocdm
