#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace ocdm {

/// Dense class index. Ids grow monotonically as new classes appear in a
/// stream; existing ids are never renumbered.
using ClassId = std::uint32_t;

/// Thrown by MemoryBuffer::insert when the buffer is already at capacity.
/// Callers are expected to route full-buffer updates through a strategy.
struct BufferFullError : std::logic_error {
    BufferFullError() : std::logic_error("memory buffer is full") {}
};

/// Deterministic random source shared by strategies and generators.
///
/// Wraps std::mt19937_64 (whose output sequence is pinned by the standard)
/// and derives bounded draws by rejection, so results are identical across
/// platforms and standard-library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);

    /// Uniform double in [0, 1).
    double unit();

    /// Fisher-Yates shuffle (portable, unlike std::shuffle).
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            using std::swap;
            swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// Derives an independent stream of seeds from one base seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Sorted, deduplicated, non-empty set of class labels.
class LabelSet {
public:
    /// Sorts and deduplicates. Throws std::invalid_argument if empty.
    explicit LabelSet(std::vector<ClassId> labels);
    LabelSet(std::initializer_list<ClassId> labels)
        : LabelSet(std::vector<ClassId>(labels)) {}

    std::size_t size() const { return labels_.size(); }
    bool contains(ClassId c) const;
    ClassId max_class() const { return labels_.back(); }
    bool multi_label() const { return labels_.size() > 1; }

    auto begin() const { return labels_.begin(); }
    auto end() const { return labels_.end(); }
    std::span<const ClassId> values() const { return labels_; }

    bool operator==(const LabelSet&) const = default;

private:
    std::vector<ClassId> labels_;
};

/// One stream element. The payload is opaque bytes: strategies only ever
/// look at labels, so the buffer can carry real features without knowing
/// their shape.
struct Sample {
    std::uint64_t sample_id = 0;
    LabelSet labels;
    std::vector<std::byte> payload;
};

/// Per-class tallies over a set of samples. A multi-label sample counts
/// once for every one of its classes, so total_labels() can exceed the
/// number of samples.
class ClassCounts {
public:
    ClassCounts() = default;
    explicit ClassCounts(std::size_t num_classes) : counts_(num_classes, 0) {}

    void add(const LabelSet& labels);
    /// Throws std::logic_error if any affected count would go negative.
    void remove(const LabelSet& labels);

    /// Zero-extends to at least `num_classes` entries.
    void ensure_classes(std::size_t num_classes);

    /// Count for class c; 0 for classes beyond the current universe.
    std::int64_t at(ClassId c) const;

    std::size_t num_classes() const { return counts_.size(); }
    std::int64_t total_labels() const { return total_; }
    std::span<const std::int64_t> values() const { return counts_; }

    bool operator==(const ClassCounts&) const = default;

private:
    std::vector<std::int64_t> counts_;
    std::int64_t total_ = 0;
};

/// Exact tally over a sample collection; the oracle against incrementally
/// maintained counts.
ClassCounts rebuild_counts(std::span<const Sample> samples);

/// Fixed-capacity sample store with incrementally maintained class counts.
///
/// Removal uses swap-remove (the last element fills the hole), so indices
/// are not stable across removals; strategies re-read labels per scan and
/// never rely on positional stability.
class MemoryBuffer {
public:
    explicit MemoryBuffer(std::size_t capacity);

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return samples_.size(); }
    bool full() const { return samples_.size() == capacity_; }
    std::size_t free_space() const { return capacity_ - samples_.size(); }

    /// Throws BufferFullError when size() == capacity().
    void insert(Sample s);

    /// Swap-removes and returns the sample at `index`.
    /// Throws std::out_of_range for invalid indices.
    Sample remove(std::size_t index);

    /// Swaps a resident for a new sample; returns the evicted resident.
    Sample replace(std::size_t index, Sample s);

    const Sample& at(std::size_t index) const;
    std::span<const Sample> samples() const { return samples_; }
    const ClassCounts& counts() const { return counts_; }

    /// Moves every resident out, leaving the buffer empty.
    std::vector<Sample> take_all();

    /// Replaces the contents wholesale. Throws std::invalid_argument if
    /// the collection exceeds capacity.
    void replace_all(std::vector<Sample> samples);

private:
    std::size_t capacity_;
    std::vector<Sample> samples_;
    ClassCounts counts_;
};

/// Running per-class frequency of the stream itself. Monotone: observes are
/// never undone, independent of what memory keeps.
class FrequencyTracker {
public:
    void observe(const LabelSet& labels);
    void observe_batch(std::span<const Sample> batch);

    std::int64_t at(ClassId c) const;
    std::size_t num_classes() const { return freq_.size(); }
    std::span<const std::int64_t> values() const { return freq_; }
    bool any_seen() const { return !freq_.empty(); }

private:
    std::vector<std::int64_t> freq_;
};

}  // namespace ocdm
