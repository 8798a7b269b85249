#include "ocdm/core.hpp"

#include <algorithm>
#include <limits>
#include <utility>

namespace ocdm {

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be > 0");
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

double Rng::unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    // splitmix64 step over base + index.
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

LabelSet::LabelSet(std::vector<ClassId> labels) : labels_(std::move(labels)) {
    if (labels_.empty())
        throw std::invalid_argument("LabelSet: every sample carries at least one label");
    std::sort(labels_.begin(), labels_.end());
    labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
}

bool LabelSet::contains(ClassId c) const {
    return std::binary_search(labels_.begin(), labels_.end(), c);
}

void ClassCounts::add(const LabelSet& labels) {
    ensure_classes(static_cast<std::size_t>(labels.max_class()) + 1);
    for (ClassId c : labels) {
        ++counts_[c];
        ++total_;
    }
}

void ClassCounts::remove(const LabelSet& labels) {
    for (ClassId c : labels) {
        if (c >= counts_.size() || counts_[c] == 0)
            throw std::logic_error("ClassCounts::remove: count underflow");
        --counts_[c];
        --total_;
    }
}

void ClassCounts::ensure_classes(std::size_t num_classes) {
    if (num_classes > counts_.size()) counts_.resize(num_classes, 0);
}

std::int64_t ClassCounts::at(ClassId c) const {
    return c < counts_.size() ? counts_[c] : 0;
}

ClassCounts rebuild_counts(std::span<const Sample> samples) {
    ClassCounts counts;
    for (const Sample& s : samples) counts.add(s.labels);
    return counts;
}

MemoryBuffer::MemoryBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0)
        throw std::invalid_argument("MemoryBuffer: capacity must be positive");
    samples_.reserve(capacity);
}

void MemoryBuffer::insert(Sample s) {
    if (full()) throw BufferFullError{};
    counts_.add(s.labels);
    samples_.push_back(std::move(s));
}

Sample MemoryBuffer::remove(std::size_t index) {
    if (index >= samples_.size())
        throw std::out_of_range("MemoryBuffer::remove: index out of range");
    counts_.remove(samples_[index].labels);
    std::swap(samples_[index], samples_.back());
    Sample removed = std::move(samples_.back());
    samples_.pop_back();
    return removed;
}

Sample MemoryBuffer::replace(std::size_t index, Sample s) {
    if (index >= samples_.size())
        throw std::out_of_range("MemoryBuffer::replace: index out of range");
    counts_.remove(samples_[index].labels);
    counts_.add(s.labels);
    Sample evicted = std::exchange(samples_[index], std::move(s));
    return evicted;
}

const Sample& MemoryBuffer::at(std::size_t index) const {
    if (index >= samples_.size())
        throw std::out_of_range("MemoryBuffer::at: index out of range");
    return samples_[index];
}

std::vector<Sample> MemoryBuffer::take_all() {
    counts_ = ClassCounts{};
    return std::exchange(samples_, {});
}

void MemoryBuffer::replace_all(std::vector<Sample> samples) {
    if (samples.size() > capacity_)
        throw std::invalid_argument("MemoryBuffer::replace_all: contents exceed capacity");
    samples_ = std::move(samples);
    counts_ = rebuild_counts(samples_);
}

void FrequencyTracker::observe(const LabelSet& labels) {
    std::size_t needed = static_cast<std::size_t>(labels.max_class()) + 1;
    if (needed > freq_.size()) freq_.resize(needed, 0);
    for (ClassId c : labels) ++freq_[c];
}

void FrequencyTracker::observe_batch(std::span<const Sample> batch) {
    for (const Sample& s : batch) observe(s.labels);
}

std::int64_t FrequencyTracker::at(ClassId c) const {
    return c < freq_.size() ? freq_[c] : 0;
}

}  // namespace ocdm
