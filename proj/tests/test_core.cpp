#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ocdm/core.hpp"

using namespace ocdm;

namespace {

Sample make_sample(std::uint64_t id, std::initializer_list<ClassId> labels) {
    return Sample{id, LabelSet(labels), {}};
}

}  // namespace

TEST_CASE("LabelSet sorts, deduplicates and rejects empty") {
    LabelSet set({3, 1, 3, 2});
    std::vector<ClassId> got(set.begin(), set.end());
    CHECK(got == std::vector<ClassId>{1, 2, 3});
    CHECK(set.contains(2));
    CHECK_FALSE(set.contains(0));
    CHECK(set.multi_label());
    CHECK_FALSE(LabelSet({5}).multi_label());
    CHECK_THROWS_AS(LabelSet(std::vector<ClassId>{}), std::invalid_argument);
}

TEST_CASE("buffer insert counts every label") {
    MemoryBuffer buf(3);
    buf.insert(make_sample(0, {0, 1}));
    CHECK(buf.size() == 1);
    CHECK(buf.counts().at(0) == 1);
    CHECK(buf.counts().at(1) == 1);

    buf.insert(make_sample(1, {0}));
    buf.insert(make_sample(2, {2}));
    CHECK(buf.size() == 3);
    CHECK(buf.counts().at(2) == 1);

    CHECK_THROWS_AS(buf.insert(make_sample(3, {0})), BufferFullError);
}

TEST_CASE("buffer remove decrements counts and empties cleanly") {
    MemoryBuffer buf(4);
    buf.insert(make_sample(0, {0}));       // a
    buf.insert(make_sample(1, {0, 1}));    // b
    Sample removed = buf.remove(1);
    CHECK(removed.sample_id == 1);
    CHECK(buf.counts().at(0) == 1);
    CHECK(buf.counts().at(1) == 0);

    removed = buf.remove(0);
    CHECK(removed.sample_id == 0);
    CHECK(buf.size() == 0);
    CHECK(buf.counts().total_labels() == 0);

    CHECK_THROWS_AS(buf.remove(0), std::out_of_range);
}

TEST_CASE("rebuild_counts hand tallies") {
    CHECK(rebuild_counts({}).total_labels() == 0);

    std::vector<Sample> two = {make_sample(0, {0}), make_sample(1, {0, 1})};
    ClassCounts counts = rebuild_counts(two);
    CHECK(counts.at(0) == 2);
    CHECK(counts.at(1) == 1);

    std::vector<Sample> three = {make_sample(0, {0, 1}), make_sample(1, {0, 1}),
                                 make_sample(2, {1})};
    counts = rebuild_counts(three);
    CHECK(counts.at(0) == 2);
    CHECK(counts.at(1) == 3);
    CHECK(counts.total_labels() == 5);
}

TEST_CASE("incremental counts match rebuild under random insert/remove") {
    Rng rng(7);
    for (int round = 0; round < 30; ++round) {
        MemoryBuffer buf(50);
        std::uint64_t next_id = 0;
        for (int op = 0; op < 300; ++op) {
            const bool can_insert = !buf.full();
            const bool can_remove = buf.size() > 0;
            const bool insert =
                can_insert && (!can_remove || rng.unit() < 0.6);
            if (insert) {
                std::vector<ClassId> labels;
                labels.push_back(static_cast<ClassId>(rng.below(8)));
                while (labels.size() < 4 && rng.unit() < 0.3)
                    labels.push_back(static_cast<ClassId>(rng.below(8)));
                buf.insert(Sample{next_id++, LabelSet(std::move(labels)), {}});
            } else if (can_remove) {
                buf.remove(static_cast<std::size_t>(rng.below(buf.size())));
            }
            ClassCounts expected = rebuild_counts(buf.samples());
            CHECK(buf.counts().total_labels() == expected.total_labels());
            for (std::size_t c = 0; c < expected.num_classes(); ++c)
                CHECK(buf.counts().at(static_cast<ClassId>(c)) ==
                      expected.at(static_cast<ClassId>(c)));
            CHECK(buf.size() <= buf.capacity());
        }
    }
}

TEST_CASE("replace swaps one resident and keeps counts exact") {
    MemoryBuffer buf(2);
    buf.insert(make_sample(0, {0}));
    buf.insert(make_sample(1, {1, 2}));
    Sample evicted = buf.replace(1, make_sample(2, {0, 3}));
    CHECK(evicted.sample_id == 1);
    CHECK(buf.counts() == rebuild_counts(buf.samples()));
    CHECK(buf.counts().at(0) == 2);
    CHECK(buf.counts().at(1) == 0);
    CHECK(buf.counts().at(3) == 1);
}

TEST_CASE("take_all and replace_all keep the count invariant") {
    MemoryBuffer buf(3);
    buf.insert(make_sample(0, {0}));
    buf.insert(make_sample(1, {1}));
    std::vector<Sample> all = buf.take_all();
    CHECK(all.size() == 2);
    CHECK(buf.size() == 0);
    CHECK(buf.counts().total_labels() == 0);

    all.push_back(make_sample(2, {0, 1}));
    buf.replace_all(std::move(all));
    CHECK(buf.size() == 3);
    CHECK(buf.counts() == rebuild_counts(buf.samples()));

    std::vector<Sample> too_many;
    for (std::uint64_t i = 0; i < 4; ++i)
        too_many.push_back(make_sample(i, {0}));
    CHECK_THROWS_AS(buf.replace_all(std::move(too_many)), std::invalid_argument);
}

TEST_CASE("frequency tracker is monotone and memory independent") {
    FrequencyTracker freq;
    CHECK_FALSE(freq.any_seen());
    Rng rng(11);
    std::vector<std::int64_t> previous;
    for (int step = 0; step < 200; ++step) {
        std::vector<ClassId> labels;
        labels.push_back(static_cast<ClassId>(rng.below(12)));
        if (rng.unit() < 0.5)
            labels.push_back(static_cast<ClassId>(rng.below(12)));
        freq.observe(LabelSet(std::move(labels)));
        auto values = freq.values();
        for (std::size_t c = 0; c < previous.size(); ++c)
            CHECK(values[c] >= previous[c]);
        previous.assign(values.begin(), values.end());
    }
    CHECK(freq.any_seen());
}

TEST_CASE("payload bytes ride along untouched") {
    std::vector<std::byte> payload = {std::byte{0xde}, std::byte{0xad}};
    MemoryBuffer buf(1);
    buf.insert(Sample{42, LabelSet({0}), payload});
    Sample out = buf.remove(0);
    CHECK(out.payload == payload);
}

TEST_CASE("rng bounded draws stay in range and are deterministic") {
    Rng a(123);
    Rng b(123);
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t bound = 1 + i % 17;
        const std::uint64_t x = a.below(bound);
        CHECK(x < bound);
        CHECK(x == b.below(bound));
    }
    CHECK_THROWS_AS(a.below(0), std::invalid_argument);
}
