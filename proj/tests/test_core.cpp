#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>

#include "shardstock/codec.hpp"
#include "shardstock/core.hpp"
#include "test_support.hpp"

using namespace shardstock;
using testsup::delta;
using testsup::key;
using testsup::record;

namespace {

// independently written FNV-1a-64, the shard-placement oracle
std::uint64_t fnv_ref(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // == 14695981039346656037
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        h = (h ^ static_cast<unsigned char>(bytes[i])) * 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

TEST_CASE("key accepts exactly 13 ASCII digits") {
    CHECK(Isbn13Key::parse("9780000004381").has_value());
    CHECK(Isbn13Key::parse("0000000000000").has_value());
    CHECK_FALSE(Isbn13Key::parse("978000000438").has_value());    // 12
    CHECK_FALSE(Isbn13Key::parse("97800000043810").has_value());  // 14
    CHECK_FALSE(Isbn13Key::parse("978000000438X").has_value());
    CHECK_FALSE(Isbn13Key::parse("978-000000438").has_value());
    CHECK_FALSE(Isbn13Key::parse("").has_value());
    CHECK_FALSE(Isbn13Key::parse("9780000004E81").has_value());
}

TEST_CASE("key ordering is lexicographic = numeric") {
    CHECK(key("9780000004381") < key("9780000010457"));
    CHECK(key("0000000000001") < key("9999999999999"));
    CHECK(key("9780000004381") == key("9780000004381"));
    std::vector<Isbn13Key> keys{key("9780000082215"), key("9780000004381"), key("9780000010457")};
    std::sort(keys.begin(), keys.end());
    CHECK(keys.front() == key("9780000004381"));
    CHECK(keys.back() == key("9780000082215"));
}

TEST_CASE("price is exact integer cents with two-decimal rendering") {
    CHECK(Price::from_cents(116)->to_string() == "1.16");
    CHECK(Price::from_cents(31)->to_string() == "0.31");
    CHECK(Price::from_cents(501)->to_string() == "5.01");
    CHECK(Price::from_cents(0)->to_string() == "0.00");
    CHECK(Price::from_cents(999'999'999).has_value());
    CHECK_FALSE(Price::from_cents(1'000'000'000).has_value());
}

TEST_CASE("exact money: render/parse round trip is lossless for all cents up to 1e6") {
    for (std::uint64_t cents = 0; cents <= 1'000'000; ++cents) {
        const Price p = *Price::from_cents(cents);
        const auto back = parse_price(p.to_string());
        REQUIRE(back.has_value());
        REQUIRE(back->cents() == cents);
    }
}

TEST_CASE("quantity bounds") {
    CHECK(Quantity::from_units(0)->units() == 0);
    CHECK(Quantity::from_units(999'999'999).has_value());
    CHECK_FALSE(Quantity::from_units(1'000'000'000).has_value());
}

TEST_CASE("fnv1a64 matches the published reference vectors") {
    CHECK(fnv1a64("") == 14695981039346656037ULL);
    // frozen from an independent implementation before this module was built
    CHECK(fnv1a64("9780000004381") == 2325439447409686213ULL);
    CHECK(fnv1a64("9783652774577") == 7554899643760208502ULL);
    CHECK(fnv1a64("9780000082215") == 17755427652654018713ULL);
    CHECK(fnv1a64("0000000000000") == 1368433092300514847ULL);
    CHECK(fnv1a64("9999999999999") == 18108100518111165480ULL);
}

TEST_CASE("partition_key: fixed vectors and degenerate single shard") {
    CHECK(partition_key(key("9780000004381"), 1) == 0);
    CHECK(partition_key(key("9780000004381"), 12) == partition_key(key("9780000004381"), 12));
    // 2325439447409686213 mod 12 / mod 7, frozen with the hash vectors above
    CHECK(partition_key(key("9780000004381"), 12) == 1);
    CHECK(partition_key(key("9780000004381"), 7) == 4);
    CHECK(partition_key(key("9783652774577"), 12) == 6);
    CHECK(partition_key(key("9999999999999"), 12) == 0);
}

TEST_CASE("partition totality and determinism for n in 1..64") {
    SplitMix64 rng(2024);
    std::vector<Isbn13Key> keys;
    for (int i = 0; i < 200; ++i) {
        std::string digits = std::to_string(rng.next() % 10'000'000'000'000ULL);
        digits.insert(0, 13 - digits.size(), '0');
        keys.push_back(key(digits));
    }
    for (std::size_t n = 1; n <= 64; ++n) {
        for (const Isbn13Key& k : keys) {
            const std::size_t shard = partition_key(k, n);
            CHECK(shard < n);
            CHECK(partition_key(k, n) == shard);
        }
    }
}

TEST_CASE("build_store rejects zero shards") {
    CHECK_THROWS_AS(ShardedStore(0), std::invalid_argument);
    CHECK_THROWS_AS(build_store({}, 0), std::invalid_argument);
}

TEST_CASE("build_store on empty input") {
    const auto built = build_store({}, 4);
    CHECK(built.store.shard_count() == 4);
    CHECK(built.store.size() == 0);
    CHECK(built.duplicate_keys == 0);
}

TEST_CASE("build_store over the sample rows, single shard") {
    const auto rows = testsup::sample_records();
    REQUIRE(rows.size() == 15);
    const auto built = build_store(rows, 1);
    CHECK(built.store.shard(0).size() == 15);
    CHECK(built.duplicate_keys == 0);
    const auto hit = built.store.lookup(key("9780000004381"));
    REQUIRE(hit.has_value());
    CHECK(hit->price.cents() == 116);
    CHECK(hit->quantity.units() == 91);
}

TEST_CASE("build_store: later duplicate wins and is counted") {
    const std::vector<Record> rows{record("9780000004381", 116, 91),
                                   record("9780000010457", 242, 424),
                                   record("9780000004381", 393, 495)};
    const auto built = build_store(rows, 3);
    CHECK(built.duplicate_keys == 1);
    CHECK(built.store.size() == 2);
    const auto hit = built.store.lookup(key("9780000004381"));
    REQUIRE(hit.has_value());
    CHECK(hit->price.cents() == 393);
    CHECK(hit->quantity.units() == 495);
}

TEST_CASE("build_store places every key in the shard its hash dictates") {
    const auto rows = testsup::unique_records(10'000, 7);
    const auto built = build_store(rows, 12);
    CHECK(built.store.size() == 10'000);

    std::size_t total = 0;
    for (std::size_t j = 0; j < 12; ++j) {
        total += built.store.shard(j).size();
        for (const auto& [k, v] : built.store.shard(j)) {
            CHECK(fnv_ref(k.view()) % 12 == j);  // full scan: only owned keys
        }
    }
    CHECK(total == 10'000);
    for (const Record& r : rows) {  // exhaustive re-check via the oracle
        const std::size_t expect = static_cast<std::size_t>(fnv_ref(r.key.view()) % 12);
        CHECK(built.store.shard(expect).contains(r.key));
        CHECK(built.store.lookup(r.key).has_value());
    }
}

TEST_CASE("lookup misses on an empty store") {
    const ShardedStore store(3);
    CHECK_FALSE(store.lookup(key("9780000004381")).has_value());
}

TEST_CASE("lookup of a sample row") {
    const auto built = build_store(testsup::sample_records(), 4);
    const auto hit = built.store.lookup(key("9780000018556"));
    REQUIRE(hit.has_value());
    CHECK(hit->price.cents() == 31);
    CHECK(hit->quantity.units() == 408);
}

TEST_CASE("read-your-write through apply_delta_to_shard") {
    auto built = build_store(testsup::sample_records(), 4);
    const DeltaEntry d = delta("9780000004381", 393, 495);
    auto& shard = built.store.shard(built.store.shard_of(d.key));
    CHECK(apply_delta_to_shard(shard, d, false) == ApplyOutcome::applied);
    const auto hit = built.store.lookup(d.key);
    REQUIRE(hit.has_value());
    CHECK(hit->price == d.new_price);
    CHECK(hit->quantity == d.new_quantity);
}

TEST_CASE("apply_delta_to_shard outcomes") {
    ShardedStore store(1);
    auto& shard = store.shard(0);

    SUBCASE("missing key leaves the shard unchanged") {
        CHECK(apply_delta_to_shard(shard, delta("9780000004381", 393, 495), false) ==
              ApplyOutcome::missing);
        CHECK(shard.empty());
    }
    SUBCASE("insert_missing inserts") {
        CHECK(apply_delta_to_shard(shard, delta("9780000004381", 31, 408), true) ==
              ApplyOutcome::inserted);
        REQUIRE(shard.size() == 1);
        CHECK(shard.at(key("9780000004381")) == StoredValue{*Price::from_cents(31),
                                                            *Quantity::from_units(408)});
    }
    SUBCASE("present key is overwritten") {
        shard.emplace(key("9780000004381"),
                      StoredValue{*Price::from_cents(116), *Quantity::from_units(91)});
        CHECK(apply_delta_to_shard(shard, delta("9780000004381", 393, 495), false) ==
              ApplyOutcome::applied);
        CHECK(shard.at(key("9780000004381")).price.cents() == 393);
        CHECK(shard.at(key("9780000004381")).quantity.units() == 495);
    }
}

TEST_CASE("size conservation: without inserts the store size never changes") {
    auto built = build_store(testsup::unique_records(500, 11), 8);
    const std::size_t before = built.store.size();
    SplitMix64 rng(99);
    for (int i = 0; i < 2'000; ++i) {
        std::string digits = std::to_string(rng.next() % 10'000'000'000'000ULL);
        digits.insert(0, 13 - digits.size(), '0');
        const DeltaEntry d = delta(digits, rng.next() % 100000, rng.next() % 1000);
        apply_delta_to_shard(built.store.shard(built.store.shard_of(d.key)), d, false);
        CHECK(built.store.size() == before);
    }
}

TEST_CASE("snapshot_sorted is ascending and complete") {
    const auto built = build_store(testsup::unique_records(1'000, 5), 6);
    const auto sorted = built.store.snapshot_sorted();
    REQUIRE(sorted.size() == 1'000);
    CHECK(std::is_sorted(sorted.begin(), sorted.end(),
                         [](const Record& a, const Record& b) { return a.key < b.key; }));
    std::set<std::string> seen;
    for (const Record& r : sorted) seen.emplace(r.key.view());
    CHECK(seen.size() == 1'000);
}

TEST_CASE("apply report balance helper") {
    ApplyReport r;
    r.applied = 3;
    r.missing_key = 2;
    r.inserted = 1;
    r.total_deltas = 6;
    CHECK(r.balanced());
    r.total_deltas = 7;
    CHECK_FALSE(r.balanced());
}
