#pragma once

#include <array>
#include <cassert>
#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace shardstock {

// ---------------------------------------------------------------------------
// Domain types: 13-digit key, integer-cent price, quantity.
// ---------------------------------------------------------------------------

/// Exactly 13 ASCII decimal digits. Ordering is lexicographic byte order,
/// which equals numeric order because the length is fixed.
class Isbn13Key {
public:
    static constexpr std::size_t kLength = 13;

    constexpr Isbn13Key() noexcept { digits_.fill('0'); }

    /// Accepts exactly 13 ASCII digits; anything else is rejected.
    static std::optional<Isbn13Key> parse(std::string_view text) noexcept {
        if (text.size() != kLength) return std::nullopt;
        Isbn13Key key;
        for (std::size_t i = 0; i < kLength; ++i) {
            const char c = text[i];
            if (c < '0' || c > '9') return std::nullopt;
            key.digits_[i] = c;
        }
        return key;
    }

    constexpr std::string_view view() const noexcept { return {digits_.data(), kLength}; }
    constexpr const std::array<char, kLength>& digits() const noexcept { return digits_; }

    auto operator<=>(const Isbn13Key&) const = default;

private:
    std::array<char, kLength> digits_;
};

/// Money in integer cents, 0 .. 999,999,999. No floating point anywhere:
/// storage, codecs and arithmetic are exact.
class Price {
public:
    static constexpr std::uint64_t kMaxCents = 999'999'999;

    constexpr Price() noexcept = default;

    static constexpr std::optional<Price> from_cents(std::uint64_t cents) noexcept {
        if (cents > kMaxCents) return std::nullopt;
        Price p;
        p.cents_ = cents;
        return p;
    }

    constexpr std::uint64_t cents() const noexcept { return cents_; }

    /// Canonical rendering with exactly two decimal digits, e.g. 116 -> "1.16".
    std::string to_string() const {
        std::string out = std::to_string(cents_ / 100);
        out.push_back('.');
        out.push_back(static_cast<char>('0' + cents_ / 10 % 10));
        out.push_back(static_cast<char>('0' + cents_ % 10));
        return out;
    }

    auto operator<=>(const Price&) const = default;

private:
    std::uint64_t cents_ = 0;
};

/// Units on hand, 0 .. 999,999,999.
class Quantity {
public:
    static constexpr std::uint32_t kMaxUnits = 999'999'999;

    constexpr Quantity() noexcept = default;

    static constexpr std::optional<Quantity> from_units(std::uint64_t units) noexcept {
        if (units > kMaxUnits) return std::nullopt;
        Quantity q;
        q.units_ = static_cast<std::uint32_t>(units);
        return q;
    }

    constexpr std::uint32_t units() const noexcept { return units_; }
    std::string to_string() const { return std::to_string(units_); }

    auto operator<=>(const Quantity&) const = default;

private:
    std::uint32_t units_ = 0;
};

struct StoredValue {
    Price price;
    Quantity quantity;

    bool operator==(const StoredValue&) const = default;
};

/// One inventory row.
struct Record {
    Isbn13Key key;
    Price price;
    Quantity quantity;

    bool operator==(const Record&) const = default;
};

/// One stock-file update. Overwrites both price and quantity of the addressed
/// record. source_ordinal is the 0-based position in the stock stream and
/// defines last-write-wins order.
struct DeltaEntry {
    Isbn13Key key;
    Price new_price;
    Quantity new_quantity;
    std::uint64_t source_ordinal = 0;

    bool operator==(const DeltaEntry&) const = default;
};

// ---------------------------------------------------------------------------
// Partitioning
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kFnvOffsetBasis = 14695981039346656037ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t hash = kFnvOffsetBasis;
    for (const char c : bytes) {
        hash ^= static_cast<unsigned char>(c);
        hash *= kFnvPrime;
    }
    return hash;
}

/// Deterministic key -> shard assignment: FNV-1a-64 over the 13 key bytes,
/// reduced modulo the shard count. Total for any shard_count >= 1.
constexpr std::size_t partition_key(const Isbn13Key& key, std::size_t shard_count) noexcept {
    assert(shard_count >= 1);
    return static_cast<std::size_t>(fnv1a64(key.view()) % shard_count);
}

struct KeyHasher {
    std::size_t operator()(const Isbn13Key& key) const noexcept {
        return static_cast<std::size_t>(fnv1a64(key.view()));
    }
};

// ---------------------------------------------------------------------------
// Sharded store
// ---------------------------------------------------------------------------

/// N disjoint hash tables. Every key lives in exactly shard
/// partition_key(key, N).
///
/// Concurrency contract: distinct shards may be mutated concurrently without
/// coordination; a single shard admits at most one writer at a time. Any
/// number of readers are safe while no writer is active. The store is movable
/// across threads.
class ShardedStore {
public:
    using Shard = std::unordered_map<Isbn13Key, StoredValue, KeyHasher>;

    /// Throws std::invalid_argument when shard_count is zero.
    explicit ShardedStore(std::size_t shard_count);

    std::size_t shard_count() const noexcept { return shards_.size(); }

    std::size_t size() const noexcept {
        std::size_t total = 0;
        for (const Shard& s : shards_) total += s.size();
        return total;
    }

    std::size_t shard_of(const Isbn13Key& key) const noexcept {
        return partition_key(key, shards_.size());
    }

    Shard& shard(std::size_t index) { return shards_[index]; }
    const Shard& shard(std::size_t index) const { return shards_[index]; }

    /// Probes only the owning shard.
    std::optional<StoredValue> lookup(const Isbn13Key& key) const {
        const Shard& s = shards_[shard_of(key)];
        const auto it = s.find(key);
        if (it == s.end()) return std::nullopt;
        return it->second;
    }

    /// All records in ascending key order; the canonical write-back order.
    std::vector<Record> snapshot_sorted() const;

private:
    std::vector<Shard> shards_;
};

enum class ApplyOutcome { applied, missing, inserted };

/// Applies one delta to a shard. The caller must have routed the delta to the
/// owning shard already; handing a foreign key to a shard is a logic error.
inline ApplyOutcome apply_delta_to_shard(ShardedStore::Shard& shard, const DeltaEntry& delta,
                                         bool insert_missing) {
    const auto it = shard.find(delta.key);
    if (it != shard.end()) {
        it->second = StoredValue{delta.new_price, delta.new_quantity};
        return ApplyOutcome::applied;
    }
    if (!insert_missing) return ApplyOutcome::missing;
    shard.emplace(delta.key, StoredValue{delta.new_price, delta.new_quantity});
    return ApplyOutcome::inserted;
}

struct BuildResult {
    ShardedStore store;
    std::uint64_t duplicate_keys = 0;
};

/// Places every record in shard partition_key(key, n). When the input repeats
/// a key, the later record wins and the duplicate is counted.
BuildResult build_store(std::span<const Record> records, std::size_t shard_count);

// ---------------------------------------------------------------------------
// Apply accounting
// ---------------------------------------------------------------------------

/// Counts and wall clock of one apply run. applied + missing_key + inserted
/// always equals total_deltas.
struct ApplyReport {
    std::uint64_t applied = 0;
    std::uint64_t missing_key = 0;
    std::uint64_t inserted = 0;
    std::uint64_t total_deltas = 0;
    std::chrono::nanoseconds wall_clock{0};

    bool balanced() const noexcept { return applied + missing_key + inserted == total_deltas; }
    std::int64_t wall_clock_ms() const noexcept {
        return std::chrono::duration_cast<std::chrono::milliseconds>(wall_clock).count();
    }
};

}  // namespace shardstock
