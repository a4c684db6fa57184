#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shardstock/core.hpp"
#include "shardstock/fixed_store.hpp"

namespace shardstock {

enum class EngineKind { memory_serial, memory_parallel, disk_baseline };

std::string_view to_string(EngineKind kind) noexcept;
std::optional<EngineKind> parse_engine_kind(std::string_view name) noexcept;

/// Per-shard delta queues. Queue j holds exactly the deltas whose key
/// partitions to shard j, in stream order, so a key's updates are applied in
/// source_ordinal order by a single worker.
struct RoutedDeltas {
    std::vector<std::vector<DeltaEntry>> queues;

    std::size_t total() const noexcept {
        std::size_t n = 0;
        for (const auto& q : queues) n += q.size();
        return n;
    }
};

/// Single stable pass; queue index = partition_key(key, shard_count).
RoutedDeltas route_deltas(std::span<const DeltaEntry> deltas, std::size_t shard_count);

/// Applies deltas strictly in stream order on the calling thread. The
/// semantic oracle for every other engine.
ApplyReport apply_serial(ShardedStore& store, std::span<const DeltaEntry> deltas,
                         bool insert_missing);

/// Routes, then runs one worker per shard concurrently; worker j exclusively
/// owns shard j and queue j (shared-nothing). Counts are merged after the
/// join. Requires store.shard_count() == n_workers; final state is identical
/// to apply_serial on the same inputs. wall_clock covers routing, apply, and
/// the join.
ApplyReport apply_parallel(ShardedStore& store, std::span<const DeltaEntry> deltas,
                           std::size_t n_workers, bool insert_missing);

/// The conventional baseline: for each delta in stream order, binary-search
/// the sorted file by seeking, overwrite the record value bytes in place on a
/// hit, and force a durability flush every flush_every updates (1 = per
/// update). insert_missing is ignored; absent keys are counted as misses.
ApplyReport apply_disk_baseline(FixedStoreFile& file, std::span<const DeltaEntry> deltas,
                                std::uint64_t flush_every = 1, bool insert_missing = false);

// ---------------------------------------------------------------------------
// End-to-end pipeline: load -> apply -> write-back
// ---------------------------------------------------------------------------

struct RunOptions {
    EngineKind engine = EngineKind::memory_serial;
    std::size_t threads = 1;          // shard count and worker count, one knob
    bool insert_missing = false;
    std::uint64_t flush_every = 1;    // disk baseline only
};

struct RunReport {
    ApplyReport apply;
    std::chrono::nanoseconds load_time{0};
    std::chrono::nanoseconds apply_time{0};
    std::chrono::nanoseconds write_time{0};
    std::chrono::nanoseconds total_time{0};
    std::uint64_t dataset_records = 0;
    std::uint64_t dataset_malformed = 0;
    std::uint64_t dataset_duplicates = 0;
    std::uint64_t stock_entries = 0;
    std::uint64_t stock_malformed = 0;
};

/// Memory engines write the canonical dataset CSV to out_path; the disk
/// baseline materializes the fixed binary store at out_path and updates it in
/// place. Codec and I/O errors propagate.
RunReport run_apply(const RunOptions& options, const std::filesystem::path& dataset_path,
                    const std::filesystem::path& stock_path,
                    const std::filesystem::path& out_path);

/// Canonical CSV image of an engine's write-back, whatever its on-disk shape;
/// the common currency for cross-engine comparison.
std::string canonical_csv_of_output(EngineKind engine, const std::filesystem::path& out_path);

}  // namespace shardstock
