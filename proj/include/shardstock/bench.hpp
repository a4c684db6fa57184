#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "shardstock/engine.hpp"

namespace shardstock {

/// SplitMix64, the published Steele/Lea/Vigna generator. Tiny, seedable,
/// identical output in any language.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        std::uint64_t z = state_ += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

/// Identical GenSpec -> byte-identical dataset and stock file, on any
/// platform.
struct GenSpec {
    std::uint64_t record_count = 0;
    std::uint64_t seed = 0;
    std::uint64_t price_min_cents = 1;
    std::uint64_t price_max_cents = 9999;
    std::uint32_t quantity_min = 0;
    std::uint32_t quantity_max = 999;
};

struct GeneratedPair {
    std::string dataset_csv;  // canonical sorted order
    std::string stock;        // every key exactly once, shuffled
};

/// Keys are "978" + a zero-padded 10-digit SplitMix64 draw (redrawn on
/// duplicates); values are modulo-reduced draws from the same stream; the
/// stock order is a Fisher-Yates shuffle of the key set driven by the same
/// stream, with fresh values drawn per entry. Throws when record_count
/// exceeds the 10-digit key space.
GeneratedPair generate(const GenSpec& spec);

// ---------------------------------------------------------------------------
// Benchmark runner
// ---------------------------------------------------------------------------

enum class CellStatus { ok, skipped, failed };

struct BenchCell {
    CellStatus status = CellStatus::skipped;
    std::chrono::nanoseconds total{0};  // median over repeats when status == ok
    std::string note;                   // skip/failure reason
};

struct BenchRow {
    EngineKind engine = EngineKind::memory_serial;
    std::size_t threads = 1;
    std::vector<BenchCell> cells;  // aligned with BenchTable::sizes
};

/// Matrix of (engine x threads) rows by record-count columns.
struct BenchTable {
    std::vector<std::uint64_t> sizes;
    std::vector<BenchRow> rows;
};

struct BenchConfig {
    std::vector<std::uint64_t> sizes{100'000, 500'000, 1'000'000, 1'500'000, 2'000'000};
    std::vector<EngineKind> engines{EngineKind::memory_serial, EngineKind::memory_parallel,
                                    EngineKind::disk_baseline};
    std::vector<std::size_t> thread_counts;  // empty -> {hardware threads}
    std::uint64_t baseline_cap = 100'000;    // disk cells above this are skipped
    std::uint64_t seed = 0;                  // per-size cell seed = seed ^ size
    int repeats = 1;                         // cell duration = median of repeats
    std::uint64_t flush_every = 1;
    std::filesystem::path work_dir;          // empty -> system temp dir
};

/// Sweeps sizes x engines x threads end-to-end through run_apply. One
/// warm-up run per engine is executed and discarded; a failed cell (e.g.
/// out of memory) is recorded with its reason and the sweep continues.
BenchTable run_benchmark(const BenchConfig& config);

// ---------------------------------------------------------------------------
// Report renderers
// ---------------------------------------------------------------------------

/// "Hh Mm Ss" with two-digit seconds: 63,000 ms -> "0h 1m 03s".
std::string format_hms(std::chrono::milliseconds duration);

/// Aligned text matrix of Hh-Mm-Ss cells, one row per engine x threads and
/// one column per record count, followed by the same matrix in raw
/// milliseconds. Skipped cells render as an em dash.
std::string render_table(const BenchTable& table);

/// One row per cell: engine,threads,records,millis,status.
std::string render_csv(const BenchTable& table);

/// Static grouped bar chart, one group per record count, log-scale duration
/// axis. No scripting.
std::string render_histogram_svg(const BenchTable& table);

}  // namespace shardstock
