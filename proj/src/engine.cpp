#include "shardstock/engine.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "shardstock/codec.hpp"

namespace shardstock {

namespace {

using Clock = std::chrono::steady_clock;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CodecError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw CodecError("read failed: " + path.string());
    return std::move(buf).str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CodecError("cannot open for write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw CodecError("write failed: " + path.string());
}

void tally(ApplyReport& report, ApplyOutcome outcome) {
    switch (outcome) {
        case ApplyOutcome::applied: ++report.applied; break;
        case ApplyOutcome::missing: ++report.missing_key; break;
        case ApplyOutcome::inserted: ++report.inserted; break;
    }
}

}  // namespace

std::string_view to_string(EngineKind kind) noexcept {
    switch (kind) {
        case EngineKind::memory_serial: return "memory_serial";
        case EngineKind::memory_parallel: return "memory_parallel";
        case EngineKind::disk_baseline: return "disk_baseline";
    }
    return "unknown";
}

std::optional<EngineKind> parse_engine_kind(std::string_view name) noexcept {
    if (name == "memory_serial") return EngineKind::memory_serial;
    if (name == "memory_parallel") return EngineKind::memory_parallel;
    if (name == "disk_baseline") return EngineKind::disk_baseline;
    return std::nullopt;
}

RoutedDeltas route_deltas(std::span<const DeltaEntry> deltas, std::size_t shard_count) {
    if (shard_count == 0) throw std::invalid_argument("route_deltas: shard count must be >= 1");
    RoutedDeltas routed;
    routed.queues.resize(shard_count);
    if (shard_count > 1) {
        const std::size_t estimate = deltas.size() / shard_count + deltas.size() / (4 * shard_count) + 1;
        for (auto& q : routed.queues) q.reserve(estimate);
        for (const DeltaEntry& d : deltas) {
            routed.queues[partition_key(d.key, shard_count)].push_back(d);
        }
    } else {
        routed.queues[0].assign(deltas.begin(), deltas.end());
    }
    return routed;
}

ApplyReport apply_serial(ShardedStore& store, std::span<const DeltaEntry> deltas,
                         bool insert_missing) {
    ApplyReport report;
    report.total_deltas = deltas.size();
    const auto t0 = Clock::now();
    for (const DeltaEntry& d : deltas) {
        tally(report, apply_delta_to_shard(store.shard(store.shard_of(d.key)), d, insert_missing));
    }
    report.wall_clock = Clock::now() - t0;
    return report;
}

ApplyReport apply_parallel(ShardedStore& store, std::span<const DeltaEntry> deltas,
                           std::size_t n_workers, bool insert_missing) {
    if (n_workers == 0) throw std::invalid_argument("apply_parallel: need at least one worker");
    if (store.shard_count() != n_workers) {
        throw std::invalid_argument("apply_parallel: worker count must equal shard count");
    }

    ApplyReport report;
    report.total_deltas = deltas.size();
    const auto t0 = Clock::now();

    const RoutedDeltas routed = route_deltas(deltas, n_workers);

    std::vector<ApplyReport> partial(n_workers);
    {
        std::vector<std::jthread> workers;
        workers.reserve(n_workers);
        for (std::size_t j = 0; j < n_workers; ++j) {
            workers.emplace_back([&store, &routed, &partial, insert_missing, j] {
                ShardedStore::Shard& shard = store.shard(j);
                ApplyReport& mine = partial[j];
                for (const DeltaEntry& d : routed.queues[j]) {
                    tally(mine, apply_delta_to_shard(shard, d, insert_missing));
                }
            });
        }
    }  // join barrier

    for (const ApplyReport& p : partial) {
        report.applied += p.applied;
        report.missing_key += p.missing_key;
        report.inserted += p.inserted;
    }
    report.wall_clock = Clock::now() - t0;
    return report;
}

ApplyReport apply_disk_baseline(FixedStoreFile& file, std::span<const DeltaEntry> deltas,
                                std::uint64_t flush_every, bool /*insert_missing: ignored*/) {
    if (flush_every == 0) flush_every = 1;
    ApplyReport report;
    report.total_deltas = deltas.size();
    const auto t0 = Clock::now();
    std::uint64_t since_flush = 0;
    for (const DeltaEntry& d : deltas) {
        const auto index = file.find(d.key);
        if (!index) {
            ++report.missing_key;
            continue;
        }
        file.overwrite_record(*index, d.new_price, d.new_quantity);
        ++report.applied;
        if (++since_flush >= flush_every) {
            file.flush();
            since_flush = 0;
        }
    }
    if (since_flush > 0) file.flush();
    report.wall_clock = Clock::now() - t0;
    return report;
}

RunReport run_apply(const RunOptions& options, const std::filesystem::path& dataset_path,
                    const std::filesystem::path& stock_path,
                    const std::filesystem::path& out_path) {
    if (options.threads == 0) throw std::invalid_argument("run_apply: need at least one thread");

    RunReport report;
    const auto t_start = Clock::now();

    const std::string dataset_bytes = read_file(dataset_path);
    const std::string stock_bytes = read_file(stock_path);
    DatasetParseResult dataset = load_dataset_csv(dataset_bytes);
    StockParseReport stock = parse_stock_stream(stock_bytes);
    report.dataset_records = dataset.records.size();
    report.dataset_malformed = dataset.malformed;
    report.stock_entries = stock.entries.size();
    report.stock_malformed = stock.malformed;

    switch (options.engine) {
        case EngineKind::memory_serial:
        case EngineKind::memory_parallel: {
            BuildResult built = build_store(dataset.records, options.threads);
            report.dataset_duplicates = built.duplicate_keys;
            dataset.records.clear();
            dataset.records.shrink_to_fit();
            report.load_time = Clock::now() - t_start;

            report.apply = options.engine == EngineKind::memory_serial
                               ? apply_serial(built.store, stock.entries, options.insert_missing)
                               : apply_parallel(built.store, stock.entries, options.threads,
                                                options.insert_missing);
            report.apply_time = report.apply.wall_clock;

            const auto t_write = Clock::now();
            write_file(out_path, write_dataset_csv(built.store));
            report.write_time = Clock::now() - t_write;
            break;
        }
        case EngineKind::disk_baseline: {
            // Same key semantics as the memory load: later duplicate wins.
            BuildResult built = build_store(dataset.records, 1);
            report.dataset_duplicates = built.duplicate_keys;
            dataset.records.clear();
            dataset.records.shrink_to_fit();
            FixedStoreFile::create(out_path, built.store.snapshot_sorted());
            FixedStoreFile file(out_path, /*writable=*/true);
            report.load_time = Clock::now() - t_start;

            report.apply =
                apply_disk_baseline(file, stock.entries, options.flush_every, options.insert_missing);
            report.apply_time = report.apply.wall_clock;

            const auto t_write = Clock::now();
            file.flush();  // the file is the store; write-back is a final barrier
            report.write_time = Clock::now() - t_write;
            break;
        }
    }

    report.total_time = Clock::now() - t_start;
    return report;
}

std::string canonical_csv_of_output(EngineKind engine, const std::filesystem::path& out_path) {
    if (engine == EngineKind::disk_baseline) {
        FixedStoreFile file(out_path);
        return write_dataset_csv(file.read_all());
    }
    return read_file(out_path);
}

}  // namespace shardstock
