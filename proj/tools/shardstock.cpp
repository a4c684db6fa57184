// shardstock: generate / apply / bench / verify for the sharded in-memory
// batch-update engine and its disk-based baseline.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "shardstock/bench.hpp"
#include "shardstock/codec.hpp"
#include "shardstock/engine.hpp"

namespace fs = std::filesystem;
using namespace shardstock;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSemantic = 1;  // verify mismatch, malformed-input threshold
constexpr int kExitEnvironment = 2;  // I/O, bad paths, bad configuration

std::size_t default_threads() {
    if (const char* env = std::getenv("SHARDSTOCK_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
        std::cerr << "warning: ignoring invalid SHARDSTOCK_THREADS=\"" << env << "\"\n";
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

void write_file(const fs::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CodecError("cannot open for write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw CodecError("write failed: " + path.string());
}

std::int64_t ms(std::chrono::nanoseconds d) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(d).count();
}

std::string hms(std::chrono::nanoseconds d) {
    return format_hms(std::chrono::duration_cast<std::chrono::milliseconds>(d));
}

bool over_malformed_threshold(std::uint64_t good, std::uint64_t malformed) {
    return 2 * malformed > good + malformed;
}

int cmd_gen(std::uint64_t count, std::uint64_t seed, const std::string& out_prefix) {
    GenSpec spec;
    spec.record_count = count;
    spec.seed = seed;
    const GeneratedPair pair = generate(spec);
    const fs::path csv_path = out_prefix + ".csv";
    const fs::path dat_path = out_prefix + ".dat";
    write_file(csv_path, pair.dataset_csv);
    write_file(dat_path, pair.stock);
    std::cout << "records=" << count << "\n"
              << "csv_path=" << csv_path.string() << " csv_bytes=" << pair.dataset_csv.size() << "\n"
              << "dat_path=" << dat_path.string() << " dat_bytes=" << pair.stock.size() << "\n";
    return kExitOk;
}

void print_run_report(EngineKind engine, std::size_t threads, const RunReport& r) {
    std::cout << "engine=" << to_string(engine) << "\n"
              << "threads=" << threads << "\n"
              << "dataset_records=" << r.dataset_records
              << " dataset_malformed=" << r.dataset_malformed
              << " dataset_duplicates=" << r.dataset_duplicates << "\n"
              << "stock_entries=" << r.stock_entries << " stock_malformed=" << r.stock_malformed
              << "\n"
              << "applied=" << r.apply.applied << " missing=" << r.apply.missing_key
              << " inserted=" << r.apply.inserted << " total=" << r.apply.total_deltas << "\n"
              << "load_ms=" << ms(r.load_time) << " apply_ms=" << ms(r.apply_time)
              << " write_ms=" << ms(r.write_time) << " total_ms=" << ms(r.total_time) << "\n"
              << "\n"
              << "phase       time\n"
              << "load        " << hms(r.load_time) << "  (" << ms(r.load_time) << " ms)\n"
              << "apply       " << hms(r.apply_time) << "  (" << ms(r.apply_time) << " ms)\n"
              << "write-back  " << hms(r.write_time) << "  (" << ms(r.write_time) << " ms)\n"
              << "total       " << hms(r.total_time) << "  (" << ms(r.total_time) << " ms)\n";
}

int cmd_apply(EngineKind engine, std::size_t threads, const fs::path& dataset,
              const fs::path& stock, const fs::path& out, bool insert_missing,
              std::uint64_t flush_every) {
    RunOptions options;
    options.engine = engine;
    options.threads = threads;
    options.insert_missing = insert_missing;
    options.flush_every = flush_every;
    const RunReport report = run_apply(options, dataset, stock, out);
    print_run_report(engine, threads, report);
    if (over_malformed_threshold(report.stock_entries, report.stock_malformed) ||
        over_malformed_threshold(report.dataset_records, report.dataset_malformed)) {
        std::cerr << "error: more than half of the input rows are malformed\n";
        return kExitSemantic;
    }
    return kExitOk;
}

int cmd_bench(const BenchConfig& config, const std::string& out_prefix) {
    const BenchTable table = run_benchmark(config);
    std::cout << render_table(table);
    const fs::path csv_path = out_prefix + ".csv";
    const fs::path svg_path = out_prefix + ".svg";
    write_file(csv_path, render_csv(table));
    write_file(svg_path, render_histogram_svg(table));
    std::cout << "\nreport_csv=" << csv_path.string() << "\nreport_svg=" << svg_path.string()
              << "\n";
    return kExitOk;
}

int cmd_verify(std::uint64_t count, std::uint64_t seed, std::size_t threads,
               std::uint64_t flush_every, std::string work_dir) {
    if (work_dir.empty()) {
        work_dir = (fs::temp_directory_path() /
                    ("shardstock-verify-" + std::to_string(::getpid())))
                       .string();
    }
    fs::create_directories(work_dir);
    const fs::path dir(work_dir);

    GenSpec spec;
    spec.record_count = count;
    spec.seed = seed;
    const GeneratedPair pair = generate(spec);
    const fs::path dataset = dir / "dataset.csv";
    const fs::path stock = dir / "stock.dat";
    write_file(dataset, pair.dataset_csv);
    write_file(stock, pair.stock);

    // Self-test seam for the negative control: a named engine's output is
    // deliberately perturbed before comparison.
    const char* fault = std::getenv("SHARDSTOCK_FAULT_ENGINE");

    const EngineKind engines[] = {EngineKind::memory_serial, EngineKind::memory_parallel,
                                  EngineKind::disk_baseline};
    std::map<EngineKind, std::string> canonical;
    for (const EngineKind engine : engines) {
        RunOptions options;
        options.engine = engine;
        options.threads = engine == EngineKind::memory_parallel ? threads : 1;
        options.flush_every = flush_every;
        const fs::path out =
            dir / (std::string("out-") + std::string(to_string(engine)) +
                   (engine == EngineKind::disk_baseline ? ".bin" : ".csv"));
        run_apply(options, dataset, stock, out);
        std::string csv = canonical_csv_of_output(engine, out);
        if (fault && to_string(engine) == fault) {
            const std::size_t digit = csv.find_last_of("0123456789");
            if (digit != std::string::npos) csv[digit] = csv[digit] == '0' ? '1' : '0';
        }
        canonical[engine] = std::move(csv);
    }

    std::cout << "records=" << count << " seed=" << seed << " threads=" << threads << "\n";
    if (canonical[EngineKind::memory_serial] == canonical[EngineKind::memory_parallel] &&
        canonical[EngineKind::memory_serial] == canonical[EngineKind::disk_baseline]) {
        std::cout << "verify=ok\n";
        return kExitOk;
    }

    // Field-level diff against the serial oracle.
    std::map<Isbn13Key, std::array<std::optional<StoredValue>, 3>> by_key;
    for (std::size_t e = 0; e < 3; ++e) {
        for (const Record& r : load_dataset_csv(canonical[engines[e]]).records) {
            by_key[r.key][e] = StoredValue{r.price, r.quantity};
        }
    }
    std::uint64_t diffs = 0;
    for (const auto& [key, values] : by_key) {
        if (values[0] == values[1] && values[0] == values[2]) continue;
        ++diffs;
        if (diffs <= 10) {
            std::cout << "diff key=" << key.view();
            for (std::size_t e = 0; e < 3; ++e) {
                std::cout << " " << to_string(engines[e]) << "=";
                if (values[e]) {
                    std::cout << "(" << values[e]->price.to_string() << ","
                              << values[e]->quantity.to_string() << ")";
                } else {
                    std::cout << "(absent)";
                }
            }
            std::cout << "\n";
        }
    }
    std::cout << "verify=mismatch diff_keys=" << diffs << "\n";
    return kExitSemantic;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sharded in-memory batch-update engine, disk baseline, and benchmark harness"};
    app.require_subcommand(1);

    const std::size_t threads_default = default_threads();

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset CSV and stock file");
    std::uint64_t gen_count = 1000;
    std::uint64_t gen_seed = 42;
    std::string gen_out = "inventory";
    gen->add_option("--count", gen_count, "records to generate");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output prefix (writes <out>.csv and <out>.dat)");

    // apply
    auto* apply = app.add_subcommand("apply", "apply a stock file to a dataset");
    std::string apply_engine = "memory_parallel";
    std::size_t apply_threads = threads_default;
    std::string apply_dataset, apply_stock, apply_out;
    bool apply_insert_missing = false;
    std::uint64_t apply_flush_every = 1;
    apply->add_option("--engine", apply_engine,
                      "memory_serial | memory_parallel | disk_baseline");
    apply->add_option("--threads", apply_threads, "worker/shard count (memory_parallel)");
    apply->add_option("--dataset", apply_dataset, "input dataset CSV")->required();
    apply->add_option("--stock", apply_stock, "input stock file")->required();
    apply->add_option("--out", apply_out, "write-back path (CSV, or .bin for disk_baseline)")
        ->required();
    apply->add_flag("--insert-missing", apply_insert_missing,
                    "insert stock keys absent from the dataset (memory engines)");
    apply->add_option("--flush-every", apply_flush_every,
                      "disk_baseline: durability flush period in updates");

    // bench
    auto* bench = app.add_subcommand("bench", "sweep sizes x engines x threads, emit reports");
    BenchConfig bench_config;
    std::vector<std::string> bench_engines;
    std::size_t bench_threads = threads_default;
    std::string bench_out = "bench_report";
    bench->add_option("--sizes", bench_config.sizes, "record counts to sweep")->delimiter(',');
    bench->add_option("--engines", bench_engines, "engines to run (comma separated)")
        ->delimiter(',');
    bench->add_option("--threads", bench_threads, "worker count for memory_parallel rows");
    bench->add_option("--seed", bench_config.seed, "base seed (per-size seed = seed xor size)");
    bench->add_option("--baseline-cap", bench_config.baseline_cap,
                      "skip disk_baseline cells above this size");
    bench->add_option("--repeats", bench_config.repeats, "measured runs per cell (median)");
    bench->add_option("--flush-every", bench_config.flush_every,
                      "disk_baseline durability flush period");
    bench->add_option("--out", bench_out, "report prefix (writes <out>.csv and <out>.svg)");

    // verify
    auto* verify = app.add_subcommand(
        "verify", "run all three engines on one generated pair and compare write-backs");
    std::uint64_t verify_count = 10'000;
    std::uint64_t verify_seed = 42;
    std::size_t verify_threads = threads_default;
    std::uint64_t verify_flush_every = 1000;
    std::string verify_dir;
    verify->add_option("--count", verify_count, "records to generate");
    verify->add_option("--seed", verify_seed, "generator seed");
    verify->add_option("--threads", verify_threads, "worker count for memory_parallel");
    verify->add_option("--flush-every", verify_flush_every,
                       "disk_baseline durability flush period");
    verify->add_option("--out", verify_dir, "working directory (default: temp)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitEnvironment;
    }

    try {
        if (gen->parsed()) return cmd_gen(gen_count, gen_seed, gen_out);
        if (apply->parsed()) {
            const auto engine = parse_engine_kind(apply_engine);
            if (!engine) {
                std::cerr << "error: unknown engine \"" << apply_engine << "\"\n";
                return kExitEnvironment;
            }
            return cmd_apply(*engine, apply_threads, apply_dataset, apply_stock, apply_out,
                             apply_insert_missing, apply_flush_every);
        }
        if (bench->parsed()) {
            if (!bench_engines.empty()) {
                bench_config.engines.clear();
                for (const std::string& name : bench_engines) {
                    const auto engine = parse_engine_kind(name);
                    if (!engine) {
                        std::cerr << "error: unknown engine \"" << name << "\"\n";
                        return kExitEnvironment;
                    }
                    bench_config.engines.push_back(*engine);
                }
            }
            bench_config.thread_counts = {bench_threads};
            return cmd_bench(bench_config, bench_out);
        }
        if (verify->parsed()) {
            return cmd_verify(verify_count, verify_seed, verify_threads, verify_flush_every,
                              verify_dir);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEnvironment;
    }
    return kExitEnvironment;
}
