#include "shardstock/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "shardstock/codec.hpp"

namespace shardstock {

namespace {

constexpr std::uint64_t kKeySpace = 10'000'000'000ULL;  // 10-digit draws

Isbn13Key key_from_draw(std::uint64_t draw) {
    std::array<char, Isbn13Key::kLength> digits{'9', '7', '8'};
    for (std::size_t i = Isbn13Key::kLength; i-- > 3;) {
        digits[i] = static_cast<char>('0' + draw % 10);
        draw /= 10;
    }
    return *Isbn13Key::parse({digits.data(), digits.size()});
}

std::uint64_t draw_in(SplitMix64& rng, std::uint64_t lo, std::uint64_t hi) {
    return lo + rng.next() % (hi - lo + 1);
}

}  // namespace

GeneratedPair generate(const GenSpec& spec) {
    if (spec.record_count > kKeySpace) {
        throw std::invalid_argument("generate: record count exceeds the 10-digit key space");
    }
    if (spec.price_min_cents > spec.price_max_cents || spec.price_max_cents > Price::kMaxCents ||
        spec.quantity_min > spec.quantity_max || spec.quantity_max > Quantity::kMaxUnits) {
        throw std::invalid_argument("generate: bad value range");
    }

    SplitMix64 rng(spec.seed);
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(spec.record_count * 2);

    std::vector<Record> records;
    records.reserve(spec.record_count);
    std::vector<Isbn13Key> keys;
    keys.reserve(spec.record_count);
    for (std::uint64_t i = 0; i < spec.record_count; ++i) {
        std::uint64_t draw = 0;
        do {
            draw = rng.next() % kKeySpace;
        } while (!seen.insert(draw).second);
        const Isbn13Key key = key_from_draw(draw);
        const auto price = Price::from_cents(draw_in(rng, spec.price_min_cents, spec.price_max_cents));
        const auto qty = Quantity::from_units(draw_in(rng, spec.quantity_min, spec.quantity_max));
        records.push_back(Record{key, *price, *qty});
        keys.push_back(key);
    }

    // Fisher-Yates over the key set, same stream
    for (std::size_t i = keys.size(); i-- > 1;) {
        const std::size_t j = static_cast<std::size_t>(rng.next() % (i + 1));
        std::swap(keys[i], keys[j]);
    }

    std::vector<DeltaEntry> stock;
    stock.reserve(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const auto price = Price::from_cents(draw_in(rng, spec.price_min_cents, spec.price_max_cents));
        const auto qty = Quantity::from_units(draw_in(rng, spec.quantity_min, spec.quantity_max));
        stock.push_back(DeltaEntry{keys[i], *price, *qty, i});
    }

    return GeneratedPair{write_dataset_csv(std::move(records)), serialize_stock(stock)};
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

namespace {

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CodecError("cannot open for write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw CodecError("write failed: " + path.string());
}

std::filesystem::path make_scratch_dir(const std::filesystem::path& root) {
    std::random_device rd;
    const auto tag = static_cast<std::uint64_t>(rd()) << 32 | rd();
    auto dir = (root.empty() ? std::filesystem::temp_directory_path() : root) /
               ("shardstock-bench-" + std::to_string(tag));
    std::filesystem::create_directories(dir);
    return dir;
}

std::chrono::nanoseconds median(std::vector<std::chrono::nanoseconds> samples) {
    std::sort(samples.begin(), samples.end());
    return samples[samples.size() / 2];
}

}  // namespace

BenchTable run_benchmark(const BenchConfig& config) {
    if (config.sizes.empty()) throw std::invalid_argument("run_benchmark: no sizes");
    if (config.repeats < 1) throw std::invalid_argument("run_benchmark: repeats must be >= 1");

    std::vector<std::size_t> thread_counts = config.thread_counts;
    if (thread_counts.empty()) {
        thread_counts = {std::max<std::size_t>(1, std::thread::hardware_concurrency())};
    }

    BenchTable table;
    table.sizes = config.sizes;
    for (const EngineKind engine : config.engines) {
        if (engine == EngineKind::memory_parallel) {
            for (const std::size_t t : thread_counts) {
                table.rows.push_back(BenchRow{engine, t, {}});
            }
        } else {
            table.rows.push_back(BenchRow{engine, 1, {}});
        }
    }
    for (BenchRow& row : table.rows) row.cells.resize(table.sizes.size());

    const std::filesystem::path scratch = make_scratch_dir(config.work_dir);
    const std::filesystem::path dataset_path = scratch / "dataset.csv";
    const std::filesystem::path stock_path = scratch / "stock.dat";

    bool warmed[3] = {false, false, false};

    for (std::size_t col = 0; col < table.sizes.size(); ++col) {
        const std::uint64_t size = table.sizes[col];
        GenSpec spec;
        spec.record_count = size;
        spec.seed = config.seed ^ size;  // independent yet reproducible per size
        const GeneratedPair pair = generate(spec);
        write_file(dataset_path, pair.dataset_csv);
        write_file(stock_path, pair.stock);

        for (BenchRow& row : table.rows) {
            BenchCell& cell = row.cells[col];
            if (row.engine == EngineKind::disk_baseline && size > config.baseline_cap) {
                cell.status = CellStatus::skipped;
                cell.note = "baseline capped at " + std::to_string(config.baseline_cap);
                continue;
            }
            RunOptions options;
            options.engine = row.engine;
            options.threads = row.engine == EngineKind::memory_parallel ? row.threads : 1;
            options.flush_every = config.flush_every;
            const std::filesystem::path out_path =
                scratch / (std::string("out-") + std::string(to_string(row.engine)) +
                           (row.engine == EngineKind::disk_baseline ? ".bin" : ".csv"));
            try {
                auto& engine_warmed = warmed[static_cast<int>(row.engine)];
                if (!engine_warmed) {
                    run_apply(options, dataset_path, stock_path, out_path);
                    engine_warmed = true;
                }
                std::vector<std::chrono::nanoseconds> samples;
                samples.reserve(static_cast<std::size_t>(config.repeats));
                for (int rep = 0; rep < config.repeats; ++rep) {
                    samples.push_back(run_apply(options, dataset_path, stock_path, out_path).total_time);
                }
                cell.status = CellStatus::ok;
                cell.total = median(std::move(samples));
            } catch (const std::bad_alloc&) {
                cell.status = CellStatus::failed;
                cell.note = "out of memory";
            } catch (const std::exception& e) {
                cell.status = CellStatus::failed;
                cell.note = e.what();
            }
        }
    }

    std::error_code ec;
    std::filesystem::remove_all(scratch, ec);
    return table;
}

// ---------------------------------------------------------------------------
// Renderers
// ---------------------------------------------------------------------------

std::string format_hms(std::chrono::milliseconds duration) {
    const std::int64_t total_seconds = std::max<std::int64_t>(0, duration.count()) / 1000;
    const std::int64_t h = total_seconds / 3600;
    const std::int64_t m = total_seconds % 3600 / 60;
    const std::int64_t s = total_seconds % 60;
    std::string out = std::to_string(h) + "h " + std::to_string(m) + "m ";
    if (s < 10) out.push_back('0');
    out += std::to_string(s) + "s";
    return out;
}

namespace {

std::string group_digits(std::uint64_t value) {
    std::string raw = std::to_string(value);
    std::string out;
    out.reserve(raw.size() + raw.size() / 3);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (i > 0 && (raw.size() - i) % 3 == 0) out.push_back(',');
        out.push_back(raw[i]);
    }
    return out;
}

std::int64_t cell_ms(const BenchCell& cell) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(cell.total).count();
}

std::string cell_text(const BenchCell& cell, bool as_millis) {
    switch (cell.status) {
        case CellStatus::ok:
            return as_millis ? std::to_string(cell_ms(cell))
                             : format_hms(std::chrono::milliseconds(cell_ms(cell)));
        case CellStatus::skipped: return "—";
        case CellStatus::failed: return "failed";
    }
    return "?";
}

std::string pad_left(std::string text, std::size_t width) {
    // width counts display columns; the em dash is 3 bytes but 1 column
    const std::size_t display = text == "—" ? 1 : text.size();
    if (display < width) text.insert(0, width - display, ' ');
    return text;
}

std::string pad_right(std::string text, std::size_t width) {
    if (text.size() < width) text.append(width - text.size(), ' ');
    return text;
}

std::string row_label(const BenchRow& row) { return std::string(to_string(row.engine)); }

}  // namespace

std::string render_table(const BenchTable& table) {
    const std::size_t label_width = [&] {
        std::size_t w = std::string_view("engine").size();
        for (const BenchRow& row : table.rows) w = std::max(w, row_label(row).size());
        return w;
    }();
    std::vector<std::size_t> col_width(table.sizes.size());
    for (std::size_t c = 0; c < table.sizes.size(); ++c) {
        std::size_t w = group_digits(table.sizes[c]).size();
        for (const BenchRow& row : table.rows) {
            w = std::max(w, cell_text(row.cells[c], false).size());
            w = std::max(w, cell_text(row.cells[c], true).size());
        }
        col_width[c] = w;
    }

    std::string out;
    auto emit_header = [&] {
        out += pad_right("engine", label_width);
        out += "  threads";
        for (std::size_t c = 0; c < table.sizes.size(); ++c) {
            out += " | " + pad_left(group_digits(table.sizes[c]), col_width[c]);
        }
        out.push_back('\n');
    };
    auto emit_block = [&](bool as_millis) {
        for (const BenchRow& row : table.rows) {
            out += pad_right(row_label(row), label_width);
            out += "  " + pad_left(std::to_string(row.threads), 7);
            for (std::size_t c = 0; c < table.sizes.size(); ++c) {
                out += " | " + pad_left(cell_text(row.cells[c], as_millis), col_width[c]);
            }
            out.push_back('\n');
        }
    };

    emit_header();
    emit_block(false);
    out += "\nmilliseconds\n";
    emit_header();
    emit_block(true);
    return out;
}

std::string render_csv(const BenchTable& table) {
    std::string out = "engine,threads,records,millis,status\n";
    for (const BenchRow& row : table.rows) {
        for (std::size_t c = 0; c < table.sizes.size(); ++c) {
            const BenchCell& cell = row.cells[c];
            out += std::string(to_string(row.engine)) + "," + std::to_string(row.threads) + "," +
                   std::to_string(table.sizes[c]) + ",";
            if (cell.status == CellStatus::ok) out += std::to_string(cell_ms(cell));
            out.push_back(',');
            switch (cell.status) {
                case CellStatus::ok: out += "ok"; break;
                case CellStatus::skipped: out += "skipped"; break;
                case CellStatus::failed: out += "failed"; break;
            }
            out.push_back('\n');
        }
    }
    return out;
}

std::string render_histogram_svg(const BenchTable& table) {
    constexpr double kWidth = 960, kHeight = 420;
    constexpr double kLeft = 70, kRight = 170, kTop = 30, kBottom = 50;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    static constexpr const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759",
                                               "#76b7b2", "#59a14f", "#edc948"};
    constexpr std::size_t kPaletteSize = std::size(kPalette);

    double max_ms = 10.0;
    for (const BenchRow& row : table.rows) {
        for (const BenchCell& cell : row.cells) {
            if (cell.status == CellStatus::ok) {
                max_ms = std::max(max_ms, static_cast<double>(cell.total.count()) / 1e6);
            }
        }
    }
    const double log_max = std::log10(max_ms * 1.1);
    const auto y_of = [&](double ms) {
        const double frac = std::log10(std::max(1.0, ms)) / log_max;
        return kTop + plot_h * (1.0 - std::clamp(frac, 0.0, 1.0));
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
        << "<style>text{font:12px sans-serif;fill:#333}.axis{stroke:#333}.grid{stroke:#ddd}</style>\n";

    // grid and y labels at decades
    for (double tick = 1.0; tick <= max_ms * 1.1; tick *= 10.0) {
        const double y = y_of(tick);
        svg << "<line class=\"grid\" x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\""
            << kWidth - kRight << "\" y2=\"" << y << "\"/>\n"
            << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\">" << group_digits(static_cast<std::uint64_t>(tick))
            << "</text>\n";
    }
    // axes
    svg << "<line class=\"axis\" x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
        << "\" y2=\"" << kTop + plot_h << "\"/>\n"
        << "<line class=\"axis\" x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\""
        << kWidth - kRight << "\" y2=\"" << kTop + plot_h << "\"/>\n"
        << "<text x=\"" << kLeft - 55 << "\" y=\"" << kTop - 10 << "\">duration, ms (log)</text>\n"
        << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
        << "\" text-anchor=\"middle\">records updated</text>\n";

    // one group per size, one bar per row
    const std::size_t groups = table.sizes.size();
    const std::size_t bars = table.rows.size();
    if (groups > 0 && bars > 0) {
        const double group_w = plot_w / static_cast<double>(groups);
        const double bar_w = group_w * 0.8 / static_cast<double>(bars);
        for (std::size_t c = 0; c < groups; ++c) {
            const double gx = kLeft + group_w * static_cast<double>(c);
            svg << "<text x=\"" << gx + group_w / 2 << "\" y=\"" << kTop + plot_h + 18
                << "\" text-anchor=\"middle\">" << group_digits(table.sizes[c]) << "</text>\n";
            for (std::size_t r = 0; r < bars; ++r) {
                const BenchCell& cell = table.rows[r].cells[c];
                if (cell.status != CellStatus::ok) continue;
                const double ms = static_cast<double>(cell.total.count()) / 1e6;
                const double y = y_of(ms);
                const double x = gx + group_w * 0.1 + bar_w * static_cast<double>(r);
                svg << "<rect class=\"bar\" x=\"" << x << "\" y=\"" << y << "\" width=\""
                    << bar_w * 0.92 << "\" height=\"" << kTop + plot_h - y << "\" fill=\""
                    << kPalette[r % kPaletteSize] << "\"><title>" << to_string(table.rows[r].engine)
                    << " t=" << table.rows[r].threads << " n=" << table.sizes[c] << ": "
                    << cell_ms(cell) << " ms</title></rect>\n";
            }
        }
    }
    // legend
    for (std::size_t r = 0; r < bars; ++r) {
        const double y = kTop + 16.0 * static_cast<double>(r);
        svg << "<rect x=\"" << kWidth - kRight + 12 << "\" y=\"" << y - 9
            << "\" width=\"10\" height=\"10\" fill=\"" << kPalette[r % kPaletteSize] << "\"/>\n"
            << "<text x=\"" << kWidth - kRight + 28 << "\" y=\"" << y << "\">"
            << to_string(table.rows[r].engine) << " t=" << table.rows[r].threads << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace shardstock
