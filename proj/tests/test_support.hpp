#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "shardstock/bench.hpp"
#include "shardstock/codec.hpp"
#include "shardstock/core.hpp"

namespace testsup {

// The reference inventory sample used across suites; 15 known rows.
inline constexpr std::string_view kSampleCsv =
    "bo_ISBN13,bo_price,bo_quantity\n"
    "9780000004381,1.16,91\n"
    "9780000010457,2.42,424\n"
    "9780000012128,1.71,445\n"
    "9780000015225,1.05,134\n"
    "9780000018556,0.31,408\n"
    "9780000031562,5.01,237\n"
    "9780000033317,2.42,496\n"
    "9780000034711,1.11,193\n"
    "9780000036146,7.63,400\n"
    "9780000036886,7.67,69\n"
    "9780000044323,4.86,120\n"
    "9780000055263,6.74,339\n"
    "9780000058436,1.05,348\n"
    "9780000063175,3.52,399\n"
    "9780000082215,2.58,166\n";

inline shardstock::Isbn13Key key(std::string_view digits) {
    return *shardstock::Isbn13Key::parse(digits);
}

inline shardstock::Record record(std::string_view digits, std::uint64_t cents, std::uint32_t units) {
    return {key(digits), *shardstock::Price::from_cents(cents),
            *shardstock::Quantity::from_units(units)};
}

inline shardstock::DeltaEntry delta(std::string_view digits, std::uint64_t cents,
                                    std::uint32_t units, std::uint64_t ordinal = 0) {
    return {key(digits), *shardstock::Price::from_cents(cents),
            *shardstock::Quantity::from_units(units), ordinal};
}

inline std::vector<shardstock::Record> sample_records() {
    return shardstock::load_dataset_csv(kSampleCsv).records;
}

// n records with distinct sequential keys and pseudo-random values
inline std::vector<shardstock::Record> unique_records(std::size_t n, std::uint64_t seed) {
    shardstock::SplitMix64 rng(seed);
    std::vector<shardstock::Record> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::string digits = std::to_string(9'000'000'000ULL + i * 7919);
        digits.insert(0, 13 - digits.size(), '0');
        out.push_back(record(digits, rng.next() % 10000, rng.next() % 1000));
    }
    return out;
}

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        const auto tag = static_cast<std::uint64_t>(rd()) << 32 | rd();
        path_ = std::filesystem::temp_directory_path() / ("shardstock-test-" + std::to_string(tag));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(std::string_view name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

}  // namespace testsup
