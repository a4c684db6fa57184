#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "shardstock/core.hpp"

namespace shardstock {

/// Wrong file, bad magic, truncation -- anything that makes an input
/// unusable as a whole rather than row-by-row.
class CodecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Stock stream: `$`-delimited update entries.
//
// Entry grammar, byte-exact:
//     key(13 digits) '$' price '$' quantity '$'
//     price    = 1-7 digits '.' 1-2 digits
//     quantity = 1-9 digits
// Entries are separated by LF, CRLF, or nothing; the trailing '$' delimits.
// Canonical sample: "9783652774577$3.93$495$\n".
// ---------------------------------------------------------------------------

struct MalformedSample {
    std::size_t byte_offset = 0;
    std::string reason;
};

struct StockParseReport {
    std::vector<DeltaEntry> entries;      // stream order, source_ordinal contiguous from 0
    std::uint64_t malformed = 0;          // skipped regions, not bytes
    std::vector<MalformedSample> malformed_samples;  // at most 10

    static constexpr std::size_t kMaxSamples = 10;
};

/// Never fails as a whole: a malformed region is skipped to the next LF (or
/// the next plausible 13-digit run when no LF remains) and counted.
StockParseReport parse_stock_stream(std::string_view bytes);

/// Whole-token price parse per the price grammar above. Lenient on a single
/// decimal digit ("3.9" -> 390 cents); writers always emit two.
std::optional<Price> parse_price(std::string_view text);

/// Canonical form: one entry per line, LF-terminated, two-decimal prices.
/// parse_stock_stream(serialize_stock(e)) reproduces e.
std::string serialize_stock(std::span<const DeltaEntry> entries);

// ---------------------------------------------------------------------------
// Dataset CSV: header "bo_ISBN13,bo_price,bo_quantity", then "key,price,qty"
// rows, LF endings.
// ---------------------------------------------------------------------------

inline constexpr std::string_view kDatasetCsvHeader = "bo_ISBN13,bo_price,bo_quantity";

struct DatasetParseResult {
    std::vector<Record> records;   // file order; duplicates preserved
    std::uint64_t malformed = 0;   // skipped rows
};

/// Throws CodecError when the header line is missing or not byte-exact
/// (wrong file). Malformed rows are counted and skipped, never fatal.
DatasetParseResult load_dataset_csv(std::string_view bytes);

/// Canonical write-back: header, then all records ascending by key, two
/// decimal prices, LF endings. A pure function of store contents --
/// independent of shard count and insertion order.
std::string write_dataset_csv(const ShardedStore& store);

/// Same canonical form from a plain record list (sorted internally).
std::string write_dataset_csv(std::vector<Record> records);

}  // namespace shardstock
