#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shardstock/codec.hpp"
#include "shardstock/core.hpp"

namespace shardstock {

// ---------------------------------------------------------------------------
// Fixed-width binary record file: the seekable disk-resident store behind the
// conventional baseline.
//
// File = 16-byte header, then records sorted strictly ascending by key:
//     header:  magic "MBMPFIX1", record count u64 LE
//     record:  32 bytes
//       [0..12]  key, ASCII digits
//       [13]     0x00
//       [14..21] price cents, u64 LE
//       [22..25] quantity,    u32 LE
//       [26..31] 0x00 pad
// ---------------------------------------------------------------------------

namespace fixed_layout {
inline constexpr std::string_view kMagic = "MBMPFIX1";
inline constexpr std::size_t kHeaderSize = 16;
inline constexpr std::size_t kRecordSize = 32;
inline constexpr std::size_t kPriceOffset = 14;   // within a record
inline constexpr std::size_t kQuantityOffset = 22;
}  // namespace fixed_layout

/// Encodes a full store image. Records are sorted by key; duplicate keys are
/// a caller error and throw CodecError.
std::string write_fixed_store(std::span<const Record> records);

/// Seek-based access to an on-disk fixed store. Reads and overwrites touch
/// only the addressed record; overwrite modifies bytes 14..25 in place.
/// Single-writer: callers serialize mutation themselves (the baseline engine
/// is single-threaded).
class FixedStoreFile {
public:
    /// Writes a fresh store image to `path` (overwriting) and syncs it.
    static void create(const std::filesystem::path& path, std::span<const Record> records);

    /// Opens and validates magic and length. Throws CodecError on bad magic
    /// or a length that does not match the header count (truncated file).
    explicit FixedStoreFile(const std::filesystem::path& path, bool writable = false);
    ~FixedStoreFile();

    FixedStoreFile(FixedStoreFile&& other) noexcept;
    FixedStoreFile& operator=(FixedStoreFile&& other) noexcept;
    FixedStoreFile(const FixedStoreFile&) = delete;
    FixedStoreFile& operator=(const FixedStoreFile&) = delete;

    std::uint64_t record_count() const noexcept { return count_; }

    /// Throws CodecError when index >= record_count().
    Record read_record(std::uint64_t index) const;

    /// Key-only read; one 13-byte pread, used by the binary search.
    Isbn13Key read_key(std::uint64_t index) const;

    /// Binary search over the sorted records, O(log n) seek+reads.
    std::optional<std::uint64_t> find(const Isbn13Key& key) const;

    /// In-place overwrite of bytes 14..25 of the addressed record.
    void overwrite_record(std::uint64_t index, Price price, Quantity quantity);

    /// Durability barrier (fdatasync).
    void flush();

    std::vector<Record> read_all() const;

private:
    FixedStoreFile() = default;

    int fd_ = -1;
    std::uint64_t count_ = 0;
    bool writable_ = false;
};

}  // namespace shardstock
