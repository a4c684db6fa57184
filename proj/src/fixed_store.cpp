#include "shardstock/fixed_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <system_error>
#include <utility>

namespace shardstock {

namespace {

using namespace fixed_layout;

void store_u64_le(char* dst, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) dst[i] = static_cast<char>(v >> (8 * i) & 0xff);
}

void store_u32_le(char* dst, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) dst[i] = static_cast<char>(v >> (8 * i) & 0xff);
}

std::uint64_t load_u64_le(const char* src) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(src[i])) << (8 * i);
    return v;
}

std::uint32_t load_u32_le(const char* src) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(src[i])) << (8 * i);
    return v;
}

void encode_record(char* dst, const Record& r) {
    std::memset(dst, 0, kRecordSize);
    std::memcpy(dst, r.key.digits().data(), Isbn13Key::kLength);
    store_u64_le(dst + kPriceOffset, r.price.cents());
    store_u32_le(dst + kQuantityOffset, r.quantity.units());
}

Record decode_record(const char* src) {
    const auto key = Isbn13Key::parse({src, Isbn13Key::kLength});
    if (!key) throw CodecError("fixed store: record key is not 13 ASCII digits");
    const auto price = Price::from_cents(load_u64_le(src + kPriceOffset));
    const auto qty = Quantity::from_units(load_u32_le(src + kQuantityOffset));
    if (!price || !qty) throw CodecError("fixed store: record value out of range");
    return Record{*key, *price, *qty};
}

[[noreturn]] void throw_errno(const std::string& what) {
    throw std::system_error(errno, std::generic_category(), what);
}

void pread_exact(int fd, char* buf, std::size_t len, std::uint64_t offset) {
    std::size_t done = 0;
    while (done < len) {
        const ssize_t n = ::pread(fd, buf + done, len - done, static_cast<off_t>(offset + done));
        if (n < 0) {
            if (errno == EINTR) continue;
            throw_errno("fixed store: pread");
        }
        if (n == 0) throw CodecError("fixed store: truncated file");
        done += static_cast<std::size_t>(n);
    }
}

void pwrite_exact(int fd, const char* buf, std::size_t len, std::uint64_t offset) {
    std::size_t done = 0;
    while (done < len) {
        const ssize_t n = ::pwrite(fd, buf + done, len - done, static_cast<off_t>(offset + done));
        if (n < 0) {
            if (errno == EINTR) continue;
            throw_errno("fixed store: pwrite");
        }
        done += static_cast<std::size_t>(n);
    }
}

}  // namespace

std::string write_fixed_store(std::span<const Record> records) {
    std::vector<Record> sorted(records.begin(), records.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const Record& a, const Record& b) { return a.key < b.key; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].key == sorted[i - 1].key) {
            throw CodecError("fixed store: duplicate key " + std::string(sorted[i].key.view()));
        }
    }
    std::string out(kHeaderSize + kRecordSize * sorted.size(), '\0');
    std::memcpy(out.data(), kMagic.data(), kMagic.size());
    store_u64_le(out.data() + kMagic.size(), sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        encode_record(out.data() + kHeaderSize + kRecordSize * i, sorted[i]);
    }
    return out;
}

void FixedStoreFile::create(const std::filesystem::path& path, std::span<const Record> records) {
    const std::string image = write_fixed_store(records);
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd < 0) throw_errno("fixed store: open for create " + path.string());
    try {
        pwrite_exact(fd, image.data(), image.size(), 0);
        if (::fdatasync(fd) != 0) throw_errno("fixed store: fdatasync");
    } catch (...) {
        ::close(fd);
        throw;
    }
    ::close(fd);
}

FixedStoreFile::FixedStoreFile(const std::filesystem::path& path, bool writable)
    : writable_(writable) {
    fd_ = ::open(path.c_str(), writable ? O_RDWR : O_RDONLY);
    if (fd_ < 0) throw_errno("fixed store: open " + path.string());

    char header[kHeaderSize];
    const ssize_t n = ::pread(fd_, header, kHeaderSize, 0);
    if (n != static_cast<ssize_t>(kHeaderSize)) {
        ::close(fd_);
        fd_ = -1;
        throw CodecError("fixed store: file too short for header: " + path.string());
    }
    if (std::memcmp(header, kMagic.data(), kMagic.size()) != 0) {
        ::close(fd_);
        fd_ = -1;
        throw CodecError("fixed store: bad magic in " + path.string());
    }
    count_ = load_u64_le(header + kMagic.size());

    const off_t end = ::lseek(fd_, 0, SEEK_END);
    if (end < 0 || static_cast<std::uint64_t>(end) != kHeaderSize + kRecordSize * count_) {
        ::close(fd_);
        fd_ = -1;
        throw CodecError("fixed store: length does not match record count (truncated?): " +
                         path.string());
    }
}

FixedStoreFile::~FixedStoreFile() {
    if (fd_ >= 0) ::close(fd_);
}

FixedStoreFile::FixedStoreFile(FixedStoreFile&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)),
      count_(other.count_),
      writable_(other.writable_) {}

FixedStoreFile& FixedStoreFile::operator=(FixedStoreFile&& other) noexcept {
    if (this != &other) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = std::exchange(other.fd_, -1);
        count_ = other.count_;
        writable_ = other.writable_;
    }
    return *this;
}

Record FixedStoreFile::read_record(std::uint64_t index) const {
    if (index >= count_) throw CodecError("fixed store: record index out of range");
    char buf[kRecordSize];
    pread_exact(fd_, buf, kRecordSize, kHeaderSize + kRecordSize * index);
    return decode_record(buf);
}

Isbn13Key FixedStoreFile::read_key(std::uint64_t index) const {
    if (index >= count_) throw CodecError("fixed store: record index out of range");
    char buf[Isbn13Key::kLength];
    pread_exact(fd_, buf, Isbn13Key::kLength, kHeaderSize + kRecordSize * index);
    const auto key = Isbn13Key::parse({buf, Isbn13Key::kLength});
    if (!key) throw CodecError("fixed store: record key is not 13 ASCII digits");
    return *key;
}

std::optional<std::uint64_t> FixedStoreFile::find(const Isbn13Key& key) const {
    std::uint64_t lo = 0;
    std::uint64_t hi = count_;
    while (lo < hi) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        const Isbn13Key probe = read_key(mid);
        if (probe < key) {
            lo = mid + 1;
        } else if (key < probe) {
            hi = mid;
        } else {
            return mid;
        }
    }
    return std::nullopt;
}

void FixedStoreFile::overwrite_record(std::uint64_t index, Price price, Quantity quantity) {
    if (index >= count_) throw CodecError("fixed store: record index out of range");
    if (!writable_) throw CodecError("fixed store: opened read-only");
    char buf[12];
    store_u64_le(buf, price.cents());
    store_u32_le(buf + 8, quantity.units());
    pwrite_exact(fd_, buf, sizeof buf, kHeaderSize + kRecordSize * index + kPriceOffset);
}

void FixedStoreFile::flush() {
    if (::fdatasync(fd_) != 0) throw_errno("fixed store: fdatasync");
}

std::vector<Record> FixedStoreFile::read_all() const {
    std::vector<Record> out;
    out.reserve(count_);
    char buf[kRecordSize];
    for (std::uint64_t i = 0; i < count_; ++i) {
        pread_exact(fd_, buf, kRecordSize, kHeaderSize + kRecordSize * i);
        out.push_back(decode_record(buf));
    }
    return out;
}

}  // namespace shardstock
