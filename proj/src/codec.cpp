#include "shardstock/codec.hpp"

#include <algorithm>
#include <cstring>

namespace shardstock {

namespace {

constexpr bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }

// space, tab, CR, LF: accepted between entries and at the tail of the stream
constexpr bool is_separator(char c) noexcept {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

// key(13 digits); cursor lands one past the last digit
std::optional<Isbn13Key> scan_key(std::string_view s, std::size_t& pos) {
    if (pos + Isbn13Key::kLength > s.size()) return std::nullopt;
    const auto key = Isbn13Key::parse(s.substr(pos, Isbn13Key::kLength));
    if (key) pos += Isbn13Key::kLength;
    return key;
}

// price = 1-7 digits '.' 1-2 digits; the grammar caps the value at
// 9,999,999.99 so no separate range check is needed
std::optional<std::uint64_t> scan_price_cents(std::string_view s, std::size_t& pos) {
    std::size_t p = pos;
    std::uint64_t whole = 0;
    std::size_t digits = 0;
    while (p < s.size() && is_digit(s[p]) && digits < 7) {
        whole = whole * 10 + static_cast<std::uint64_t>(s[p] - '0');
        ++p;
        ++digits;
    }
    if (digits == 0 || p >= s.size() || s[p] != '.') return std::nullopt;
    ++p;
    std::uint64_t cents = 0;
    std::size_t decimals = 0;
    while (p < s.size() && is_digit(s[p]) && decimals < 2) {
        cents = cents * 10 + static_cast<std::uint64_t>(s[p] - '0');
        ++p;
        ++decimals;
    }
    if (decimals == 0) return std::nullopt;
    if (p < s.size() && is_digit(s[p])) return std::nullopt;  // 3+ decimals
    if (decimals == 1) cents *= 10;
    pos = p;
    return whole * 100 + cents;
}

// quantity = 1-9 digits; 9 digits max out at 999,999,999, in range by construction
std::optional<std::uint32_t> scan_quantity(std::string_view s, std::size_t& pos) {
    std::size_t p = pos;
    std::uint64_t value = 0;
    std::size_t digits = 0;
    while (p < s.size() && is_digit(s[p]) && digits < 9) {
        value = value * 10 + static_cast<std::uint64_t>(s[p] - '0');
        ++p;
        ++digits;
    }
    if (digits == 0) return std::nullopt;
    if (p < s.size() && is_digit(s[p])) return std::nullopt;  // 10+ digits
    pos = p;
    return static_cast<std::uint32_t>(value);
}

struct EntryScan {
    std::optional<DeltaEntry> entry;
    const char* fail_reason = nullptr;
};

// One full entry at `pos`: key '$' price '$' qty '$'. On success the cursor
// lands one past the trailing '$'; on failure it is untouched.
EntryScan scan_entry(std::string_view s, std::size_t& pos) {
    std::size_t p = pos;
    const auto key = scan_key(s, p);
    if (!key) return {std::nullopt, "expected 13-digit key"};
    if (p >= s.size() || s[p] != '$') return {std::nullopt, "expected '$' after key"};
    ++p;
    const auto cents = scan_price_cents(s, p);
    if (!cents) return {std::nullopt, "bad price (want 1-7 digits '.' 1-2 digits)"};
    if (p >= s.size() || s[p] != '$') return {std::nullopt, "expected '$' after price"};
    ++p;
    const auto qty = scan_quantity(s, p);
    if (!qty) return {std::nullopt, "bad quantity (want 1-9 digits)"};
    if (p >= s.size() || s[p] != '$') return {std::nullopt, "expected '$' after quantity"};
    ++p;
    pos = p;
    return {DeltaEntry{*key, *Price::from_cents(*cents), *Quantity::from_units(*qty), 0}, nullptr};
}

// Resume point after a malformed region starting at `from`: one past the next
// LF, else the next run of 13 digits, else end of input. Always > from.
std::size_t skip_malformed(std::string_view s, std::size_t from) {
    const std::size_t nl = s.find('\n', from);
    if (nl != std::string_view::npos) return nl + 1;
    std::size_t run = 0;
    for (std::size_t i = from + 1; i < s.size(); ++i) {
        run = is_digit(s[i]) ? run + 1 : 0;
        if (run == Isbn13Key::kLength) return i - Isbn13Key::kLength + 1;
    }
    return s.size();
}

void append_money(std::string& out, Price price) {
    const std::uint64_t cents = price.cents();
    out += std::to_string(cents / 100);
    out.push_back('.');
    out.push_back(static_cast<char>('0' + cents / 10 % 10));
    out.push_back(static_cast<char>('0' + cents % 10));
}

}  // namespace

StockParseReport parse_stock_stream(std::string_view bytes) {
    StockParseReport report;
    std::size_t pos = 0;
    std::uint64_t ordinal = 0;
    while (pos < bytes.size()) {
        if (is_separator(bytes[pos])) {
            ++pos;
            continue;
        }
        const std::size_t start = pos;
        auto [entry, reason] = scan_entry(bytes, pos);
        if (entry) {
            entry->source_ordinal = ordinal++;
            report.entries.push_back(*entry);
            continue;
        }
        ++report.malformed;
        if (report.malformed_samples.size() < StockParseReport::kMaxSamples) {
            report.malformed_samples.push_back(MalformedSample{start, reason});
        }
        pos = skip_malformed(bytes, start);
        assert(pos > start);
    }
    return report;
}

std::optional<Price> parse_price(std::string_view text) {
    std::size_t pos = 0;
    const auto cents = scan_price_cents(text, pos);
    if (!cents || pos != text.size()) return std::nullopt;
    return Price::from_cents(*cents);
}

std::string serialize_stock(std::span<const DeltaEntry> entries) {
    std::string out;
    out.reserve(entries.size() * 28);
    for (const DeltaEntry& e : entries) {
        out.append(e.key.view());
        out.push_back('$');
        append_money(out, e.new_price);
        out.push_back('$');
        out += std::to_string(e.new_quantity.units());
        out.append("$\n");
    }
    return out;
}

DatasetParseResult load_dataset_csv(std::string_view bytes) {
    std::size_t pos = 0;
    auto next_line = [&](std::string_view& line) -> bool {
        if (pos >= bytes.size()) return false;
        std::size_t end = bytes.find('\n', pos);
        if (end == std::string_view::npos) end = bytes.size();
        line = bytes.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos = end + 1;
        return true;
    };

    std::string_view header;
    if (!next_line(header) || header != kDatasetCsvHeader) {
        throw CodecError("dataset header mismatch: expected \"" + std::string(kDatasetCsvHeader) +
                         "\" (wrong file?)");
    }

    DatasetParseResult result;
    std::string_view line;
    while (next_line(line)) {
        if (line.empty()) continue;
        std::size_t p = 0;
        const auto key = scan_key(line, p);
        if (!key || p >= line.size() || line[p] != ',') {
            ++result.malformed;
            continue;
        }
        ++p;
        const auto cents = scan_price_cents(line, p);
        if (!cents || p >= line.size() || line[p] != ',') {
            ++result.malformed;
            continue;
        }
        ++p;
        const auto qty = scan_quantity(line, p);
        if (!qty || p != line.size()) {
            ++result.malformed;
            continue;
        }
        result.records.push_back(Record{*key, *Price::from_cents(*cents), *Quantity::from_units(*qty)});
    }
    return result;
}

namespace {

std::string render_csv_sorted(const std::vector<Record>& sorted) {
    std::string out;
    out.reserve(kDatasetCsvHeader.size() + 1 + sorted.size() * 28);
    out.append(kDatasetCsvHeader);
    out.push_back('\n');
    for (const Record& r : sorted) {
        out.append(r.key.view());
        out.push_back(',');
        append_money(out, r.price);
        out.push_back(',');
        out += std::to_string(r.quantity.units());
        out.push_back('\n');
    }
    return out;
}

}  // namespace

std::string write_dataset_csv(const ShardedStore& store) {
    return render_csv_sorted(store.snapshot_sorted());
}

std::string write_dataset_csv(std::vector<Record> records) {
    std::sort(records.begin(), records.end(),
              [](const Record& a, const Record& b) { return a.key < b.key; });
    return render_csv_sorted(records);
}

}  // namespace shardstock
