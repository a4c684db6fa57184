#include "shardstock/core.hpp"

#include <algorithm>
#include <stdexcept>

namespace shardstock {

ShardedStore::ShardedStore(std::size_t shard_count) {
    if (shard_count == 0) throw std::invalid_argument("shard count must be >= 1");
    shards_.resize(shard_count);
}

std::vector<Record> ShardedStore::snapshot_sorted() const {
    std::vector<Record> out;
    out.reserve(size());
    for (const Shard& s : shards_) {
        for (const auto& [key, value] : s) {
            out.push_back(Record{key, value.price, value.quantity});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const Record& a, const Record& b) { return a.key < b.key; });
    return out;
}

BuildResult build_store(std::span<const Record> records, std::size_t shard_count) {
    BuildResult result{ShardedStore(shard_count), 0};
    const std::size_t per_shard = records.size() / shard_count + 1;
    for (std::size_t j = 0; j < shard_count; ++j) {
        result.store.shard(j).reserve(per_shard);
    }
    for (const Record& record : records) {
        auto& shard = result.store.shard(result.store.shard_of(record.key));
        const auto [it, fresh] = shard.insert_or_assign(record.key,
                                                        StoredValue{record.price, record.quantity});
        if (!fresh) ++result.duplicate_keys;
    }
    return result;
}

}  // namespace shardstock
