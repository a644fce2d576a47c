#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "locload/core.hpp"

namespace locload {

using SampleBytes = std::shared_ptr<const std::vector<std::uint8_t>>;

// Synthetic file-per-sample dataset: n files of exactly sample_bytes bytes,
// named by zero-padded decimal index (width 8) with a .bin extension.
struct DatasetSpec {
    std::filesystem::path root;
    std::uint64_t n = 0;
    std::uint64_t sample_bytes = 0;
};

std::filesystem::path sample_path(const DatasetSpec& spec, SampleId id);

// Writes the n sample files with deterministic pseudo-random contents.
// Re-running with the same (spec, seed) produces byte-identical files.
void generate_dataset(const DatasetSpec& spec, std::uint64_t seed);

struct PreprocessSpec {
    enum class Mode { none, spin, sleep };
    Mode mode = Mode::none;
    std::uint64_t micros_per_sample = 0;
};

struct CacheSpec {
    enum class Mode { off, memory };
    Mode mode = Mode::off;
    std::uint64_t capacity_samples = 0;
};

struct LoaderConfig {
    std::uint32_t workers = 1;                // concurrent batch loaders
    std::uint32_t intra_batch_parallelism = 1; // parallel sample tasks per batch
    std::uint32_t prefetch_depth = 1;          // outstanding batch requests
    std::uint64_t batch_size = 1;
    PreprocessSpec preprocess;
    CacheSpec cache;
};

struct ThroughputReport {
    std::uint64_t epoch = 0;
    std::uint64_t batches = 0;
    std::uint64_t samples = 0;
    double wall_s = 0;
    double samples_per_second = 0;
    std::uint64_t cache_hits = 0;
    std::uint64_t cache_misses = 0;
    std::vector<double> batch_latency_s; // request to in-order delivery, per batch
};

// Populate-on-first-touch sample store with a fixed capacity and no
// replacement. Concurrent readers, exclusive writers.
class SampleCache {
public:
    explicit SampleCache(std::uint64_t capacity) : capacity_(capacity) {}

    SampleBytes find(SampleId id) const {
        std::shared_lock lock(mu_);
        auto it = map_.find(id);
        return it == map_.end() ? nullptr : it->second;
    }

    void insert(SampleId id, SampleBytes bytes) {
        std::unique_lock lock(mu_);
        if (map_.size() < capacity_) {
            map_.emplace(id, std::move(bytes));
        }
    }

    std::uint64_t size() const {
        std::shared_lock lock(mu_);
        return map_.size();
    }

private:
    mutable std::shared_mutex mu_;
    std::uint64_t capacity_;
    std::unordered_map<SampleId, SampleBytes> map_;
};

// Called once per batch, in step order, with the loaded sample payloads.
using BatchConsumer =
    std::function<void(const GlobalBatch&, const std::vector<SampleBytes>&)>;

// Concurrent epoch loader: a coordinator keeps prefetch_depth batch
// requests outstanding against a pool of `workers` loader threads, each of
// which loads and preprocesses its batch with up to intra_batch_parallelism
// parallel sample tasks. Completed batches are re-ordered so delivery
// always follows the epoch's step order. The cache (when enabled) persists
// across epochs of the same Loader.
class Loader {
public:
    Loader(DatasetSpec spec, LoaderConfig cfg);

    // Consumes every full batch of the epoch permutation, in order.
    // Propagates a std::runtime_error naming the sample when a file is
    // missing or truncated. All worker threads are joined before returning,
    // on success and on error alike.
    ThroughputReport run_epoch(std::uint64_t seed, std::uint64_t epoch,
                               const BatchConsumer& consumer = {});

    const SampleCache* cache() const { return cache_.get(); }

private:
    DatasetSpec spec_;
    LoaderConfig cfg_;
    std::shared_ptr<SampleCache> cache_;
};

// Runs epoch 0 (cold) and epoch 1 (warm) against one shared cache.
// Requires a memory cache with capacity >= spec.n.
std::pair<ThroughputReport, ThroughputReport>
warm_cache_epoch(const DatasetSpec& spec, const LoaderConfig& cfg, std::uint64_t seed);

} // namespace locload
