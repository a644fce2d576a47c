#include "locload/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

#include "locload/rng.hpp"

namespace locload {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

template <typename T>
class BoundedQueue {
public:
    explicit BoundedQueue(std::size_t capacity) : capacity_(capacity) {}

    // Blocks while full. Returns false once closed.
    bool push(T item) {
        std::unique_lock lock(mu_);
        not_full_.wait(lock, [&] { return closed_ || q_.size() < capacity_; });
        if (closed_) return false;
        q_.push_back(std::move(item));
        not_empty_.notify_one();
        return true;
    }

    // Blocks while empty. Returns nullopt once closed and drained.
    std::optional<T> pop() {
        std::unique_lock lock(mu_);
        not_empty_.wait(lock, [&] { return closed_ || !q_.empty(); });
        if (q_.empty()) return std::nullopt;
        T item = std::move(q_.front());
        q_.pop_front();
        not_full_.notify_one();
        return item;
    }

    void close() {
        std::lock_guard lock(mu_);
        closed_ = true;
        not_empty_.notify_all();
        not_full_.notify_all();
    }

private:
    std::size_t capacity_;
    std::mutex mu_;
    std::condition_variable not_full_;
    std::condition_variable not_empty_;
    std::deque<T> q_;
    bool closed_ = false;
};

struct BatchRequest {
    GlobalBatch batch;
    Clock::time_point requested;
};

struct BatchResult {
    GlobalBatch batch;
    std::vector<SampleBytes> data;
    Clock::time_point requested;
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::exception_ptr error;
};

// Injected per-sample delay. Paced against an absolute schedule so the
// injected rate stays exact even where the kernel rounds short sleeps up
// to timer-tick granularity.
class PreprocessPacer {
public:
    explicit PreprocessPacer(const PreprocessSpec& spec)
        : spec_(spec), deadline_(Clock::now()) {}

    void sample() {
        if (spec_.mode == PreprocessSpec::Mode::none || spec_.micros_per_sample == 0) {
            return;
        }
        deadline_ += std::chrono::microseconds(spec_.micros_per_sample);
        if (spec_.mode == PreprocessSpec::Mode::sleep) {
            std::this_thread::sleep_until(deadline_);
        } else {
            while (Clock::now() < deadline_) {
            }
        }
    }

private:
    PreprocessSpec spec_;
    Clock::time_point deadline_;
};

SampleBytes read_sample(const DatasetSpec& spec, SampleId id) {
    const std::filesystem::path path = sample_path(spec, id);
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("sample " + std::to_string(id) + ": cannot open " +
                                 path.string());
    }
    auto bytes = std::make_shared<std::vector<std::uint8_t>>(spec.sample_bytes);
    in.read(reinterpret_cast<char*>(bytes->data()),
            static_cast<std::streamsize>(spec.sample_bytes));
    if (static_cast<std::uint64_t>(in.gcount()) != spec.sample_bytes) {
        throw std::runtime_error("sample " + std::to_string(id) + ": truncated file " +
                                 path.string() + " (read " + std::to_string(in.gcount()) +
                                 " of " + std::to_string(spec.sample_bytes) + " bytes)");
    }
    return bytes;
}

struct LoadCounters {
    std::atomic<std::uint64_t> hits{0};
    std::atomic<std::uint64_t> misses{0};
};

SampleBytes load_sample(const DatasetSpec& spec, SampleCache* cache, SampleId id,
                        LoadCounters& counters) {
    if (cache != nullptr) {
        if (SampleBytes hit = cache->find(id)) {
            counters.hits.fetch_add(1, std::memory_order_relaxed);
            return hit;
        }
    }
    counters.misses.fetch_add(1, std::memory_order_relaxed);
    SampleBytes bytes = read_sample(spec, id);
    if (cache != nullptr) {
        cache->insert(id, bytes);
    }
    return bytes;
}

// Loads the batch with up to cfg.intra_batch_parallelism parallel sample
// tasks: contiguous chunks, one handled inline, the rest on spawned threads.
BatchResult load_batch(const DatasetSpec& spec, const LoaderConfig& cfg, SampleCache* cache,
                       BatchRequest request) {
    BatchResult result;
    result.requested = request.requested;
    result.batch = std::move(request.batch);
    const std::size_t n = result.batch.samples.size();
    result.data.resize(n);

    LoadCounters counters;
    const std::size_t tasks =
        std::min<std::size_t>(std::max<std::uint32_t>(1, cfg.intra_batch_parallelism), n);
    const std::size_t chunk = (n + tasks - 1) / tasks;

    std::vector<std::exception_ptr> errors(tasks);
    auto run_chunk = [&](std::size_t task) {
        try {
            const std::size_t begin = task * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            PreprocessPacer pacer(cfg.preprocess);
            for (std::size_t i = begin; i < end; ++i) {
                result.data[i] = load_sample(spec, cache, result.batch.samples[i], counters);
                pacer.sample();
            }
        } catch (...) {
            errors[task] = std::current_exception();
        }
    };

    std::vector<std::thread> helpers;
    helpers.reserve(tasks - 1);
    for (std::size_t task = 1; task < tasks; ++task) {
        helpers.emplace_back(run_chunk, task);
    }
    run_chunk(0);
    for (auto& t : helpers) {
        t.join();
    }

    for (const auto& err : errors) {
        if (err) {
            result.error = err;
            break;
        }
    }
    result.hits = counters.hits.load();
    result.misses = counters.misses.load();
    return result;
}

} // namespace

std::filesystem::path sample_path(const DatasetSpec& spec, SampleId id) {
    char name[32];
    std::snprintf(name, sizeof(name), "%08llu.bin", static_cast<unsigned long long>(id));
    return spec.root / name;
}

void generate_dataset(const DatasetSpec& spec, std::uint64_t seed) {
    if (spec.n == 0 || spec.sample_bytes == 0) {
        throw std::invalid_argument("generate_dataset: need n >= 1 and sample_bytes >= 1");
    }
    std::error_code ec;
    std::filesystem::create_directories(spec.root, ec);
    if (ec) {
        throw std::runtime_error("generate_dataset: cannot create " + spec.root.string() +
                                 ": " + ec.message());
    }

    std::vector<std::uint8_t> buf(spec.sample_bytes);
    for (SampleId id = 0; id < spec.n; ++id) {
        SplitMix64 rng(derive_seed(seed, id));
        std::uint64_t word = 0;
        for (std::uint64_t i = 0; i < spec.sample_bytes; ++i) {
            if (i % 8 == 0) word = rng.next();
            buf[i] = static_cast<std::uint8_t>(word >> ((i % 8) * 8));
        }
        const std::filesystem::path path = sample_path(spec, id);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out.write(reinterpret_cast<const char*>(buf.data()),
                       static_cast<std::streamsize>(buf.size()))) {
            throw std::runtime_error("generate_dataset: write failed for " + path.string());
        }
    }
}

Loader::Loader(DatasetSpec spec, LoaderConfig cfg) : spec_(std::move(spec)), cfg_(cfg) {
    if (cfg_.workers == 0 || cfg_.intra_batch_parallelism == 0 || cfg_.prefetch_depth == 0 ||
        cfg_.batch_size == 0) {
        throw std::invalid_argument("Loader: workers, parallelism, prefetch and batch size "
                                    "must all be >= 1");
    }
    if (cfg_.cache.mode == CacheSpec::Mode::memory) {
        cache_ = std::make_shared<SampleCache>(cfg_.cache.capacity_samples);
    }
}

ThroughputReport Loader::run_epoch(std::uint64_t seed, std::uint64_t epoch,
                                   const BatchConsumer& consumer) {
    const EpochPermutation perm = permute_epoch(seed, epoch, spec_.n);
    std::vector<GlobalBatch> plan = batches(perm, cfg_.batch_size);

    ThroughputReport report;
    report.epoch = epoch;
    report.batches = plan.size();
    report.samples = plan.size() * cfg_.batch_size;
    report.batch_latency_s.resize(plan.size());

    const std::size_t depth = cfg_.prefetch_depth;
    BoundedQueue<BatchRequest> requests(depth);
    BoundedQueue<BatchResult> completions(depth);

    auto worker_fn = [&] {
        while (auto request = requests.pop()) {
            BatchResult result = load_batch(spec_, cfg_, cache_.get(), std::move(*request));
            const bool failed = static_cast<bool>(result.error);
            if (!completions.push(std::move(result)) || failed) {
                break;
            }
        }
    };

    std::vector<std::thread> workers;
    workers.reserve(cfg_.workers);
    const auto epoch_start = Clock::now();

    std::exception_ptr failure;
    try {
        for (std::uint32_t w = 0; w < cfg_.workers; ++w) {
            workers.emplace_back(worker_fn);
        }

        std::size_t submitted = 0;
        auto submit_next = [&] {
            if (submitted < plan.size()) {
                requests.push({std::move(plan[submitted]), Clock::now()});
                ++submitted;
            }
        };
        for (std::size_t i = 0; i < depth; ++i) {
            submit_next();
        }

        std::map<std::uint64_t, BatchResult> reorder;
        std::uint64_t next_step = 0;
        std::size_t delivered = 0;
        while (delivered < plan.size()) {
            auto completed = completions.pop();
            if (!completed) {
                throw std::runtime_error("loader: completion channel closed early");
            }
            if (completed->error) {
                std::rethrow_exception(completed->error);
            }
            submit_next();
            reorder.emplace(completed->batch.step, std::move(*completed));
            while (!reorder.empty() && reorder.begin()->first == next_step) {
                BatchResult& ready = reorder.begin()->second;
                report.batch_latency_s[next_step] = seconds_between(ready.requested, Clock::now());
                report.cache_hits += ready.hits;
                report.cache_misses += ready.misses;
                if (consumer) {
                    consumer(ready.batch, ready.data);
                }
                reorder.erase(reorder.begin());
                ++next_step;
                ++delivered;
            }
        }
    } catch (...) {
        failure = std::current_exception();
    }

    requests.close();
    completions.close();
    for (auto& t : workers) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    report.wall_s = seconds_between(epoch_start, Clock::now());
    report.samples_per_second =
        report.wall_s > 0 ? static_cast<double>(report.samples) / report.wall_s : 0.0;
    return report;
}

std::pair<ThroughputReport, ThroughputReport>
warm_cache_epoch(const DatasetSpec& spec, const LoaderConfig& cfg, std::uint64_t seed) {
    if (cfg.cache.mode != CacheSpec::Mode::memory || cfg.cache.capacity_samples < spec.n) {
        throw std::invalid_argument("warm_cache_epoch: needs a memory cache holding the "
                                    "whole dataset");
    }
    Loader loader(spec, cfg);
    ThroughputReport cold = loader.run_epoch(seed, 0);
    ThroughputReport warm = loader.run_epoch(seed, 1);
    return {std::move(cold), std::move(warm)};
}

} // namespace locload
