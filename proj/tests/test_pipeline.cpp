#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <unistd.h>

#include "locload/core.hpp"
#include "locload/pipeline.hpp"

using namespace locload;
namespace fs = std::filesystem;

namespace {

struct TempDataset {
    DatasetSpec spec;

    TempDataset(std::uint64_t n, std::uint64_t sample_bytes, std::uint64_t seed = 1) {
        static int counter = 0;
        spec.root = fs::temp_directory_path() /
                    ("locload_test_" + std::to_string(::getpid()) + "_" +
                     std::to_string(counter++));
        spec.n = n;
        spec.sample_bytes = sample_bytes;
        generate_dataset(spec, seed);
    }
    ~TempDataset() {
        std::error_code ec;
        fs::remove_all(spec.root, ec);
    }
};

std::vector<std::uint8_t> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

LoaderConfig config(std::uint32_t w, std::uint32_t t, std::uint32_t f, std::uint64_t batch) {
    LoaderConfig cfg;
    cfg.workers = w;
    cfg.intra_batch_parallelism = t;
    cfg.prefetch_depth = f;
    cfg.batch_size = batch;
    return cfg;
}

} // namespace

TEST_CASE("generator writes exact-size files with stable names") {
    TempDataset ds(100, 1024);
    std::uint64_t total = 0;
    for (SampleId id = 0; id < 100; ++id) {
        const fs::path path = sample_path(ds.spec, id);
        REQUIRE(fs::exists(path));
        total += fs::file_size(path);
    }
    CHECK(total == 102'400);
    CHECK(sample_path(ds.spec, 7).filename() == "00000007.bin");
    CHECK(sample_path(ds.spec, 12345678).filename() == "12345678.bin");
}

TEST_CASE("generator handles 131 KB fixed-size samples") {
    TempDataset ds(4, 131'072);
    for (SampleId id = 0; id < 4; ++id) {
        CHECK(fs::file_size(sample_path(ds.spec, id)) == 131'072);
    }
}

TEST_CASE("regeneration with the same seed is byte-identical") {
    TempDataset ds(20, 512, 9);
    const auto before = read_file(sample_path(ds.spec, 13));
    generate_dataset(ds.spec, 9);
    const auto after = read_file(sample_path(ds.spec, 13));
    CHECK(before == after);

    generate_dataset(ds.spec, 10);
    const auto reseeded = read_file(sample_path(ds.spec, 13));
    CHECK(before != reseeded);
}

TEST_CASE("delivered batches follow the epoch sequence for any topology") {
    TempDataset ds(256, 64);
    const std::uint64_t seed = 5, epoch = 2;
    const auto expected = batches(permute_epoch(seed, epoch, ds.spec.n), 32);

    for (std::uint32_t w : {1u, 2u, 4u, 16u}) {
        for (std::uint32_t t : {1u, 3u, 16u}) {
            for (std::uint32_t f : {1u, 4u, 16u}) {
                CAPTURE(w);
                CAPTURE(t);
                CAPTURE(f);
                Loader loader(ds.spec, config(w, t, f, 32));
                std::vector<GlobalBatch> delivered;
                const ThroughputReport report =
                    loader.run_epoch(seed, epoch, [&](const GlobalBatch& b, const auto&) {
                        delivered.push_back(b);
                    });
                REQUIRE(delivered.size() == expected.size());
                for (std::size_t i = 0; i < expected.size(); ++i) {
                    REQUIRE(delivered[i].step == expected[i].step);
                    REQUIRE(delivered[i].samples == expected[i].samples);
                }
                CHECK(report.samples == 256);
                CHECK(report.batches == 8);
                CHECK(report.batch_latency_s.size() == 8);
            }
        }
    }
}

TEST_CASE("delivered payloads equal the on-disk bytes") {
    TempDataset ds(64, 256);
    Loader loader(ds.spec, config(4, 2, 4, 16));
    loader.run_epoch(3, 0, [&](const GlobalBatch& batch, const std::vector<SampleBytes>& data) {
        for (std::size_t i = 0; i < batch.samples.size(); ++i) {
            const auto disk = read_file(sample_path(ds.spec, batch.samples[i]));
            REQUIRE(*data[i] == disk);
        }
    });
}

TEST_CASE("report accounting is consistent") {
    TempDataset ds(100, 128);
    Loader loader(ds.spec, config(2, 2, 2, 16));
    const ThroughputReport report = loader.run_epoch(1, 0);
    CHECK(report.batches == 6);           // floor(100 / 16)
    CHECK(report.samples == 96);          // remainder dropped
    CHECK(report.cache_hits + report.cache_misses == report.samples);
    CHECK(report.cache_hits == 0);        // cache off
    CHECK(report.samples_per_second ==
          doctest::Approx(static_cast<double>(report.samples) / report.wall_s));
}

TEST_CASE("full-capacity cache serves the warm epoch entirely") {
    TempDataset ds(128, 64);
    LoaderConfig cfg = config(2, 2, 4, 16);
    cfg.cache.mode = CacheSpec::Mode::memory;
    cfg.cache.capacity_samples = ds.spec.n;

    const auto [cold, warm] = warm_cache_epoch(ds.spec, cfg, 7);
    CHECK(cold.cache_misses == 128);
    CHECK(warm.cache_hits == 128);
    CHECK(warm.cache_misses == 0);
}

TEST_CASE("zero-capacity cache never hits") {
    TempDataset ds(64, 64);
    LoaderConfig cfg = config(1, 1, 2, 16);
    cfg.cache.mode = CacheSpec::Mode::memory;
    cfg.cache.capacity_samples = 0;

    Loader loader(ds.spec, cfg);
    for (std::uint64_t epoch = 0; epoch < 3; ++epoch) {
        const ThroughputReport report = loader.run_epoch(1, epoch);
        CHECK(report.cache_hits == 0);
        CHECK(report.cache_misses == 64);
    }
}

TEST_CASE("half-capacity cache settles at a one-half hit rate") {
    TempDataset ds(256, 64);
    LoaderConfig cfg = config(1, 1, 2, 32); // single worker: first half populates
    cfg.cache.mode = CacheSpec::Mode::memory;
    cfg.cache.capacity_samples = ds.spec.n / 2;

    Loader loader(ds.spec, cfg);
    loader.run_epoch(11, 0);
    const ThroughputReport steady = loader.run_epoch(11, 1);
    const double hit_rate = static_cast<double>(steady.cache_hits) /
                            static_cast<double>(steady.samples);
    CHECK(hit_rate == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("missing and truncated files raise errors naming the sample") {
    TempDataset ds(32, 64);

    SUBCASE("missing") {
        fs::remove(sample_path(ds.spec, 17));
        Loader loader(ds.spec, config(2, 2, 2, 8));
        CHECK_THROWS_WITH_AS(loader.run_epoch(1, 0), doctest::Contains("sample 17"),
                             std::runtime_error);
    }
    SUBCASE("truncated") {
        std::ofstream(sample_path(ds.spec, 3), std::ios::binary | std::ios::trunc) << "xy";
        Loader loader(ds.spec, config(2, 2, 2, 8));
        CHECK_THROWS_WITH_AS(loader.run_epoch(1, 0), doctest::Contains("sample 3"),
                             std::runtime_error);
    }
}

TEST_CASE("sleep-injected preprocessing scales down with parallel sample tasks") {
    // Light version of the timing law; the acceptance suite runs it at the
    // full scale and tolerance.
    TempDataset ds(256, 64);
    LoaderConfig serial = config(1, 1, 2, 32);
    serial.preprocess = {PreprocessSpec::Mode::sleep, 1000};
    LoaderConfig fanout = config(1, 4, 2, 32);
    fanout.preprocess = {PreprocessSpec::Mode::sleep, 1000};

    const ThroughputReport a = Loader(ds.spec, serial).run_epoch(1, 0);
    const ThroughputReport b = Loader(ds.spec, fanout).run_epoch(1, 0);
    CHECK(a.wall_s > 2.5 * b.wall_s); // ~4x in theory
}

TEST_CASE("spin-injected preprocessing burns the configured time") {
    TempDataset ds(64, 64);
    LoaderConfig cfg = config(1, 1, 2, 16);
    cfg.preprocess = {PreprocessSpec::Mode::spin, 500};

    const ThroughputReport report = Loader(ds.spec, cfg).run_epoch(1, 0);
    const double nominal = 64 * 500e-6;
    CHECK(report.wall_s >= 0.9 * nominal);
    CHECK(report.wall_s <= 4.0 * nominal);
}

TEST_CASE("invalid loader configuration is rejected") {
    TempDataset ds(16, 16);
    CHECK_THROWS_AS(Loader(ds.spec, config(0, 1, 1, 4)), std::invalid_argument);
    CHECK_THROWS_AS(Loader(ds.spec, config(1, 0, 1, 4)), std::invalid_argument);
    CHECK_THROWS_AS(Loader(ds.spec, config(1, 1, 0, 4)), std::invalid_argument);
    CHECK_THROWS_AS(Loader(ds.spec, config(1, 1, 1, 0)), std::invalid_argument);
    CHECK_THROWS_AS(warm_cache_epoch(ds.spec, config(1, 1, 1, 4), 1), std::invalid_argument);
}
