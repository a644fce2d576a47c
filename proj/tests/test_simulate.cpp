#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "locload/balance.hpp"
#include "locload/sampling.hpp"
#include "locload/simulate.hpp"

using namespace locload;

TEST_CASE("quantile interpolates linearly") {
    CHECK(quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
    CHECK(quantile({3, 1, 2}, 0.5) == doctest::Approx(2.0));
    CHECK(quantile({5}, 0.25) == doctest::Approx(5.0));
    CHECK(quantile({1, 2, 3, 4, 5}, 0.25) == doctest::Approx(2.0));
    CHECK_THROWS_AS(quantile({}, 0.5), std::invalid_argument);
}

TEST_CASE("box summary keeps whiskers inside the 1.5 IQR fences") {
    const std::vector<double> values = {1, 2, 3, 4, 5, 6, 7, 8, 100};
    const BoxSummary s = summarize(values);
    CHECK(s.median == doctest::Approx(5.0));
    CHECK(s.whisker_lo == doctest::Approx(1.0));
    CHECK(s.whisker_hi == doctest::Approx(8.0)); // 100 is an outlier
    CHECK(s.q1 <= s.median);
    CHECK(s.median <= s.q3);
}

TEST_CASE("a single learner is never imbalanced") {
    const ImbalanceStats stats = simulate_imbalance(4096, 1, 64, 50, 7);
    for (double beta : stats.betas) {
        CHECK(beta == 0.0);
    }
    CHECK(stats.summary.median == 0.0);
}

TEST_CASE("invalid configurations are rejected") {
    CHECK_THROWS_AS(simulate_imbalance(100, 4, 64, 10, 7), std::invalid_argument);
    CHECK_THROWS_AS(simulate_imbalance(4096, 4, 64, 0, 7), std::invalid_argument);
}

TEST_CASE("simulated betas agree with the balance module") {
    const std::uint64_t d = 100000;
    const std::uint32_t p = 8;
    const std::uint64_t local_batch = 64;
    const std::uint64_t b = p * local_batch;
    const std::uint64_t seed = 99;

    const ImbalanceStats stats = simulate_imbalance(d, p, local_batch, 20, seed);
    const CacheDirectory dir(d, p, 1.0);
    for (std::uint64_t step = 0; step < 20; ++step) {
        GlobalBatch batch;
        batch.step = step;
        batch.samples = permutation_prefix(seed, step, d, b);
        const LocDistribution dist = loc_distribution(batch, dir);
        ImbalanceVector iv;
        iv.counts.assign(dist.counts.begin(), dist.counts.end());
        iv.targets = targets(static_cast<std::int64_t>(b), p);
        CHECK(stats.betas[step] == deficit_fraction(iv));
    }
}

TEST_CASE("median imbalance tracks the local batch size, not p") {
    // Reduced-steps version of the full sweep the acceptance suite runs.
    const ImbalanceStats a = simulate_imbalance(1'280'000, 8, 64, 200, 1);
    const ImbalanceStats b = simulate_imbalance(1'280'000, 32, 64, 200, 2);
    CHECK(std::abs(a.summary.median - b.summary.median) < 0.015);
    CHECK(a.summary.median == doctest::Approx(0.048).epsilon(0.35));

    // Insensitive to the dataset size.
    const ImbalanceStats c = simulate_imbalance(128'000, 16, 64, 300, 3);
    CHECK(std::abs(c.summary.median - 0.048) < 0.01);
}

TEST_CASE("k_alpha closed form") {
    // 100 + sqrt(2 * 100 * ln 64) = 128.84...
    CHECK(k_alpha_bound(6400, 64, 1.0) == doctest::Approx(128.8405).epsilon(1e-4));
}

TEST_CASE("balls-in-bins tail bound holds in its intended regime") {
    // b = p (ln p)^2 with p = 64 -> b = 1107.
    const BallsBinsCheck check = balls_in_bins_check(1107, 64, 1.5, 2000, 11);
    CHECK(check.exceed_rate < 0.05);
    CHECK(check.k_alpha == doctest::Approx(k_alpha_bound(1107, 64, 1.5)));
}

TEST_CASE("balls-in-bins outside the regime still reports a rate") {
    // One ball per bin on average: informational, the bound is loose here.
    const BallsBinsCheck check = balls_in_bins_check(100, 100, 2.0, 500, 5);
    CHECK(check.exceed_rate >= 0.0);
    CHECK(check.exceed_rate <= 1.0);
    CHECK(check.trials == 500);
}

TEST_CASE("balls-in-bins rejects bad arguments") {
    CHECK_THROWS_AS(balls_in_bins_check(100, 1, 2.0, 10, 5), std::invalid_argument);
    CHECK_THROWS_AS(balls_in_bins_check(100, 8, 1.0, 10, 5), std::invalid_argument);
    CHECK_THROWS_AS(balls_in_bins_check(100, 8, 2.0, 0, 5), std::invalid_argument);
}

TEST_CASE("epoch-cost rows follow the overlap rule") {
    ModelParams mp;
    mp.d = 128'000;
    mp.v = 100;
    mp.r = 800;
    mp.r_c = 8000;
    mp.r_b = 8000;
    mp.u = 1000;
    mp.alpha = 1.0;

    SUBCASE("regular waits only past the crossover") {
        const auto rows =
            simulate_epoch_costs(mp, {1, 2, 4, 8, 16, 32, 64}, Scheme::regular, 1, 64, 7);
        for (const EpochCostRow& row : rows) {
            CHECK(row.loading_s == doctest::Approx(row.io_s + row.preprocess_s));
            CHECK(row.total_s == doctest::Approx(row.training_s + row.waiting_s));
            if (row.p <= 7) {
                CHECK(row.waiting_s == 0.0);
            }
            if (row.p >= 16) {
                CHECK(row.waiting_s > 0.0);
            }
        }
    }

    SUBCASE("fully cached locality keeps decreasing until training floors") {
        const auto rows =
            simulate_epoch_costs(mp, {2, 4, 8, 16, 32, 64}, Scheme::locality, 1, 64, 7);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(rows[i].total_s <= rows[i - 1].total_s * 1.0001);
        }
        for (const EpochCostRow& row : rows) {
            CHECK(row.beta > 0.0);
            CHECK(row.beta < 0.2);
        }
    }

    SUBCASE("zero imbalance and a full cache never wait while u >= v") {
        // p = 1 owns every sample, so the sampled beta is exactly zero.
        const auto rows = simulate_epoch_costs(mp, {1}, Scheme::locality, 3, 64, 7);
        for (const EpochCostRow& row : rows) {
            CHECK(row.beta == 0.0);
            CHECK(row.io_s == 0.0);
            CHECK(row.waiting_s == 0.0);
        }
        // Same conclusion straight from the model, r_b arbitrary.
        for (double r_b : {1.0, 100.0, 1e9}) {
            for (double p : {1.0, 4.0, 64.0}) {
                ModelParams at = mp;
                at.p = p;
                at.r_b = r_b;
                at.beta = 0.0;
                const double loading = io_time_locality(at) + preprocessing_time(at);
                CHECK(std::max(0.0, loading - training_time(at)) == 0.0);
            }
        }
    }

    SUBCASE("regular versus locality gap grows with p") {
        const auto reg =
            simulate_epoch_costs(mp, {16, 64, 256}, Scheme::regular, 1, 64, 7);
        const auto loc =
            simulate_epoch_costs(mp, {16, 64, 256}, Scheme::locality, 1, 64, 7);
        double prev_ratio = 0.0;
        for (std::size_t i = 0; i < reg.size(); ++i) {
            const double ratio = reg[i].total_s / loc[i].total_s;
            CHECK(ratio >= prev_ratio);
            prev_ratio = ratio;
        }
        CHECK(prev_ratio > 4.0); // storage-bound vs training-bound at p = 256
    }
}

TEST_CASE("scheme names round-trip") {
    for (Scheme s : {Scheme::regular, Scheme::distcache, Scheme::locality}) {
        CHECK(scheme_from_name(scheme_name(s)) == s);
    }
    CHECK_THROWS_AS(scheme_from_name("bogus"), std::invalid_argument);
}
