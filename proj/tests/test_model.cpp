#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "locload/model.hpp"

using namespace locload;

namespace {

constexpr double kTol = 1e-12;

ModelParams base() {
    ModelParams mp;
    mp.d = 1'280'000;
    mp.p = 16;
    mp.v = 100;
    mp.r = 800;
    mp.r_c = 8000;
    mp.r_b = 8000;
    mp.u = 1000;
    mp.alpha = 1.0;
    mp.beta = 0.048;
    return mp;
}

} // namespace

TEST_CASE("training time is d / (p v)") {
    ModelParams mp = base();
    mp.d = 1000, mp.p = 10, mp.v = 10;
    CHECK(training_time(mp) == doctest::Approx(10.0).epsilon(kTol));
    mp.p = 20;
    CHECK(training_time(mp) == doctest::Approx(5.0).epsilon(kTol));

    mp = base();
    mp.d = 1.28e6, mp.p = 16, mp.v = 2000;
    CHECK(training_time(mp) == doctest::Approx(40.0).epsilon(kTol));
}

TEST_CASE("storage I/O time is d / r, independent of p") {
    ModelParams mp = base();
    mp.d = 1000, mp.r = 100;
    CHECK(io_time_regular(mp) == doctest::Approx(10.0).epsilon(kTol));
    for (double p : {1.0, 8.0, 1024.0}) {
        mp.p = p;
        CHECK(io_time_regular(mp) == doctest::Approx(10.0).epsilon(kTol));
    }

    mp = base();
    CHECK(io_time_regular(mp) == doctest::Approx(1600.0).epsilon(kTol));
}

TEST_CASE("preprocessing time is d / (p u)") {
    ModelParams mp = base();
    mp.d = 1000, mp.p = 10, mp.u = 100;
    CHECK(preprocessing_time(mp) == doctest::Approx(1.0).epsilon(kTol));
    mp.p = 1e12; // large-p limit
    CHECK(preprocessing_time(mp) < 1e-8);

    mp = base();
    mp.d = 1.28e6, mp.p = 64, mp.u = 500;
    CHECK(preprocessing_time(mp) == doctest::Approx(40.0).epsilon(kTol));
}

TEST_CASE("data loading is I/O plus preprocessing") {
    const ModelParams mp = base();
    CHECK(data_loading_time(mp) ==
          doctest::Approx(io_time_regular(mp) + preprocessing_time(mp)).epsilon(kTol));
}

TEST_CASE("crossover and the piecewise epoch cost") {
    ModelParams mp = base();
    mp.r = 800, mp.v = 100;
    CHECK(crossover_p(mp) == doctest::Approx(8.0).epsilon(kTol));

    mp.d = 1e6;
    mp.p = 4;
    CHECK(true_cost(mp) == doctest::Approx(2500.0).epsilon(kTol));
    mp.p = 8;
    CHECK(true_cost(mp) == doctest::Approx(1250.0).epsilon(kTol));
    mp.p = 16;
    CHECK(true_cost(mp) == doctest::Approx(1250.0).epsilon(kTol));

    SUBCASE("continuous at the crossover") {
        mp.p = crossover_p(mp);
        const double at = true_cost(mp);
        CHECK(std::abs(at - training_time(mp)) <= kTol * at);
        CHECK(std::abs(at - io_time_regular(mp)) <= kTol * at);
    }

    SUBCASE("non-increasing in p, constant past the crossover") {
        double prev = 1.0 / 0.0;
        for (double p = 1; p <= 64; ++p) {
            mp.p = p;
            const double cost = true_cost(mp);
            CHECK(cost <= prev + kTol);
            prev = cost;
            if (p > crossover_p(mp)) {
                CHECK(cost == doctest::Approx(io_time_regular(mp)).epsilon(kTol));
            }
        }
    }
}

TEST_CASE("distributed-cache I/O time") {
    ModelParams mp = base();

    SUBCASE("alpha 0 degenerates to storage-only") {
        mp.alpha = 0.0;
        CHECK(io_time_distcache(mp) == doctest::Approx(io_time_regular(mp)).epsilon(kTol));
    }
    SUBCASE("alpha 1 at large p tends to d / r_c") {
        mp.alpha = 1.0;
        mp.p = 1e9;
        CHECK(io_time_distcache(mp) == doctest::Approx(mp.d / mp.r_c).epsilon(1e-6));
    }
    SUBCASE("substitution check") {
        mp.alpha = 1.0, mp.p = 4, mp.d = 1200, mp.r_c = 600;
        CHECK(io_time_distcache(mp) == doctest::Approx(1.5).epsilon(kTol));
    }
}

TEST_CASE("locality-aware I/O time") {
    ModelParams mp = base();

    SUBCASE("balanced caches cost nothing") {
        mp.alpha = 1.0, mp.beta = 0.0;
        CHECK(io_time_locality(mp) == 0.0);
    }
    SUBCASE("alpha 0 degenerates to storage-only") {
        mp.alpha = 0.0;
        CHECK(io_time_locality(mp) == doctest::Approx(io_time_regular(mp)).epsilon(kTol));
    }
    SUBCASE("substitution check") {
        mp.alpha = 1.0, mp.beta = 0.048, mp.d = 1200, mp.r_b = 600;
        CHECK(io_time_locality(mp) == doctest::Approx(0.096).epsilon(kTol));
    }
    SUBCASE("beats distributed caching whenever beta <= (p-1)/p with equal rates") {
        for (double p = 2; p <= 128; p *= 2) {
            mp = base();
            mp.p = p;
            mp.r_b = mp.r_c;
            mp.beta = (p - 1) / p - 0.01;
            CHECK(io_time_locality(mp) <= io_time_distcache(mp) + kTol);
        }
    }
}

TEST_CASE("all outputs scale linearly in d") {
    ModelParams mp = base();
    ModelParams doubled = mp;
    doubled.d *= 2;
    CHECK(training_time(doubled) == doctest::Approx(2 * training_time(mp)).epsilon(kTol));
    CHECK(io_time_regular(doubled) == doctest::Approx(2 * io_time_regular(mp)).epsilon(kTol));
    CHECK(preprocessing_time(doubled) ==
          doctest::Approx(2 * preprocessing_time(mp)).epsilon(kTol));
    CHECK(io_time_distcache(doubled) ==
          doctest::Approx(2 * io_time_distcache(mp)).epsilon(kTol));
    CHECK(io_time_locality(doubled) == doctest::Approx(2 * io_time_locality(mp)).epsilon(kTol));
    CHECK(true_cost(doubled) == doctest::Approx(2 * true_cost(mp)).epsilon(kTol));
}

TEST_CASE("breakdown ties the fields together") {
    const ModelParams mp = base();
    const CostBreakdown b = breakdown(mp, io_time_regular(mp));
    CHECK(b.data_loading_s == doctest::Approx(b.sample_io_s + b.preprocessing_s).epsilon(kTol));
    CHECK(b.true_cost_s == doctest::Approx(std::max(b.training_s, b.data_loading_s)).epsilon(kTol));
    CHECK(true_cost_extended(mp, io_time_regular(mp)) == doctest::Approx(b.true_cost_s).epsilon(kTol));
}

TEST_CASE("invalid parameters are rejected") {
    ModelParams mp = base();
    mp.v = 0;
    CHECK_THROWS_AS(validate(mp), std::invalid_argument);
    mp = base();
    mp.beta = 1.0;
    CHECK_THROWS_AS(validate(mp), std::invalid_argument);
    mp = base();
    mp.alpha = -0.1;
    CHECK_THROWS_AS(validate(mp), std::invalid_argument);
    mp = base();
    mp.d = 0;
    CHECK_THROWS_AS(validate(mp), std::invalid_argument);
}
