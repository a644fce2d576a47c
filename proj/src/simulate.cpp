#include "locload/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "locload/balance.hpp"
#include "locload/rng.hpp"
#include "locload/sampling.hpp"

namespace locload {

double quantile(std::vector<double> values, double q) {
    if (values.empty()) {
        throw std::invalid_argument("quantile: empty sample set");
    }
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

BoxSummary summarize(const std::vector<double>& values) {
    BoxSummary s;
    s.median = quantile(values, 0.5);
    s.q1 = quantile(values, 0.25);
    s.q3 = quantile(values, 0.75);
    const double iqr = s.q3 - s.q1;
    const double lo_fence = s.q1 - 1.5 * iqr;
    const double hi_fence = s.q3 + 1.5 * iqr;
    s.whisker_lo = s.q3;
    s.whisker_hi = s.q1;
    for (double v : values) {
        if (v >= lo_fence && v < s.whisker_lo) s.whisker_lo = v;
        if (v <= hi_fence && v > s.whisker_hi) s.whisker_hi = v;
    }
    return s;
}

ImbalanceStats simulate_imbalance(std::uint64_t d, std::uint32_t p, std::uint64_t local_batch,
                                  std::uint64_t steps, std::uint64_t seed, double alpha) {
    const std::uint64_t b = static_cast<std::uint64_t>(p) * local_batch;
    if (p == 0 || local_batch == 0 || b > d) {
        throw std::invalid_argument("simulate_imbalance: need p * local_batch <= d");
    }
    if (steps == 0) {
        throw std::invalid_argument("simulate_imbalance: need at least one step");
    }

    const CacheDirectory dir(d, p, alpha);
    const std::vector<std::int64_t> target = targets(static_cast<std::int64_t>(b), p);

    ImbalanceStats stats;
    stats.d = d;
    stats.p = p;
    stats.local_batch = local_batch;
    stats.steps = steps;
    stats.seed = seed;
    stats.alpha = alpha;
    stats.betas.reserve(steps);

    for (std::uint64_t step = 0; step < steps; ++step) {
        GlobalBatch batch;
        batch.step = step;
        batch.samples = permutation_prefix(seed, step, d, b);

        const LocDistribution dist = loc_distribution(batch, dir);
        const std::vector<std::uint64_t> counts = counts_with_uncached(dist, p);

        ImbalanceVector iv;
        iv.targets = target;
        iv.counts.assign(counts.begin(), counts.end());
        stats.betas.push_back(deficit_fraction(iv));
    }
    stats.summary = summarize(stats.betas);
    return stats;
}

double k_alpha_bound(std::uint64_t b, std::uint32_t p, double alpha_param) {
    const double mean = static_cast<double>(b) / static_cast<double>(p);
    return mean + alpha_param * std::sqrt(2.0 * mean * std::log(static_cast<double>(p)));
}

BallsBinsCheck balls_in_bins_check(std::uint64_t b, std::uint32_t p, double alpha_param,
                                   std::uint64_t trials, std::uint64_t seed) {
    if (trials == 0 || p < 2 || !(alpha_param > 1.0)) {
        throw std::invalid_argument("balls_in_bins_check: need trials >= 1, p >= 2, alpha > 1");
    }
    BallsBinsCheck check;
    check.b = b;
    check.p = p;
    check.alpha_param = alpha_param;
    check.k_alpha = k_alpha_bound(b, p, alpha_param);
    check.trials = trials;

    std::vector<std::uint64_t> bins(p);
    for (std::uint64_t t = 0; t < trials; ++t) {
        std::fill(bins.begin(), bins.end(), 0);
        SplitMix64 rng(derive_seed(seed, t));
        for (std::uint64_t i = 0; i < b; ++i) {
            ++bins[rng.bounded(p)];
        }
        const std::uint64_t max_load = *std::max_element(bins.begin(), bins.end());
        if (static_cast<double>(max_load) > check.k_alpha) {
            ++check.exceed_count;
        }
    }
    check.exceed_rate = static_cast<double>(check.exceed_count) / static_cast<double>(trials);
    return check;
}

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::regular: return "regular";
        case Scheme::distcache: return "distcache";
        case Scheme::locality: return "locality";
    }
    return "unknown";
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "regular") return Scheme::regular;
    if (name == "distcache") return Scheme::distcache;
    if (name == "locality") return Scheme::locality;
    throw std::invalid_argument("unknown scheme: " + name);
}

std::vector<EpochCostRow> simulate_epoch_costs(const ModelParams& base,
                                               const std::vector<std::uint32_t>& p_list,
                                               Scheme scheme, std::uint64_t epochs,
                                               std::uint64_t local_batch, std::uint64_t seed) {
    if (p_list.empty()) {
        throw std::invalid_argument("simulate_epoch_costs: p_list must be non-empty");
    }
    if (epochs == 0) {
        throw std::invalid_argument("simulate_epoch_costs: need at least one epoch");
    }

    std::vector<EpochCostRow> rows;
    rows.reserve(p_list.size() * epochs);
    for (std::uint32_t p : p_list) {
        ModelParams mp = base;
        mp.p = static_cast<double>(p);
        validate(mp);

        const std::uint64_t d = static_cast<std::uint64_t>(mp.d);
        const std::uint64_t b = static_cast<std::uint64_t>(p) * local_batch;
        const std::uint64_t steps_per_epoch = b == 0 ? 0 : d / b;

        for (std::uint64_t e = 0; e < epochs; ++e) {
            EpochCostRow row;
            row.p = p;
            row.epoch = e;
            row.scheme = scheme;
            switch (scheme) {
                case Scheme::regular:
                    row.io_s = io_time_regular(mp);
                    break;
                case Scheme::distcache:
                    row.io_s = io_time_distcache(mp);
                    break;
                case Scheme::locality: {
                    // Sample the balancing traffic instead of assuming it.
                    const std::uint64_t sim_steps =
                        std::max<std::uint64_t>(1, std::min<std::uint64_t>(200, steps_per_epoch));
                    const ImbalanceStats stats = simulate_imbalance(
                        d, p, local_batch, sim_steps, derive_seed(seed, p, e), mp.alpha);
                    mp.beta = stats.summary.median;
                    row.beta = mp.beta;
                    row.io_s = io_time_locality(mp);
                    break;
                }
            }
            row.training_s = training_time(mp);
            row.preprocess_s = preprocessing_time(mp);
            row.loading_s = row.io_s + row.preprocess_s;
            row.waiting_s = std::max(0.0, row.loading_s - row.training_s);
            row.total_s = row.training_s + row.waiting_s;
            rows.push_back(row);
        }
    }
    return rows;
}

} // namespace locload
