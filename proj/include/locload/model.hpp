#pragma once

#include <algorithm>
#include <stdexcept>

namespace locload {

// Constants of the per-epoch cost model. Rates are in samples per second.
struct ModelParams {
    double d = 0;     // dataset size in samples
    double p = 1;     // participating compute nodes
    double v = 1;     // max training rate per node
    double r = 1;     // storage-system I/O rate
    double r_c = 1;   // remote-cache I/O rate (expected >> r)
    double r_b = 1;   // load-balancing I/O rate
    double u = 1;     // max preprocessing rate per node
    double alpha = 1; // fraction of the dataset in the aggregated cache
    double beta = 0;  // fraction of the batch moved for load balancing
};

inline void validate(const ModelParams& mp) {
    if (!(mp.d >= 1) || !(mp.p >= 1)) {
        throw std::invalid_argument("model: d and p must be >= 1");
    }
    if (!(mp.v > 0) || !(mp.r > 0) || !(mp.r_c > 0) || !(mp.r_b > 0) || !(mp.u > 0)) {
        throw std::invalid_argument("model: all rates must be positive");
    }
    if (mp.alpha < 0 || mp.alpha > 1 || mp.beta < 0 || mp.beta >= 1) {
        throw std::invalid_argument("model: alpha in [0,1] and beta in [0,1) required");
    }
}

// Per-epoch seconds spent training, all nodes combined: d / (p v).
inline double training_time(const ModelParams& mp) { return mp.d / (mp.p * mp.v); }

// Per-epoch seconds reading samples from storage: d / r, independent of p.
inline double io_time_regular(const ModelParams& mp) { return mp.d / mp.r; }

// Per-epoch seconds preprocessing: d / (p u).
inline double preprocessing_time(const ModelParams& mp) { return mp.d / (mp.p * mp.u); }

// I/O plus preprocessing.
inline double data_loading_time(const ModelParams& mp) {
    return io_time_regular(mp) + preprocessing_time(mp);
}

// Node count where training stops dominating the epoch cost: r / v.
inline double crossover_p(const ModelParams& mp) { return mp.r / mp.v; }

// Piecewise epoch cost under the simplification that preprocessing is much
// faster than training: training-bound up to p = r/v, I/O-bound beyond.
inline double true_cost(const ModelParams& mp) {
    return mp.p <= crossover_p(mp) ? training_time(mp) : io_time_regular(mp);
}

// Epoch cost without the preprocessing simplification, for an arbitrary
// I/O term: loading overlaps training, so the wall time is the larger of
// the two.
inline double true_cost_extended(const ModelParams& mp, double io_s) {
    return std::max(training_time(mp), io_s + preprocessing_time(mp));
}

// Distributed caching: uncached samples come from storage, cached ones from
// remote caches except the local 1/p share.
inline double io_time_distcache(const ModelParams& mp) {
    return (1.0 - mp.alpha) * mp.d / mp.r +
           (mp.alpha * mp.d / mp.r_c) * ((mp.p - 1.0) / mp.p);
}

// Cache-resident assembly: uncached samples come from storage; of the
// cached ones only the balancing traffic moves at all.
inline double io_time_locality(const ModelParams& mp) {
    return (1.0 - mp.alpha) * mp.d / mp.r + (mp.alpha * mp.d / mp.r_b) * mp.beta;
}

struct CostBreakdown {
    double training_s = 0;
    double sample_io_s = 0;
    double preprocessing_s = 0;
    double data_loading_s = 0; // sample_io_s + preprocessing_s
    double true_cost_s = 0;    // max(training_s, data_loading_s)
};

inline CostBreakdown breakdown(const ModelParams& mp, double io_s) {
    CostBreakdown b;
    b.training_s = training_time(mp);
    b.sample_io_s = io_s;
    b.preprocessing_s = preprocessing_time(mp);
    b.data_loading_s = b.sample_io_s + b.preprocessing_s;
    b.true_cost_s = std::max(b.training_s, b.data_loading_s);
    return b;
}

} // namespace locload
