#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "locload/model.hpp"

namespace locload {

// Five-number summary with Tukey whiskers (1.5 * IQR convention).
struct BoxSummary {
    double median = 0;
    double q1 = 0;
    double q3 = 0;
    double whisker_lo = 0;
    double whisker_hi = 0;
};

// Linear-interpolation quantile of a sample set, q in [0, 1].
double quantile(std::vector<double> values, double q);
BoxSummary summarize(const std::vector<double>& values);

// Per-step balancing-traffic fractions for one (d, p, local batch) cell.
struct ImbalanceStats {
    std::uint64_t d = 0;
    std::uint32_t p = 0;
    std::uint64_t local_batch = 0;
    std::uint64_t steps = 0;
    std::uint64_t seed = 0;
    double alpha = 1.0;
    std::vector<double> betas; // one per step, each in [0, 1)
    BoxSummary summary;
};

// Monte Carlo of the per-step load imbalance: each step draws a fresh
// global batch of size p * local_batch uniformly without replacement from
// [0, d), splits it against a block cache directory, and records the
// fraction of the batch the balancer would move. Throws
// std::invalid_argument when p * local_batch > d or steps == 0.
ImbalanceStats simulate_imbalance(std::uint64_t d, std::uint32_t p, std::uint64_t local_batch,
                                  std::uint64_t steps, std::uint64_t seed, double alpha = 1.0);

struct BallsBinsCheck {
    std::uint64_t b = 0;
    std::uint32_t p = 0;
    double alpha_param = 0;
    double k_alpha = 0; // b/p + alpha * sqrt(2 (b/p) ln p)
    std::uint64_t trials = 0;
    std::uint64_t exceed_count = 0;
    double exceed_rate = 0;
};

double k_alpha_bound(std::uint64_t b, std::uint32_t p, double alpha_param);

// Throws b balls into p bins uniformly `trials` times and reports how often
// the maximum bin load exceeds the k_alpha tail bound.
BallsBinsCheck balls_in_bins_check(std::uint64_t b, std::uint32_t p, double alpha_param,
                                   std::uint64_t trials, std::uint64_t seed);

enum class Scheme { regular, distcache, locality };

const char* scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

struct EpochCostRow {
    std::uint32_t p = 0;
    std::uint64_t epoch = 0;
    Scheme scheme = Scheme::regular;
    double beta = 0; // sampled for locality, 0 otherwise
    double training_s = 0;
    double io_s = 0;
    double preprocess_s = 0;
    double loading_s = 0;
    double waiting_s = 0; // max(0, loading - training): loading overlaps training
    double total_s = 0;   // training + waiting
};

// Closed-form model evaluation per node count and epoch. For the locality
// scheme the balancing fraction is not assumed: each epoch draws it as the
// median of a short simulate_imbalance run with a per-(p, epoch) seed.
std::vector<EpochCostRow> simulate_epoch_costs(const ModelParams& base,
                                               const std::vector<std::uint32_t>& p_list,
                                               Scheme scheme, std::uint64_t epochs,
                                               std::uint64_t local_batch, std::uint64_t seed);

} // namespace locload
