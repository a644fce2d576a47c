#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "locload/core.hpp"

namespace locload {

// Convex least-squares objective over deterministic synthetic data:
// per-sample loss g_i(w) = 0.5 * (dot(w, x_i) - y_i)^2, so the full
// objective's gradient is the mean of the per-sample gradients.
class ToyObjective {
public:
    static ToyObjective synthesize(std::uint64_t n, std::size_t dims, std::uint64_t seed);

    std::uint64_t samples() const { return n_; }
    std::size_t dims() const { return m_; }

    double sample_loss(const std::vector<double>& w, SampleId i) const;

    // Writes (dot(w, x_i) - y_i) * x_i into out (length dims()).
    void sample_gradient(const std::vector<double>& w, SampleId i,
                         std::vector<double>& out) const;

private:
    std::uint64_t n_ = 0;
    std::size_t m_ = 0;
    std::vector<double> xs_; // n * m, row-major
    std::vector<double> ys_; // n
};

enum class SchemeKind {
    regular,           // block slices of the batch sequence
    locality,          // cache-resident assembly, imbalanced local batches
    locality_balanced, // cache-resident assembly plus greedy rebalancing
};

enum class Aggregation {
    // Per-sample gradients sorted by sample index before summation, so the
    // floating-point addition order is identical no matter which learner
    // computed which gradient. Makes scheme equality exact, bit for bit.
    canonical,
    // Per-learner partial sums reduced in learner order, like a real
    // all-reduce. Schemes then agree only up to rounding.
    learner_order,
};

struct TrainingRun {
    std::vector<double> final_weights;
    std::vector<std::vector<double>> step_gradients; // per step, normalized by B
};

// Simulates p learners through `steps` steps of synchronous SGD on the toy
// objective, using the given distribution scheme for every global batch.
// Throws std::invalid_argument when the regular scheme is asked for a batch
// size p does not divide.
TrainingRun run_training(const ToyObjective& obj, SchemeKind scheme, std::uint32_t p,
                         std::uint64_t batch_size, std::uint64_t steps, std::uint64_t seed,
                         double learning_rate, Aggregation agg = Aggregation::canonical);

// Runs the cache-resident scheme twice — once with imbalanced local batches,
// once rebalanced by the greedy scheduler — and returns both runs. Balancing
// only moves which learner computes a sample's gradient, so under canonical
// aggregation the two trajectories are identical.
std::pair<TrainingRun, TrainingRun>
run_training_imbalanced_vs_balanced(const ToyObjective& obj, std::uint32_t p,
                                    std::uint64_t batch_size, std::uint64_t steps,
                                    std::uint64_t seed, double learning_rate);

// Single-pass gradient of a whole batch, summed in batch-sequence order.
// Independent route for checking the distributed aggregates.
std::vector<double> full_batch_gradient(const ToyObjective& obj, const std::vector<double>& w,
                                        const GlobalBatch& batch);

} // namespace locload
