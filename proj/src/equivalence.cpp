#include "locload/equivalence.hpp"

#include <algorithm>
#include <stdexcept>

#include "locload/balance.hpp"
#include "locload/rng.hpp"
#include "locload/sampling.hpp"

namespace locload {

ToyObjective ToyObjective::synthesize(std::uint64_t n, std::size_t dims, std::uint64_t seed) {
    if (n == 0 || dims == 0) {
        throw std::invalid_argument("ToyObjective: need n >= 1 and dims >= 1");
    }
    ToyObjective obj;
    obj.n_ = n;
    obj.m_ = dims;
    obj.xs_.resize(n * dims);
    obj.ys_.resize(n);

    std::vector<double> truth(dims);
    SplitMix64 truth_rng(derive_seed(seed, 0xfeedULL));
    for (double& w : truth) {
        w = truth_rng.next_gaussian();
    }
    for (std::uint64_t i = 0; i < n; ++i) {
        SplitMix64 rng(derive_seed(seed, i, 0x5a11ULL));
        double dot = 0;
        for (std::size_t k = 0; k < dims; ++k) {
            const double x = rng.next_gaussian();
            obj.xs_[i * dims + k] = x;
            dot += truth[k] * x;
        }
        obj.ys_[i] = dot + 0.1 * rng.next_gaussian();
    }
    return obj;
}

double ToyObjective::sample_loss(const std::vector<double>& w, SampleId i) const {
    const double* x = &xs_[i * m_];
    double dot = 0;
    for (std::size_t k = 0; k < m_; ++k) {
        dot += w[k] * x[k];
    }
    const double residual = dot - ys_[i];
    return 0.5 * residual * residual;
}

void ToyObjective::sample_gradient(const std::vector<double>& w, SampleId i,
                                   std::vector<double>& out) const {
    const double* x = &xs_[i * m_];
    double dot = 0;
    for (std::size_t k = 0; k < m_; ++k) {
        dot += w[k] * x[k];
    }
    const double residual = dot - ys_[i];
    out.resize(m_);
    for (std::size_t k = 0; k < m_; ++k) {
        out[k] = residual * x[k];
    }
}

namespace {

std::vector<LocalAssignment> assign(const GlobalBatch& batch, SchemeKind scheme, std::uint32_t p,
                                    const CacheDirectory& dir) {
    if (scheme == SchemeKind::regular) {
        std::vector<LocalAssignment> out;
        out.reserve(p);
        for (std::uint32_t j = 0; j < p; ++j) {
            out.push_back(reg_slice(batch, p, j));
        }
        return out;
    }

    LocDistribution dist = loc_distribution(batch, dir);
    if (scheme == SchemeKind::locality_balanced) {
        ImbalanceVector iv;
        iv.counts.assign(dist.counts.begin(), dist.counts.end());
        iv.targets = targets(static_cast<std::int64_t>(batch.samples.size()), p);
        const TransferSchedule schedule = balance(iv);
        for (const Move& move : schedule.moves) {
            auto& from = dist.assignments[move.sender].samples;
            auto& to = dist.assignments[move.receiver].samples;
            to.insert(to.end(), from.end() - move.count, from.end());
            from.erase(from.end() - move.count, from.end());
        }
    }
    return std::move(dist.assignments);
}

} // namespace

TrainingRun run_training(const ToyObjective& obj, SchemeKind scheme, std::uint32_t p,
                         std::uint64_t batch_size, std::uint64_t steps, std::uint64_t seed,
                         double learning_rate, Aggregation agg) {
    if (p == 0) {
        throw std::invalid_argument("run_training: need at least one learner");
    }
    const std::uint64_t n = obj.samples();
    if (batch_size == 0 || batch_size > n) {
        throw std::invalid_argument("run_training: batch size must be in [1, n]");
    }
    const std::uint64_t steps_per_epoch = n / batch_size;

    const CacheDirectory dir(n, p, 1.0);

    TrainingRun run;
    run.final_weights.assign(obj.dims(), 0.0);
    run.step_gradients.reserve(steps);

    std::vector<GlobalBatch> epoch_batches;
    std::uint64_t loaded_epoch = ~std::uint64_t{0};

    std::vector<std::pair<SampleId, std::vector<double>>> per_sample;
    std::vector<double> grad(obj.dims());
    std::vector<double> learner_sum(obj.dims());
    std::vector<double> sample_grad(obj.dims());

    for (std::uint64_t t = 0; t < steps; ++t) {
        const std::uint64_t epoch = t / steps_per_epoch;
        if (epoch != loaded_epoch) {
            epoch_batches = batches(permute_epoch(seed, epoch, n), batch_size);
            loaded_epoch = epoch;
        }
        const GlobalBatch& batch = epoch_batches[t % steps_per_epoch];

        const std::vector<LocalAssignment> assignments = assign(batch, scheme, p, dir);

        std::fill(grad.begin(), grad.end(), 0.0);
        if (agg == Aggregation::canonical) {
            // Every learner computes its own samples' gradients; the
            // aggregate sums them in global sample-index order.
            per_sample.clear();
            for (const LocalAssignment& a : assignments) {
                for (SampleId s : a.samples) {
                    obj.sample_gradient(run.final_weights, s, sample_grad);
                    per_sample.emplace_back(s, sample_grad);
                }
            }
            std::sort(per_sample.begin(), per_sample.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            for (const auto& [s, g] : per_sample) {
                for (std::size_t k = 0; k < grad.size(); ++k) {
                    grad[k] += g[k];
                }
            }
        } else {
            for (const LocalAssignment& a : assignments) {
                std::fill(learner_sum.begin(), learner_sum.end(), 0.0);
                for (SampleId s : a.samples) {
                    obj.sample_gradient(run.final_weights, s, sample_grad);
                    for (std::size_t k = 0; k < learner_sum.size(); ++k) {
                        learner_sum[k] += sample_grad[k];
                    }
                }
                for (std::size_t k = 0; k < grad.size(); ++k) {
                    grad[k] += learner_sum[k];
                }
            }
        }

        const double scale = 1.0 / static_cast<double>(batch.samples.size());
        for (double& g : grad) {
            g *= scale;
        }
        run.step_gradients.push_back(grad);
        for (std::size_t k = 0; k < grad.size(); ++k) {
            run.final_weights[k] -= learning_rate * grad[k];
        }
    }
    return run;
}

std::pair<TrainingRun, TrainingRun>
run_training_imbalanced_vs_balanced(const ToyObjective& obj, std::uint32_t p,
                                    std::uint64_t batch_size, std::uint64_t steps,
                                    std::uint64_t seed, double learning_rate) {
    return {run_training(obj, SchemeKind::locality, p, batch_size, steps, seed, learning_rate),
            run_training(obj, SchemeKind::locality_balanced, p, batch_size, steps, seed,
                         learning_rate)};
}

std::vector<double> full_batch_gradient(const ToyObjective& obj, const std::vector<double>& w,
                                        const GlobalBatch& batch) {
    std::vector<double> grad(obj.dims(), 0.0);
    std::vector<double> sample_grad(obj.dims());
    for (SampleId s : batch.samples) {
        obj.sample_gradient(w, s, sample_grad);
        for (std::size_t k = 0; k < grad.size(); ++k) {
            grad[k] += sample_grad[k];
        }
    }
    const double scale = 1.0 / static_cast<double>(batch.samples.size());
    for (double& g : grad) {
        g *= scale;
    }
    return grad;
}

} // namespace locload
