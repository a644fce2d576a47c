#include "locload/core.hpp"

#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "locload/rng.hpp"

namespace locload {

EpochPermutation permute_epoch(std::uint64_t seed, std::uint64_t epoch, std::uint64_t d) {
    if (d == 0) {
        throw std::invalid_argument("permute_epoch: dataset must contain at least one sample");
    }
    EpochPermutation perm;
    perm.seed = seed;
    perm.epoch = epoch;
    perm.order.resize(d);
    std::iota(perm.order.begin(), perm.order.end(), SampleId{0});

    SplitMix64 rng(derive_seed(seed, epoch));
    for (std::uint64_t i = 0; i < d; ++i) {
        std::uint64_t j = i + rng.bounded(d - i);
        std::swap(perm.order[i], perm.order[j]);
    }
    return perm;
}

std::vector<SampleId> permutation_prefix(std::uint64_t seed, std::uint64_t epoch,
                                         std::uint64_t d, std::uint64_t k) {
    if (d == 0) {
        throw std::invalid_argument("permutation_prefix: dataset must contain at least one sample");
    }
    if (k > d) {
        throw std::invalid_argument("permutation_prefix: prefix length exceeds dataset size");
    }
    // Sparse Fisher-Yates: positions < i are final after iteration i, so
    // running the same draw sequence for the first k iterations reproduces
    // the dense permutation's prefix exactly. Displaced values live in a map.
    std::unordered_map<std::uint64_t, SampleId> displaced;
    displaced.reserve(static_cast<std::size_t>(2 * k));
    auto value_at = [&](std::uint64_t pos) {
        auto it = displaced.find(pos);
        return it == displaced.end() ? SampleId{pos} : it->second;
    };

    std::vector<SampleId> prefix(k);
    SplitMix64 rng(derive_seed(seed, epoch));
    for (std::uint64_t i = 0; i < k; ++i) {
        std::uint64_t j = i + rng.bounded(d - i);
        prefix[i] = value_at(j);
        displaced[j] = value_at(i);
    }
    return prefix;
}

std::vector<GlobalBatch> batches(const EpochPermutation& perm, std::uint64_t b) {
    const std::uint64_t d = perm.order.size();
    if (b == 0 || b > d) {
        throw std::invalid_argument("batches: batch size must be in [1, dataset size]");
    }
    const std::uint64_t steps = d / b;
    std::vector<GlobalBatch> out;
    out.reserve(steps);
    for (std::uint64_t t = 0; t < steps; ++t) {
        GlobalBatch batch;
        batch.step = t;
        batch.samples.assign(perm.order.begin() + static_cast<std::ptrdiff_t>(t * b),
                             perm.order.begin() + static_cast<std::ptrdiff_t>((t + 1) * b));
        out.push_back(std::move(batch));
    }
    return out;
}

} // namespace locload
