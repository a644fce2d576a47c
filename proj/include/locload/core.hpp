#pragma once

#include <cstdint>
#include <vector>

namespace locload {

using SampleId = std::uint64_t;  // index into the dataset, < d
using LearnerId = std::uint32_t; // learner rank, < p

// One epoch's globally-agreed sample order. All learners regenerate the
// identical order from (seed, epoch) alone.
struct EpochPermutation {
    std::uint64_t seed = 0;
    std::uint64_t epoch = 0;
    std::vector<SampleId> order;
};

// One step's globally-agreed mini-batch: pairwise-distinct sample indices.
struct GlobalBatch {
    std::uint64_t step = 0;
    std::vector<SampleId> samples;
};

// Uniform random permutation of [0, d) via Fisher-Yates over a splitmix64
// stream keyed on (seed, epoch). Same inputs give the identical order on
// every platform. Throws std::invalid_argument for d == 0.
EpochPermutation permute_epoch(std::uint64_t seed, std::uint64_t epoch, std::uint64_t d);

// First k entries of permute_epoch(seed, epoch, d).order without
// materializing all d entries. O(k) time and space.
std::vector<SampleId> permutation_prefix(std::uint64_t seed, std::uint64_t epoch,
                                         std::uint64_t d, std::uint64_t k);

// Consecutive disjoint windows of size b over perm.order; the trailing
// d mod b samples are dropped. Throws std::invalid_argument when b == 0 or
// b > d.
std::vector<GlobalBatch> batches(const EpochPermutation& perm, std::uint64_t b);

} // namespace locload
