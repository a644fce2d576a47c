#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "locload/core.hpp"

namespace locload {

// Replicated map from sample index to the learner caching it. The cached
// subset is the alpha-fraction of lowest indices, split into balanced
// contiguous blocks, so ownership is a closed-form function and every
// learner holds an identical directory with no book-keeping.
class CacheDirectory {
public:
    // Throws std::invalid_argument unless p >= 1 and 0 < alpha <= 1.
    CacheDirectory(std::uint64_t d, std::uint32_t p, double alpha);

    // Owning learner for a cached sample; nullopt when the sample is not in
    // the aggregated cache (index >= cached_count).
    std::optional<LearnerId> owner(SampleId s) const {
        if (s >= cached_) return std::nullopt;
        return static_cast<LearnerId>(s * p_ / cached_);
    }

    std::uint64_t owned_count(LearnerId j) const;

    std::uint64_t dataset_size() const { return d_; }
    std::uint32_t learners() const { return p_; }
    double cached_fraction() const { return alpha_; }
    std::uint64_t cached_count() const { return cached_; }

private:
    std::uint64_t d_;
    std::uint32_t p_;
    double alpha_;
    std::uint64_t cached_; // floor(alpha * d)
};

// One learner's share of a step's global batch, in batch order.
struct LocalAssignment {
    LearnerId learner = 0;
    std::uint64_t step = 0;
    std::vector<SampleId> samples;
};

// Cache-resident split of a global batch: every cached sample goes to its
// owner, the rest are listed separately. Assignments plus uncached always
// partition the batch exactly.
struct LocDistribution {
    std::uint64_t step = 0;
    std::vector<LocalAssignment> assignments; // one per learner
    std::vector<SampleId> uncached;           // batch order
    std::vector<std::uint64_t> counts;        // cached samples per learner
};

// Regular scheme: learner j takes batch positions [B/p*j, B/p*(j+1)).
// Throws std::invalid_argument when p does not divide the batch size.
LocalAssignment reg_slice(const GlobalBatch& batch, std::uint32_t p, LearnerId j);

LocDistribution loc_distribution(const GlobalBatch& batch, const CacheDirectory& dir);

// Per-learner batch shares where uncached samples are dealt round-robin by
// their position among the uncached list. These are the sizes the balancer
// sees when alpha < 1.
std::vector<std::uint64_t> counts_with_uncached(const LocDistribution& dist, std::uint32_t p);

} // namespace locload
