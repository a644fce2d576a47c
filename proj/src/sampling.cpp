#include "locload/sampling.hpp"

#include <stdexcept>

namespace locload {

CacheDirectory::CacheDirectory(std::uint64_t d, std::uint32_t p, double alpha)
    : d_(d), p_(p), alpha_(alpha) {
    if (p == 0) {
        throw std::invalid_argument("CacheDirectory: learner count must be >= 1");
    }
    if (!(alpha > 0.0) || alpha > 1.0) {
        throw std::invalid_argument("CacheDirectory: cached fraction must be in (0, 1]");
    }
    cached_ = static_cast<std::uint64_t>(alpha * static_cast<double>(d));
    if (cached_ > d) cached_ = d;
}

std::uint64_t CacheDirectory::owned_count(LearnerId j) const {
    if (j >= p_) return 0;
    auto upper = [&](std::uint64_t k) { // first index owned by learner k
        return (k * cached_ + p_ - 1) / p_;
    };
    return upper(j + 1) - upper(j);
}

LocalAssignment reg_slice(const GlobalBatch& batch, std::uint32_t p, LearnerId j) {
    const std::uint64_t b = batch.samples.size();
    if (p == 0 || j >= p) {
        throw std::invalid_argument("reg_slice: learner rank out of range");
    }
    if (b % p != 0) {
        throw std::invalid_argument("reg_slice: learner count must divide the batch size");
    }
    const std::uint64_t slice = b / p;
    LocalAssignment out;
    out.learner = j;
    out.step = batch.step;
    out.samples.assign(batch.samples.begin() + static_cast<std::ptrdiff_t>(slice * j),
                       batch.samples.begin() + static_cast<std::ptrdiff_t>(slice * (j + 1)));
    return out;
}

LocDistribution loc_distribution(const GlobalBatch& batch, const CacheDirectory& dir) {
    const std::uint32_t p = dir.learners();
    LocDistribution dist;
    dist.step = batch.step;
    dist.assignments.resize(p);
    dist.counts.assign(p, 0);
    for (std::uint32_t j = 0; j < p; ++j) {
        dist.assignments[j].learner = j;
        dist.assignments[j].step = batch.step;
    }
    for (SampleId s : batch.samples) {
        if (auto j = dir.owner(s)) {
            dist.assignments[*j].samples.push_back(s);
            ++dist.counts[*j];
        } else {
            dist.uncached.push_back(s);
        }
    }
    return dist;
}

std::vector<std::uint64_t> counts_with_uncached(const LocDistribution& dist, std::uint32_t p) {
    std::vector<std::uint64_t> counts = dist.counts;
    counts.resize(p, 0);
    for (std::size_t k = 0; k < dist.uncached.size(); ++k) {
        ++counts[k % p];
    }
    return counts;
}

} // namespace locload
