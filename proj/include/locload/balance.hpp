#pragma once

#include <cstdint>
#include <vector>

#include "locload/core.hpp"

namespace locload {

// Per-learner assigned counts versus target sizes for one step. Targets
// differ pairwise by at most 1 and sum to the same total as counts.
struct ImbalanceVector {
    std::vector<std::int64_t> counts;
    std::vector<std::int64_t> targets;

    std::int64_t total() const;
    std::size_t learners() const { return counts.size(); }
};

// Fair per-learner targets for a batch of size b: the first b mod p learners
// get the ceiling share, the rest the floor share.
std::vector<std::int64_t> targets(std::int64_t b, std::uint32_t p);

struct Move {
    LearnerId sender = 0;
    LearnerId receiver = 0;
    std::int64_t count = 0;
};

// Applying all moves to counts yields targets exactly; never more than
// p - 1 moves and every move carries at least one sample.
struct TransferSchedule {
    std::vector<Move> moves;
};

// Greedy schedule: repeatedly pair the largest surplus with the largest
// deficit and move min of the two. Ties break toward the lowest learner id
// so all learners derive the identical schedule independently. O(p log p).
// Throws std::invalid_argument when counts and targets disagree in size or
// sum.
TransferSchedule balance(const ImbalanceVector& iv);

// Exact minimum number of sender->receiver messages that reaches the
// targets, by exhaustive search over zero-sum groupings of the imbalanced
// learners. Test oracle only; throws std::invalid_argument for p > 10.
int optimal_message_count(const ImbalanceVector& iv);

// Fraction of the batch that has to move to reach the targets:
// sum of per-learner deficits divided by the batch size. In [0, 1).
double deficit_fraction(const ImbalanceVector& iv);

} // namespace locload
