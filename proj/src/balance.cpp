#include "locload/balance.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace locload {

std::int64_t ImbalanceVector::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

std::vector<std::int64_t> targets(std::int64_t b, std::uint32_t p) {
    if (p == 0) {
        throw std::invalid_argument("targets: learner count must be >= 1");
    }
    if (b < 0) {
        throw std::invalid_argument("targets: batch size must be non-negative");
    }
    const std::int64_t base = b / p;
    const std::int64_t rem = b % p;
    std::vector<std::int64_t> out(p, base);
    for (std::int64_t j = 0; j < rem; ++j) {
        ++out[static_cast<std::size_t>(j)];
    }
    return out;
}

namespace {

void validate(const ImbalanceVector& iv) {
    if (iv.counts.size() != iv.targets.size()) {
        throw std::invalid_argument("balance: counts and targets must have equal length");
    }
    const std::int64_t csum = std::accumulate(iv.counts.begin(), iv.counts.end(), std::int64_t{0});
    const std::int64_t tsum = std::accumulate(iv.targets.begin(), iv.targets.end(), std::int64_t{0});
    if (csum != tsum) {
        throw std::invalid_argument("balance: counts and targets must sum to the same total");
    }
}

struct HeapEntry {
    std::int64_t imbalance;
    LearnerId id;
};

// Max by imbalance, lowest id on ties.
struct HeapLess {
    bool operator()(const HeapEntry& a, const HeapEntry& b) const {
        if (a.imbalance != b.imbalance) return a.imbalance < b.imbalance;
        return a.id > b.id;
    }
};

} // namespace

TransferSchedule balance(const ImbalanceVector& iv) {
    validate(iv);

    std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapLess> surplus, deficit;
    for (std::size_t j = 0; j < iv.counts.size(); ++j) {
        const std::int64_t imb = iv.counts[j] - iv.targets[j];
        if (imb > 0) surplus.push({imb, static_cast<LearnerId>(j)});
        if (imb < 0) deficit.push({-imb, static_cast<LearnerId>(j)});
    }

    TransferSchedule schedule;
    while (!surplus.empty()) {
        HeapEntry hs = surplus.top();
        HeapEntry hd = deficit.top();
        surplus.pop();
        deficit.pop();

        const std::int64_t m = std::min(hs.imbalance, hd.imbalance);
        schedule.moves.push_back({hs.id, hd.id, m});

        hs.imbalance -= m;
        hd.imbalance -= m;
        if (hs.imbalance > 0) surplus.push(hs);
        if (hd.imbalance > 0) deficit.push(hd);
    }
    return schedule;
}

int optimal_message_count(const ImbalanceVector& iv) {
    validate(iv);
    if (iv.counts.size() > 10) {
        throw std::invalid_argument("optimal_message_count: exhaustive oracle limited to p <= 10");
    }

    std::vector<std::int64_t> nonzero;
    for (std::size_t j = 0; j < iv.counts.size(); ++j) {
        const std::int64_t imb = iv.counts[j] - iv.targets[j];
        if (imb != 0) nonzero.push_back(imb);
    }
    const int n = static_cast<int>(nonzero.size());
    if (n == 0) return 0;

    // A schedule with k messages splits the imbalanced learners into
    // zero-sum groups, and a group of size g needs at least g - 1 messages
    // (conversely g - 1 suffices: route along a chain). So the minimum is
    // n minus the maximum number of disjoint zero-sum groups.
    const int full = (1 << n) - 1;
    std::vector<std::int64_t> subset_sum(static_cast<std::size_t>(full) + 1, 0);
    for (int mask = 1; mask <= full; ++mask) {
        const int low = mask & -mask;
        const int idx = __builtin_ctz(static_cast<unsigned>(mask));
        subset_sum[mask] = subset_sum[mask ^ low] + nonzero[static_cast<std::size_t>(idx)];
    }

    std::vector<int> best(static_cast<std::size_t>(full) + 1, -1);
    best[0] = 0;
    for (int mask = 1; mask <= full; ++mask) {
        const int anchor = mask & -mask; // lowest remaining learner joins some group
        for (int sub = mask; sub != 0; sub = (sub - 1) & mask) {
            if (!(sub & anchor)) continue;
            if (subset_sum[sub] != 0) continue;
            if (best[mask ^ sub] < 0) continue;
            best[mask] = std::max(best[mask], best[mask ^ sub] + 1);
        }
    }
    return n - best[full];
}

double deficit_fraction(const ImbalanceVector& iv) {
    validate(iv);
    const std::int64_t b = iv.total();
    if (b == 0) return 0.0;
    std::int64_t deficits = 0;
    for (std::size_t j = 0; j < iv.counts.size(); ++j) {
        deficits += std::max<std::int64_t>(0, iv.targets[j] - iv.counts[j]);
    }
    return static_cast<double>(deficits) / static_cast<double>(b);
}

} // namespace locload
