#include "trajdp/signature.hpp"

#include <algorithm>
#include <cmath>

namespace trajdp {

PFCounts compute_pf(const Trajectory& traj) {
    PFCounts counts;
    for (const TrajPoint& p : traj.points) ++counts[p.loc];
    return counts;
}

TFDistribution compute_tf(const std::vector<Trajectory>& dataset) {
    TFDistribution tf;
    std::set<Location> seen;
    for (const Trajectory& traj : dataset) {
        seen.clear();
        for (const TrajPoint& p : traj.points) {
            if (seen.insert(p.loc).second) ++tf.counts[p.loc];
        }
    }
    return tf;
}

std::vector<WeightedPoint> weigh_and_rank(const PFCounts& pf, const TFDistribution& tf,
                                          size_t traj_len, size_t dataset_size) {
    std::vector<WeightedPoint> ranked;
    ranked.reserve(pf.size());
    for (const auto& [loc, count] : pf) {
        const int l = tf.at(loc);
        const double rep = static_cast<double>(count) / static_cast<double>(traj_len);
        const double distinct = std::log(static_cast<double>(dataset_size) / l);
        ranked.push_back({loc, count, rep * distinct});
    }
    std::sort(ranked.begin(), ranked.end(), [](const WeightedPoint& a, const WeightedPoint& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        if (a.pf != b.pf) return a.pf > b.pf;
        return a.loc < b.loc;
    });
    return ranked;
}

SignatureResult extract_signatures(const std::vector<Trajectory>& dataset, int m) {
    SignatureResult out;
    out.signatures.m = m;
    out.signatures.ranked.reserve(dataset.size());
    const TFDistribution tf = compute_tf(dataset);
    for (const Trajectory& traj : dataset) {
        auto ranked = weigh_and_rank(compute_pf(traj), tf, traj.points.size(), dataset.size());
        const size_t top = std::min<size_t>(m, ranked.size());
        for (size_t i = 0; i < top; ++i) out.candidates.points.insert(ranked[i].loc);
        out.signatures.ranked.push_back(std::move(ranked));
    }
    return out;
}

std::vector<Location> select_point_list(const std::vector<WeightedPoint>& ranked,
                                        const CandidateSet& candidates, int m, Rng& rng) {
    const size_t limit = 2 * static_cast<size_t>(m);
    std::vector<Location> list;
    std::vector<Location> excluded;
    for (size_t rank = 0; rank < ranked.size() && list.size() < limit; ++rank) {
        const Location& loc = ranked[rank].loc;
        if (rank < static_cast<size_t>(m) || candidates.points.count(loc)) {
            list.push_back(loc);
        } else {
            excluded.push_back(loc);
        }
    }
    // random fill from the remaining distinct points, appended at the end
    while (list.size() < limit && !excluded.empty()) {
        const size_t pick = rng.below(excluded.size());
        list.push_back(excluded[pick]);
        excluded.erase(excluded.begin() + static_cast<ptrdiff_t>(pick));
    }
    return list;
}

}  // namespace trajdp
