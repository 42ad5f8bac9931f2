#pragma once

#include <map>
#include <set>
#include <vector>

#include "trajdp/geo.hpp"
#include "trajdp/rng.hpp"

namespace trajdp {

using PFCounts = std::map<Location, int>;

// Per-trajectory point frequencies.
struct PFDistribution {
    uint32_t traj{0};
    PFCounts counts;
};

// Dataset-level trajectory frequencies: number of distinct trajectories
// containing each location at least once.
struct TFDistribution {
    std::map<Location, int> counts;

    int at(Location p) const {
        auto it = counts.find(p);
        return it == counts.end() ? 0 : it->second;
    }
};

struct WeightedPoint {
    Location loc;
    int pf{0};
    double weight{0.0};
};

// Full ranked list per trajectory; the top-m prefix is the signature.
struct SignatureSet {
    int m{0};
    std::vector<std::vector<WeightedPoint>> ranked;  // per trajectory, dataset order
};

struct CandidateSet {
    std::set<Location> points;
};

PFCounts compute_pf(const Trajectory& traj);

TFDistribution compute_tf(const std::vector<Trajectory>& dataset);

// weight = (pf/|tau|) * ln(|D|/l_p); descending weight, then descending pf,
// then ascending (cx, cy).
std::vector<WeightedPoint> weigh_and_rank(const PFCounts& pf, const TFDistribution& tf,
                                          size_t traj_len, size_t dataset_size);

struct SignatureResult {
    SignatureSet signatures;
    CandidateSet candidates;
};

SignatureResult extract_signatures(const std::vector<Trajectory>& dataset, int m);

// Walk the full ranked list: keep points with rank <= m or membership in the
// candidate set, stop at 2m; fill the remainder by uniform sampling from the
// excluded points.
std::vector<Location> select_point_list(const std::vector<WeightedPoint>& ranked,
                                        const CandidateSet& candidates, int m, Rng& rng);

}  // namespace trajdp
