#pragma once

#include <vector>

#include "trajdp/geo.hpp"

namespace trajdp {

struct MetricReport {
    double la_s{0.0};
    double inf{0.0};
    double de{0.0};
    double te{0.0};
    double ffp{0.0};
};

// Base-2 Jensen-Shannon divergence between two same-length distributions,
// each summing to 1 (or both all-zero). Value in [0, 1].
double js_divergence(const std::vector<double>& p, const std::vector<double>& q);

// Maximum pairwise point distance, via convex hull and rotating calipers.
double trajectory_diameter(const Trajectory& traj, int granularity);

// Fraction of anonymized trajectories whose top-m signature matches their own
// reference trajectory under max weighted-point overlap (sum of min weights
// over shared locations; ties keep the earliest reference).
double linking_accuracy_spatial(const std::vector<Trajectory>& reference,
                                const std::vector<Trajectory>& anonymized, int m);

// 1 - (total multiset location overlap of paired trajectories) / (total
// reference points).
double info_loss_inf(const std::vector<Trajectory>& original,
                     const std::vector<Trajectory>& anonymized);

// JS divergence of diameter histograms over the pooled range.
double diameter_divergence_de(const std::vector<Trajectory>& original,
                              const std::vector<Trajectory>& anonymized, int granularity,
                              int bins);

// JS divergence of (start cell, end cell) distributions on a coarse grid.
double trip_divergence_te(const std::vector<Trajectory>& original,
                          const std::vector<Trajectory>& anonymized, int granularity,
                          int coarse_grid);

// F1 of the top-k most frequent consecutive location pairs.
double frequent_pattern_f1(const std::vector<Trajectory>& original,
                           const std::vector<Trajectory>& anonymized, int k);

MetricReport evaluate_all(const std::vector<Trajectory>& original,
                          const std::vector<Trajectory>& anonymized, int granularity, int m,
                          int bins, int coarse_grid, int ffp_k);

}  // namespace trajdp
