#include "trajdp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "trajdp/signature.hpp"

namespace trajdp {
namespace {

double kl_term(double p, double m) { return p > 0.0 ? p * std::log2(p / m) : 0.0; }

std::vector<Vec2> hull_of(const Trajectory& traj, int g) {
    std::set<Location> uniq;
    for (const TrajPoint& p : traj.points) uniq.insert(p.loc);
    std::vector<Vec2> pts;
    pts.reserve(uniq.size());
    for (Location loc : uniq) pts.push_back(cell_center(loc, g));
    if (pts.size() < 3) return pts;
    auto cross = [](Vec2 o, Vec2 a, Vec2 b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    std::vector<Vec2> hull(2 * pts.size());
    size_t k = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    const size_t lower = k + 1;
    for (size_t i = pts.size() - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

std::map<std::pair<Location, Location>, long long> pair_counts(
    const std::vector<Trajectory>& dataset) {
    std::map<std::pair<Location, Location>, long long> counts;
    for (const Trajectory& t : dataset) {
        for (size_t i = 0; i + 1 < t.points.size(); ++i) {
            ++counts[{t.points[i].loc, t.points[i + 1].loc}];
        }
    }
    return counts;
}

std::set<std::pair<Location, Location>> top_k_pairs(
    const std::map<std::pair<Location, Location>, long long>& counts, int k) {
    std::vector<std::pair<std::pair<Location, Location>, long long>> ranked(counts.begin(),
                                                                            counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::set<std::pair<Location, Location>> out;
    for (size_t i = 0; i < ranked.size() && i < static_cast<size_t>(k); ++i) {
        out.insert(ranked[i].first);
    }
    return out;
}

}  // namespace

double js_divergence(const std::vector<double>& p, const std::vector<double>& q) {
    double d = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        const double m = 0.5 * (p[i] + q[i]);
        if (m > 0.0) d += 0.5 * kl_term(p[i], m) + 0.5 * kl_term(q[i], m);
    }
    return std::clamp(d, 0.0, 1.0);
}

double trajectory_diameter(const Trajectory& traj, int granularity) {
    const std::vector<Vec2> hull = hull_of(traj, granularity);
    const size_t n = hull.size();
    if (n < 2) return 0.0;
    if (n == 2) return dist(hull[0], hull[1]);
    double best = 0.0;
    size_t j = 1;
    auto area2 = [&](size_t a, size_t b, size_t c) {
        return std::abs((hull[b].x - hull[a].x) * (hull[c].y - hull[a].y) -
                        (hull[b].y - hull[a].y) * (hull[c].x - hull[a].x));
    };
    for (size_t i = 0; i < n; ++i) {
        const size_t ni = (i + 1) % n;
        while (area2(i, ni, (j + 1) % n) > area2(i, ni, j)) j = (j + 1) % n;
        best = std::max({best, dist(hull[i], hull[j]), dist(hull[ni], hull[j])});
    }
    return best;
}

double linking_accuracy_spatial(const std::vector<Trajectory>& reference,
                                const std::vector<Trajectory>& anonymized, int m) {
    if (anonymized.empty()) return 0.0;
    const SignatureResult ref = extract_signatures(reference, m);
    const SignatureResult anon = extract_signatures(anonymized, m);
    auto top = [m](const std::vector<WeightedPoint>& ranked) {
        std::map<Location, double> sig;
        for (size_t i = 0; i < ranked.size() && i < static_cast<size_t>(m); ++i) {
            sig[ranked[i].loc] = ranked[i].weight;
        }
        return sig;
    };
    std::vector<std::map<Location, double>> ref_sigs;
    ref_sigs.reserve(reference.size());
    for (const auto& ranked : ref.signatures.ranked) ref_sigs.push_back(top(ranked));

    size_t correct = 0;
    for (size_t i = 0; i < anonymized.size(); ++i) {
        const auto sig = top(anon.signatures.ranked[i]);
        size_t best_j = 0;
        double best_score = -1.0;
        for (size_t j = 0; j < ref_sigs.size(); ++j) {
            double score = 0.0;
            for (const auto& [loc, w] : sig) {
                auto it = ref_sigs[j].find(loc);
                if (it != ref_sigs[j].end()) score += std::min(w, it->second);
            }
            if (score > best_score) {
                best_score = score;
                best_j = j;
            }
        }
        if (best_j == i) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(anonymized.size());
}

double info_loss_inf(const std::vector<Trajectory>& original,
                     const std::vector<Trajectory>& anonymized) {
    long long total = 0;
    long long shared = 0;
    for (size_t i = 0; i < original.size(); ++i) {
        total += static_cast<long long>(original[i].points.size());
        if (i >= anonymized.size()) continue;
        std::map<Location, long long> counts;
        for (const TrajPoint& p : original[i].points) ++counts[p.loc];
        for (const TrajPoint& p : anonymized[i].points) {
            auto it = counts.find(p.loc);
            if (it != counts.end() && it->second > 0) {
                --it->second;
                ++shared;
            }
        }
    }
    if (total == 0) return 0.0;
    return 1.0 - static_cast<double>(shared) / static_cast<double>(total);
}

double diameter_divergence_de(const std::vector<Trajectory>& original,
                              const std::vector<Trajectory>& anonymized, int granularity,
                              int bins) {
    std::vector<double> da, db;
    for (const Trajectory& t : original) da.push_back(trajectory_diameter(t, granularity));
    for (const Trajectory& t : anonymized) db.push_back(trajectory_diameter(t, granularity));
    if (da.empty() || db.empty()) return 0.0;
    double lo = da[0], hi = da[0];
    for (double d : da) lo = std::min(lo, d), hi = std::max(hi, d);
    for (double d : db) lo = std::min(lo, d), hi = std::max(hi, d);
    std::vector<double> pa(bins, 0.0), pb(bins, 0.0);
    auto bin_of = [&](double d) {
        if (hi == lo) return 0;
        const int b = static_cast<int>((d - lo) / (hi - lo) * bins);
        return std::clamp(b, 0, bins - 1);
    };
    for (double d : da) pa[bin_of(d)] += 1.0 / static_cast<double>(da.size());
    for (double d : db) pb[bin_of(d)] += 1.0 / static_cast<double>(db.size());
    return js_divergence(pa, pb);
}

double trip_divergence_te(const std::vector<Trajectory>& original,
                          const std::vector<Trajectory>& anonymized, int granularity,
                          int coarse_grid) {
    auto coarse = [&](Location loc) {
        return Location{static_cast<int32_t>(static_cast<int64_t>(loc.cx) * coarse_grid / granularity),
                        static_cast<int32_t>(static_cast<int64_t>(loc.cy) * coarse_grid / granularity)};
    };
    auto trips = [&](const std::vector<Trajectory>& ds) {
        std::map<std::pair<Location, Location>, long long> counts;
        long long n = 0;
        for (const Trajectory& t : ds) {
            if (t.points.empty()) continue;
            ++counts[{coarse(t.points.front().loc), coarse(t.points.back().loc)}];
            ++n;
        }
        return std::make_pair(counts, n);
    };
    const auto [ca, na] = trips(original);
    const auto [cb, nb] = trips(anonymized);
    if (na == 0 || nb == 0) return 0.0;
    std::set<std::pair<Location, Location>> support;
    for (const auto& [k, v] : ca) support.insert(k);
    for (const auto& [k, v] : cb) support.insert(k);
    std::vector<double> pa, pb;
    for (const auto& key : support) {
        auto ita = ca.find(key);
        auto itb = cb.find(key);
        pa.push_back(ita == ca.end() ? 0.0 : static_cast<double>(ita->second) / na);
        pb.push_back(itb == cb.end() ? 0.0 : static_cast<double>(itb->second) / nb);
    }
    return js_divergence(pa, pb);
}

double frequent_pattern_f1(const std::vector<Trajectory>& original,
                           const std::vector<Trajectory>& anonymized, int k) {
    const auto a = top_k_pairs(pair_counts(original), k);
    const auto b = top_k_pairs(pair_counts(anonymized), k);
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    size_t inter = 0;
    for (const auto& key : a) inter += b.count(key);
    return 2.0 * static_cast<double>(inter) / static_cast<double>(a.size() + b.size());
}

MetricReport evaluate_all(const std::vector<Trajectory>& original,
                          const std::vector<Trajectory>& anonymized, int granularity, int m,
                          int bins, int coarse_grid, int ffp_k) {
    MetricReport r;
    r.la_s = linking_accuracy_spatial(original, anonymized, m);
    r.inf = info_loss_inf(original, anonymized);
    r.de = diameter_divergence_de(original, anonymized, granularity, bins);
    r.te = trip_divergence_te(original, anonymized, granularity, coarse_grid);
    r.ffp = frequent_pattern_f1(original, anonymized, ffp_k);
    return r;
}

}  // namespace trajdp
