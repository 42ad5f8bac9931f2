#include "trajdp/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "trajdp/rng.hpp"

namespace trajdp {
namespace {

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    size_t pos = 0;
    try {
        out = std::stod(s, &pos);
    } catch (const std::exception&) {
        return false;
    }
    return pos == s.size() && std::isfinite(out);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

}  // namespace

ReadResult read_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != "obj_id,timestamp,lon,lat") {
        throw std::runtime_error(path + ": expected header obj_id,timestamp,lon,lat");
    }
    ReadResult res;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        RawSample s;
        if (fields.size() != 4 || fields[0].empty() || !parse_double(fields[1], s.timestamp) ||
            !parse_double(fields[2], s.lon) || !parse_double(fields[3], s.lat)) {
            ++res.malformed;
            continue;
        }
        s.object_id = fields[0];
        res.samples.push_back(std::move(s));
    }
    return res;
}

BBox compute_bbox(const std::vector<RawSample>& samples) {
    if (samples.empty()) throw std::runtime_error("cannot compute bounding box of empty input");
    BBox b{samples[0].lon, samples[0].lat, samples[0].lon, samples[0].lat};
    for (const RawSample& s : samples) {
        b.min_lon = std::min(b.min_lon, s.lon);
        b.max_lon = std::max(b.max_lon, s.lon);
        b.min_lat = std::min(b.min_lat, s.lat);
        b.max_lat = std::max(b.max_lat, s.lat);
    }
    if (b.max_lon == b.min_lon) b.max_lon = b.min_lon + 1e-9;
    if (b.max_lat == b.min_lat) b.max_lat = b.min_lat + 1e-9;
    return b;
}

std::vector<Trajectory> build_dataset(const std::vector<RawSample>& samples, const BBox& bbox,
                                      int granularity, IngestStats* stats) {
    std::map<std::string, std::vector<RawSample>> grouped;
    size_t rejected = 0;
    for (const RawSample& s : samples) {
        if (!bbox.contains(s.lon, s.lat)) {
            ++rejected;
            continue;
        }
        grouped[s.object_id].push_back(s);
    }
    size_t out_of_order = 0;
    std::vector<Trajectory> out;
    out.reserve(grouped.size());
    for (auto& [oid, group] : grouped) {
        const bool sorted = std::is_sorted(group.begin(), group.end(),
                                           [](const RawSample& a, const RawSample& b) {
                                               return a.timestamp < b.timestamp;
                                           });
        if (!sorted) {
            ++out_of_order;
            std::stable_sort(group.begin(), group.end(),
                             [](const RawSample& a, const RawSample& b) {
                                 return a.timestamp < b.timestamp;
                             });
        }
        Trajectory traj;
        traj.object_id = oid;
        traj.points.reserve(group.size());
        for (const RawSample& s : group) {
            const Vec2 p = bbox.normalize(s.lon, s.lat);
            traj.points.push_back({snap_to_location(p, granularity), s.timestamp});
        }
        out.push_back(std::move(traj));
    }
    if (stats) {
        stats->rejected = rejected;
        stats->out_of_order = out_of_order;
    }
    return out;
}

void write_dataset(const std::string& path, const std::vector<Trajectory>& dataset,
                   const BBox& bbox, int granularity) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "obj_id,timestamp,lon,lat\n";
    char buf[128];
    for (const Trajectory& traj : dataset) {
        for (const TrajPoint& p : traj.points) {
            const Vec2 c = cell_center(p.loc, granularity);
            std::snprintf(buf, sizeof(buf), ",%.17g,%.10f,%.10f\n", p.t,
                          bbox.denorm_lon(c.x), bbox.denorm_lat(c.y));
            out << traj.object_id << buf;
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

// Ring geometry shared by all generated objects.
struct RingPlan {
    std::vector<Location> cycle;       // deduped ring cells
    size_t b1_lo, b1_hi;               // busy arc repeated twice more per lap
    size_t b2_lo, b2_hi;               // busy arc repeated once more per lap
    size_t skip_lo, skip_hi;           // listed cells skipped by detour objects
    size_t excursion_base;             // where planted-cell detours attach
};

RingPlan make_ring(int g) {
    // cell-by-cell walk around a circle touching all four grid edges, so the
    // corpus pins its own bounding box and steps stay short like GPS traces
    const double c = g / 2.0;
    const double r = g / 2.0 - 0.25;
    const int samples = 40 * g;
    RingPlan plan;
    Location prev{-1, -1};
    size_t diagonals = 0;
    for (int i = 0; i < samples; ++i) {
        const double th = 2.0 * std::numbers::pi * i / samples;
        const double x = c + r * std::cos(th);
        const double y = c + r * std::sin(th);
        const Location loc{std::clamp(static_cast<int32_t>(std::floor(x)), 0, g - 1),
                           std::clamp(static_cast<int32_t>(std::floor(y)), 0, g - 1)};
        if (loc == prev) continue;
        if (prev.cx >= 0 && loc.cx != prev.cx && loc.cy != prev.cy && ++diagonals % 2 == 0) {
            plan.cycle.push_back({loc.cx, prev.cy});  // stretch toward ~1800 per lap
        }
        plan.cycle.push_back(loc);
        prev = loc;
    }
    while (plan.cycle.size() > 1 && plan.cycle.back() == plan.cycle.front()) {
        plan.cycle.pop_back();
    }
    const size_t n = plan.cycle.size();
    auto frac = [n](double f) { return static_cast<size_t>(f * n); };
    plan.excursion_base = frac(0.05);
    plan.b1_lo = frac(0.30);
    plan.b1_hi = plan.b1_lo + 30;  // 30 busy pairs
    plan.b2_lo = frac(0.45);
    plan.b2_hi = plan.b2_lo + 19;  // 19 busy pairs
    plan.skip_lo = frac(0.60);
    plan.skip_hi = plan.skip_lo + 18;  // 19 listed cells
    return plan;
}

}  // namespace

std::vector<Trajectory> generate_corpus(size_t objects, size_t avg_len, uint64_t seed,
                                        int granularity) {
    const int g = granularity;
    const RingPlan plan = make_ring(g);
    if (plan.cycle.size() < 100) {
        throw std::invalid_argument("corpus generator needs a finer grid (>= 256)");
    }
    const size_t lap_len =
        plan.cycle.size() + 2 * (plan.b1_hi - plan.b1_lo + 1) + (plan.b2_hi - plan.b2_lo + 1);
    const size_t laps = std::max<size_t>(1, (avg_len + lap_len / 2) / lap_len);
    constexpr size_t kPlantedVisits = 10;

    // one unique interior cell per object
    std::set<Location> taken(plan.cycle.begin(), plan.cycle.end());
    std::vector<Location> planted(objects);
    Rng rng = substream(seed, 3);
    for (size_t i = 0; i < objects; ++i) {
        double angle = 2.399963229728653 * static_cast<double>(i);  // golden angle
        const double radius = 0.18 * g + 0.17 * g * static_cast<double>(i % 97) / 97.0;
        Location loc;
        while (true) {
            const double x = (g - 1) / 2.0 + 0.5 + radius * std::cos(angle);
            const double y = (g - 1) / 2.0 + 0.5 + radius * std::sin(angle);
            loc = {std::clamp(static_cast<int32_t>(std::floor(x)), 0, g - 1),
                   std::clamp(static_cast<int32_t>(std::floor(y)), 0, g - 1)};
            if (taken.insert(loc).second) break;
            angle += 0.017 + rng.uniform01() * 0.003;
        }
        planted[i] = loc;
    }

    auto pad_width = std::to_string(objects == 0 ? 1 : objects - 1).size();
    std::vector<Trajectory> out(objects);
    for (size_t i = 0; i < objects; ++i) {
        Trajectory& traj = out[i];
        std::string num = std::to_string(i);
        traj.object_id = "obj" + std::string(pad_width - num.size(), '0') + num;
        const bool detour = i % 10 == 0;

        // spread planted visits over laps and attachment slots
        std::vector<std::vector<size_t>> visits(laps);
        for (size_t v = 0; v < kPlantedVisits; ++v) {
            visits[v % laps].push_back(
                std::min(plan.excursion_base + 2 * (v / laps), plan.cycle.size() - 1));
        }

        double t = 0.0;
        auto emit = [&](Location loc) { traj.points.push_back({loc, t++}); };
        for (size_t lap = 0; lap < laps; ++lap) {
            for (size_t p = 0; p < plan.cycle.size(); ++p) {
                if (detour && p >= plan.skip_lo && p <= plan.skip_hi) continue;
                emit(plan.cycle[p]);
                if (p == plan.b1_hi) {
                    for (int rep = 0; rep < 2; ++rep) {
                        for (size_t q = plan.b1_lo; q <= plan.b1_hi; ++q) emit(plan.cycle[q]);
                    }
                }
                if (p == plan.b2_hi) {
                    for (size_t q = plan.b2_lo; q <= plan.b2_hi; ++q) emit(plan.cycle[q]);
                }
                for (size_t slot : visits[lap]) {
                    if (slot == p) emit(planted[i]);
                }
            }
        }
    }
    return out;
}

}  // namespace trajdp
