#include "trajdp/geo.hpp"

#include <algorithm>

namespace trajdp {

NormalizeResult normalize(const std::vector<RawSample>& samples, const BBox& bbox) {
    NormalizeResult out;
    out.points.reserve(samples.size());
    out.kept.reserve(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) {
        const RawSample& s = samples[i];
        if (!bbox.contains(s.lon, s.lat)) {
            ++out.rejected;
            continue;
        }
        out.points.push_back(bbox.normalize(s.lon, s.lat));
        out.kept.push_back(i);
    }
    return out;
}

Location snap_to_location(Vec2 p, int g) {
    auto clamp_cell = [g](double v) {
        auto c = static_cast<int32_t>(std::floor(v * g));
        return std::clamp(c, int32_t{0}, static_cast<int32_t>(g - 1));
    };
    return {clamp_cell(p.x), clamp_cell(p.y)};
}

double point_segment_distance(Vec2 q, Vec2 a, Vec2 b) {
    const double abx = b.x - a.x;
    const double aby = b.y - a.y;
    const double len2 = abx * abx + aby * aby;
    if (len2 == 0.0) return dist(q, a);  // degenerate segment
    double t = ((q.x - a.x) * abx + (q.y - a.y) * aby) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return dist(q, Vec2{a.x + t * abx, a.y + t * aby});
}

std::vector<Segment> segments_of(const Trajectory& traj, int g, uint32_t traj_id) {
    std::vector<Segment> segs;
    if (traj.points.size() < 2) return segs;
    segs.reserve(traj.points.size() - 1);
    for (size_t i = 0; i + 1 < traj.points.size(); ++i) {
        segs.push_back(Segment{cell_center(traj.points[i].loc, g),
                               cell_center(traj.points[i + 1].loc, g), traj_id,
                               static_cast<uint32_t>(i), static_cast<uint64_t>(i)});
    }
    return segs;
}

}  // namespace trajdp
