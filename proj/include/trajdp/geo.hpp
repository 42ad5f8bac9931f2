#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace trajdp {

struct Vec2 {
    double x{0.0};
    double y{0.0};
};

inline double dist(Vec2 a, Vec2 b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

// Raw GPS sample as read from a CSV row.
struct RawSample {
    std::string object_id;
    double timestamp{0.0};  // seconds since epoch
    double lon{0.0};
    double lat{0.0};
};

// Geographic bounding box used as the normalization frame.
struct BBox {
    double min_lon{0.0};
    double min_lat{0.0};
    double max_lon{0.0};
    double max_lat{0.0};

    bool contains(double lon, double lat) const {
        return lon >= min_lon && lon <= max_lon && lat >= min_lat && lat <= max_lat;
    }
    Vec2 normalize(double lon, double lat) const {
        return {(lon - min_lon) / (max_lon - min_lon),
                (lat - min_lat) / (max_lat - min_lat)};
    }
    double denorm_lon(double x) const { return min_lon + x * (max_lon - min_lon); }
    double denorm_lat(double y) const { return min_lat + y * (max_lat - min_lat); }
};

// Discrete cell identity at the finest grid resolution.
struct Location {
    int32_t cx{0};
    int32_t cy{0};
    auto operator<=>(const Location&) const = default;
};

inline Vec2 cell_center(Location loc, int granularity) {
    return {(loc.cx + 0.5) / granularity, (loc.cy + 0.5) / granularity};
}

struct TrajPoint {
    Location loc;
    double t{0.0};
};

struct Trajectory {
    std::string object_id;
    std::vector<TrajPoint> points;
};

// Consecutive-point segment. `index` is the position of endpoint `a` within
// its trajectory at the time the segment was created; `seq` is a per-store
// creation counter that keeps the tie-break a total order after edits.
struct Segment {
    Vec2 a;
    Vec2 b;
    uint32_t traj{0};
    uint32_t index{0};
    uint64_t seq{0};
};

// (distance, traj, index, seq) total order shared by every search path.
inline bool seg_closer(double da, const Segment& sa, double db, const Segment& sb) {
    if (da != db) return da < db;
    if (sa.traj != sb.traj) return sa.traj < sb.traj;
    if (sa.index != sb.index) return sa.index < sb.index;
    return sa.seq < sb.seq;
}

struct NormalizeResult {
    std::vector<Vec2> points;   // in input order, rejected samples skipped
    std::vector<size_t> kept;   // indices into the input
    size_t rejected{0};
};

NormalizeResult normalize(const std::vector<RawSample>& samples, const BBox& bbox);

Location snap_to_location(Vec2 p, int finest_granularity);

// Minimum Euclidean distance from q to the closed segment [a, b].
double point_segment_distance(Vec2 q, Vec2 a, Vec2 b);

inline double point_segment_distance(Vec2 q, const Segment& s) {
    return point_segment_distance(q, s.a, s.b);
}

// Segments of a trajectory in order; endpoints are cell centers, seq = index.
std::vector<Segment> segments_of(const Trajectory& traj, int granularity,
                                 uint32_t traj_id = 0);

}  // namespace trajdp
