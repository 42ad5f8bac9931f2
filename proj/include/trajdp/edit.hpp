#pragma once

#include <cstdint>
#include <vector>

#include "trajdp/geo.hpp"

namespace trajdp {

enum class EditKind { Insert, Delete };

struct EditOp {
    EditKind kind{EditKind::Insert};
    Location target;
    uint32_t traj{0};
    // Insert: segment index whose endpoints host the new point.
    // Delete: point position of the occurrence to remove.
    size_t position{0};
    double loss{0.0};
};

// Loss of inserting q into segment <a, b>.
inline double insertion_loss(Vec2 q, Vec2 a, Vec2 b) {
    return point_segment_distance(q, a, b);
}

// Loss of deleting the point at position i: distance from it to the
// reconnection segment of its neighbors. Boundary occurrences use the single
// surviving neighbor; an only point costs 0.
double deletion_loss(const Trajectory& traj, size_t i, int granularity);

// Sum of deletion losses of all occurrences of q, evaluated front to back on
// the progressively shortened trajectory. Returns -1 if q does not occur.
double complete_deletion_loss(Location q, const Trajectory& traj, int granularity);

// Splice q between points seg_index and seg_index+1 with an interpolated
// timestamp. On a single-point trajectory q is appended (seg_index ignored).
void apply_insert(Trajectory& traj, size_t seg_index, Location q);

void apply_delete(Trajectory& traj, size_t position);

}  // namespace trajdp
