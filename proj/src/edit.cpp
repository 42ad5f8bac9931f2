#include "trajdp/edit.hpp"

#include <cassert>
#include <cstddef>

namespace trajdp {

double deletion_loss(const Trajectory& traj, size_t i, int g) {
    assert(i < traj.points.size());
    const size_t n = traj.points.size();
    const Vec2 q = cell_center(traj.points[i].loc, g);
    if (n == 1) return 0.0;
    if (i == 0) return dist(q, cell_center(traj.points[1].loc, g));
    if (i == n - 1) return dist(q, cell_center(traj.points[n - 2].loc, g));
    return point_segment_distance(q, cell_center(traj.points[i - 1].loc, g),
                                  cell_center(traj.points[i + 1].loc, g));
}

double complete_deletion_loss(Location q, const Trajectory& traj, int g) {
    Trajectory work = traj;
    double total = 0.0;
    bool found = false;
    for (size_t i = 0; i < work.points.size();) {
        if (work.points[i].loc == q) {
            found = true;
            total += deletion_loss(work, i, g);
            work.points.erase(work.points.begin() + static_cast<ptrdiff_t>(i));
        } else {
            ++i;
        }
    }
    return found ? total : -1.0;
}

void apply_insert(Trajectory& traj, size_t seg_index, Location q) {
    if (traj.points.empty()) {
        traj.points.push_back({q, 0.0});
        return;
    }
    if (traj.points.size() == 1) {
        traj.points.push_back({q, traj.points[0].t});
        return;
    }
    assert(seg_index + 1 < traj.points.size());
    const double t = 0.5 * (traj.points[seg_index].t + traj.points[seg_index + 1].t);
    traj.points.insert(traj.points.begin() + static_cast<ptrdiff_t>(seg_index + 1),
                       TrajPoint{q, t});
}

void apply_delete(Trajectory& traj, size_t position) {
    assert(position < traj.points.size());
    traj.points.erase(traj.points.begin() + static_cast<ptrdiff_t>(position));
}

}  // namespace trajdp
