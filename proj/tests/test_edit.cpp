#include <doctest.h>

#include <cmath>

#include "trajdp/edit.hpp"

using namespace trajdp;

namespace {

const int g = 4;  // cell width 0.25, centers at 0.125 + 0.25k

Trajectory make(std::vector<Location> locs) {
    Trajectory t;
    double ts = 0.0;
    for (Location l : locs) t.points.push_back({l, ts++});
    return t;
}

}  // namespace

TEST_CASE("deletion loss per position") {
    const Trajectory bent = make({{0, 0}, {1, 1}, {2, 0}});
    // interior point drops onto the reconnection segment
    CHECK(deletion_loss(bent, 1, g) == doctest::Approx(0.25));
    // boundary points fall back to the surviving neighbor
    CHECK(deletion_loss(bent, 0, g) == doctest::Approx(0.25 * std::sqrt(2.0)));
    CHECK(deletion_loss(bent, 2, g) == doctest::Approx(0.25 * std::sqrt(2.0)));

    const Trajectory straight = make({{0, 0}, {1, 0}, {2, 0}});
    CHECK(deletion_loss(straight, 1, g) == doctest::Approx(0.0));  // collinear

    CHECK(deletion_loss(make({{3, 3}}), 0, g) == doctest::Approx(0.0));  // only point
}

TEST_CASE("complete deletion walks occurrences front to back") {
    const Location Q{0, 0}, A{1, 0}, B{2, 2};
    const Trajectory traj = make({Q, A, Q, B});
    // first Q: boundary, 0.25 to A; then Q interior of [A, B]: clamps to A, 0.25
    CHECK(complete_deletion_loss(Q, traj, g) == doctest::Approx(0.5));
    CHECK(complete_deletion_loss({9, 9}, traj, g) == doctest::Approx(-1.0));
    // input trajectory untouched
    CHECK(traj.points.size() == 4);
}

TEST_CASE("delete then insert reproduces the worked sequence") {
    const Location p1{0, 0}, p2{1, 0}, p3{2, 0}, p4{3, 0}, p5{3, 1}, p6{2, 1}, p7{1, 1};
    Trajectory traj = make({p1, p2, p3, p4, p5, p6, p7});
    apply_delete(traj, 3);
    apply_insert(traj, 3, p2);  // into segment <p5, p6>
    const std::vector<Location> want{p1, p2, p3, p5, p2, p6, p7};
    REQUIRE(traj.points.size() == want.size());
    for (size_t i = 0; i < want.size(); ++i) CHECK(traj.points[i].loc == want[i]);
    CHECK(traj.points[4].t == doctest::Approx(4.5));  // midpoint of t=4 and t=5
}

TEST_CASE("insert into empty and single-point trajectories") {
    Trajectory traj;
    apply_insert(traj, 0, {2, 2});
    REQUIRE(traj.points.size() == 1);
    CHECK(traj.points[0].t == 0.0);

    traj.points[0].t = 7.0;
    apply_insert(traj, 5, {3, 3});  // segment index ignored, appended
    REQUIRE(traj.points.size() == 2);
    CHECK(traj.points[1].loc == Location{3, 3});
    CHECK(traj.points[1].t == 7.0);
}

TEST_CASE("insertion loss is the point-segment distance") {
    CHECK(insertion_loss({0.5, 0.5}, {0.0, 0.0}, {1.0, 0.0}) == doctest::Approx(0.5));
    CHECK(insertion_loss({0.5, 0.0}, {0.0, 0.0}, {1.0, 0.0}) == doctest::Approx(0.0));
}
