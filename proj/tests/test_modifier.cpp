#include <doctest.h>

#include <algorithm>
#include <limits>
#include <set>
#include <vector>

#include "trajdp/modifier.hpp"
#include "trajdp/rng.hpp"
#include "trajdp/signature.hpp"

using namespace trajdp;

namespace {

const int g = 8;

Trajectory make(std::vector<Location> locs) {
    Trajectory t;
    double ts = 0.0;
    for (Location l : locs) t.points.push_back({l, ts++});
    return t;
}

PerturbedPF pf_delta(std::vector<PFEntry> entries) {
    PerturbedPF pf;
    pf.entries = std::move(entries);
    return pf;
}

int count_loc(const Trajectory& t, Location q) {
    int n = 0;
    for (const TrajPoint& p : t.points) n += p.loc == q;
    return n;
}

int tf_of(const std::vector<Trajectory>& d, Location q) {
    int n = 0;
    for (const Trajectory& t : d) n += count_loc(t, q) > 0;
    return n;
}

const std::vector<Strategy> kAll{Strategy::Linear, Strategy::UG, Strategy::HGTopDown,
                                 Strategy::HGBottomUp, Strategy::HGBud};

// records every edit for brute-force optimality checks
struct Recorder : StepObserver {
    struct Step {
        uint32_t traj;
        Trajectory before;
        EditOp op;
    };
    std::vector<Step> steps;
    void on_edit(uint32_t traj, const Trajectory& before, const EditOp& op) override {
        steps.push_back({traj, before, op});
    }
};

double brute_min_insert(const Trajectory& before, Location q) {
    const Vec2 qc = cell_center(q, g);
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < before.points.size(); ++i) {
        best = std::min(best, insertion_loss(qc, cell_center(before.points[i].loc, g),
                                             cell_center(before.points[i + 1].loc, g)));
    }
    return best;
}

double brute_min_delete(const Trajectory& before, Location q) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < before.points.size(); ++i) {
        if (before.points[i].loc == q) best = std::min(best, deletion_loss(before, i, g));
    }
    return best;
}

}  // namespace

TEST_CASE("intra edits land the perturbed frequencies exactly") {
    const Location A{1, 1}, B{3, 1}, C{5, 5}, D{6, 2};
    const Trajectory base = make({A, B, A, C, B, D});
    const PerturbedPF pf =
        pf_delta({{A, 2, 4}, {B, 2, 0}, {C, 1, 1}, {D, 1, 3}});

    std::vector<Trajectory> outputs;
    for (Strategy s : kAll) {
        Trajectory traj = base;
        const ModifyResult res = intra_modify(traj, 0, pf, g, s);
        CHECK(count_loc(traj, A) == 4);
        CHECK(count_loc(traj, B) == 0);
        CHECK(count_loc(traj, C) == 1);
        CHECK(count_loc(traj, D) == 3);
        CHECK(res.insertions == 4);
        CHECK(res.deletions == 2);
        CHECK(res.clamps.empty());
        outputs.push_back(traj);
    }
    for (size_t i = 1; i < outputs.size(); ++i) {
        REQUIRE(outputs[i].points.size() == outputs[0].points.size());
        for (size_t j = 0; j < outputs[0].points.size(); ++j) {
            CHECK(outputs[i].points[j].loc == outputs[0].points[j].loc);
            CHECK(outputs[i].points[j].t == outputs[0].points[j].t);
        }
    }
}

TEST_CASE("every greedy step is brute-force optimal") {
    Rng rng(888);
    size_t checked = 0;
    for (int it = 0; it < 40; ++it) {
        std::vector<Location> locs;
        const size_t n = 5 + rng.below(20);
        for (size_t i = 0; i < n; ++i) {
            locs.push_back({static_cast<int32_t>(rng.below(g)), static_cast<int32_t>(rng.below(g))});
        }
        Trajectory traj = make(locs);
        std::vector<PFEntry> entries;
        std::set<Location> used;
        for (int e = 0; e < 4; ++e) {
            const Location q = locs[rng.below(locs.size())];
            if (!used.insert(q).second) continue;
            const int f = count_loc(traj, q);
            const int delta = static_cast<int>(rng.below(5)) - 2;
            entries.push_back({q, f, std::max(f + delta, 0)});
        }
        Recorder rec;
        intra_modify(traj, 0, pf_delta(entries), g, Strategy::HGBud, &rec);
        for (const auto& step : rec.steps) {
            if (step.op.kind == EditKind::Insert) {
                if (step.before.points.size() < 2) continue;  // append rule, no choice
                CHECK(step.op.loss == brute_min_insert(step.before, step.op.target));
            } else {
                CHECK(step.op.loss == brute_min_delete(step.before, step.op.target));
            }
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("intra grows degenerate trajectories by appending") {
    Trajectory traj;  // empty
    const Location q{2, 2};
    const ModifyResult res = intra_modify(traj, 0, pf_delta({{q, 0, 3}}), g, Strategy::Linear);
    CHECK(count_loc(traj, q) == 3);
    CHECK(res.insertions == 3);
    CHECK(res.loss == doctest::Approx(0.0));  // all copies stack on the same cell
}

TEST_CASE("inter edits land the perturbed trajectory frequencies exactly") {
    const Location X{1, 1}, Y{6, 6}, Z{4, 4};
    const std::vector<Trajectory> base{make({X, Y, Z}), make({X, Z}), make({Y, Z, Y}),
                                       make({Z, X})};
    PerturbedTF tf;
    tf.entries[X] = {3, 1};  // drop two trajectories
    tf.entries[Y] = {2, 4};  // add two
    std::vector<std::vector<Trajectory>> outputs;
    for (Strategy s : kAll) {
        auto dataset = base;
        const ModifyResult res = inter_modify(dataset, tf, g, s);
        CHECK(tf_of(dataset, X) == 1);
        CHECK(tf_of(dataset, Y) == 4);
        CHECK(tf_of(dataset, Z) == 4);  // untouched point keeps its frequency
        CHECK(res.clamps.empty());
        outputs.push_back(dataset);
    }
    for (size_t i = 1; i < outputs.size(); ++i) {
        for (size_t t = 0; t < base.size(); ++t) {
            REQUIRE(outputs[i][t].points.size() == outputs[0][t].points.size());
            for (size_t j = 0; j < outputs[0][t].points.size(); ++j) {
                CHECK(outputs[i][t].points[j].loc == outputs[0][t].points[j].loc);
            }
        }
    }
}

TEST_CASE("decreases delete every occurrence from the chosen trajectory") {
    const Location X{2, 2};
    std::vector<Trajectory> dataset{make({X, {3, 3}, X, X}), make({X, {5, 5}})};
    PerturbedTF tf;
    tf.entries[X] = {2, 1};
    const ModifyResult res = inter_modify(dataset, tf, g, Strategy::Linear);
    CHECK(tf_of(dataset, X) == 1);
    // first trajectory is the cheaper complete deletion and loses all three copies
    CHECK(count_loc(dataset[0], X) == 0);
    CHECK(count_loc(dataset[1], X) == 1);
    CHECK(res.deletions == 3);
}

TEST_CASE("infeasible increases are clamped and recorded") {
    const Location X{2, 2};
    std::vector<Trajectory> dataset{make({X, {3, 3}}), make({X, {4, 4}})};
    PerturbedTF tf;
    tf.entries[X] = {2, 5};  // no trajectory lacks X
    const ModifyResult res = inter_modify(dataset, tf, g, Strategy::HGBud);
    CHECK(tf_of(dataset, X) == 2);
    REQUIRE(res.clamps.size() == 1);
    CHECK(res.clamps[0].loc == X);
    CHECK(res.clamps[0].dataset_level);
}

TEST_CASE("single-point trajectories can host dataset-level inserts") {
    const Location X{1, 1};
    std::vector<Trajectory> dataset{make({X, {2, 2}}), make({{7, 7}})};
    PerturbedTF tf;
    tf.entries[X] = {1, 2};
    inter_modify(dataset, tf, g, Strategy::Linear);
    CHECK(tf_of(dataset, X) == 2);
    CHECK(count_loc(dataset[1], X) == 1);
    CHECK(dataset[1].points.size() == 2);  // appended after the lone point
}
