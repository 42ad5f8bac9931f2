#pragma once

#include <cstdint>
#include <vector>

#include "trajdp/dp.hpp"
#include "trajdp/edit.hpp"
#include "trajdp/geo.hpp"
#include "trajdp/hg_index.hpp"

namespace trajdp {

enum class Strategy { Linear, UG, HGTopDown, HGBottomUp, HGBud };

// Demand that could not be met (not enough host trajectories, etc.).
struct ClampRecord {
    uint32_t traj{0};  // dataset-wide edits use the owner of the shortfall point
    Location loc;
    int requested{0};
    int applied{0};
    bool dataset_level{false};
};

// Per-edit hook; `before` is the trajectory state just before the edit.
class StepObserver {
public:
    virtual ~StepObserver() = default;
    virtual void on_edit(uint32_t traj, const Trajectory& before, const EditOp& op) = 0;
};

struct ModifyResult {
    double loss{0.0};
    size_t insertions{0};
    size_t deletions{0};
    size_t searches{0};
    std::vector<ClampRecord> clamps;
};

// Applies the perturbed per-trajectory frequencies: for each point-list entry,
// greedily insert into the nearest segment or delete the cheapest occurrence,
// one edit at a time against the live index.
ModifyResult intra_modify(Trajectory& traj, uint32_t traj_id, const PerturbedPF& pf,
                          int granularity, Strategy strategy,
                          StepObserver* observer = nullptr);

// Applies the perturbed dataset-level frequencies: all decreases first
// (complete deletion from the cheapest trajectories), then increases
// (insert once into the cheapest trajectories lacking the point), candidate
// points in ascending location order.
ModifyResult inter_modify(std::vector<Trajectory>& dataset, const PerturbedTF& tf,
                          int granularity, Strategy strategy,
                          StepObserver* observer = nullptr);

}  // namespace trajdp
