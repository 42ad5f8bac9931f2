#pragma once

#include <string>
#include <vector>

#include "trajdp/dp.hpp"
#include "trajdp/modifier.hpp"

namespace trajdp {

enum class GLOrder { GlobalFirst, LocalFirst };

struct RunConfig {
    BudgetMode mode{BudgetMode::GL};
    double eps_global{0.5};
    double eps_local{0.5};
    int m{10};
    int granularity{512};
    uint64_t seed{0};
    GLOrder gl_order{GLOrder::GlobalFirst};
    Strategy strategy{Strategy::HGBud};
};

struct PhaseReport {
    std::string name;
    size_t insertions{0};
    size_t deletions{0};
    size_t searches{0};
    double loss{0.0};
    double wall_ms{0.0};
    std::vector<ClampRecord> clamps;
};

struct PipelineReport {
    PrivacyBudget budget;
    std::vector<PhaseReport> phases;
    double total_loss{0.0};
};

// Rng stream ids; local draws add the trajectory's dataset position.
inline constexpr uint64_t kGlobalNoiseStream = 1;
inline constexpr uint64_t kLocalNoiseStream = 2;
inline constexpr uint64_t kCorpusStream = 3;

// Mutates the dataset in place according to the configured mechanism(s).
PipelineReport run_pipeline(std::vector<Trajectory>& dataset, const RunConfig& config,
                            StepObserver* observer = nullptr);

struct BenchRow {
    Strategy strategy;
    size_t dataset_size{0};
    double wall_ms{0.0};
    bool output_matches{true};  // same edited dataset as the first strategy
};

// Times the per-trajectory modification phase with a fixed perturbation
// shared by all strategies, so wall time is the only difference.
std::vector<BenchRow> bench_strategies(const std::vector<Trajectory>& dataset,
                                       const std::vector<Strategy>& strategies,
                                       const RunConfig& config);

const char* strategy_name(Strategy s);
bool parse_strategy(const std::string& name, Strategy& out);

}  // namespace trajdp
