#include "trajdp/pipeline.hpp"

#include <chrono>
#include <stdexcept>

#include "trajdp/signature.hpp"

namespace trajdp {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void merge(PhaseReport& phase, const ModifyResult& res) {
    phase.insertions += res.insertions;
    phase.deletions += res.deletions;
    phase.searches += res.searches;
    phase.loss += res.loss;
    phase.clamps.insert(phase.clamps.end(), res.clamps.begin(), res.clamps.end());
}

PhaseReport global_phase(std::vector<Trajectory>& dataset, const RunConfig& cfg,
                         StepObserver* observer) {
    const auto start = Clock::now();
    PhaseReport phase;
    phase.name = "global";
    const SignatureResult sig = extract_signatures(dataset, cfg.m);
    const TFDistribution tf = compute_tf(dataset);
    TFDistribution over_candidates;
    for (Location p : sig.candidates.points) over_candidates.counts[p] = tf.at(p);

    Rng rng = substream(cfg.seed, kGlobalNoiseStream);
    LaplaceNoise noise(rng);
    const PerturbedTF perturbed =
        perturb_tf(over_candidates, cfg.eps_global, dataset.size(), noise);
    merge(phase, inter_modify(dataset, perturbed, cfg.granularity, cfg.strategy, observer));
    phase.wall_ms = ms_since(start);
    return phase;
}

// Point lists + perturbed frequencies, drawn per trajectory from its own
// substream: first the list fill-up draws, then the noise draws.
std::vector<std::pair<std::vector<Location>, PerturbedPF>> local_perturbations(
    const std::vector<Trajectory>& dataset, const RunConfig& cfg) {
    const SignatureResult sig = extract_signatures(dataset, cfg.m);
    std::vector<std::pair<std::vector<Location>, PerturbedPF>> out;
    out.reserve(dataset.size());
    for (size_t i = 0; i < dataset.size(); ++i) {
        Rng rng = substream(cfg.seed, kLocalNoiseStream, i);
        auto list = select_point_list(sig.signatures.ranked[i], sig.candidates, cfg.m, rng);
        LaplaceNoise noise(rng);
        PerturbedPF pf = perturb_pf(list, compute_pf(dataset[i]), cfg.m, cfg.eps_local, noise);
        pf.traj = static_cast<uint32_t>(i);
        out.emplace_back(std::move(list), std::move(pf));
    }
    return out;
}

PhaseReport local_phase(std::vector<Trajectory>& dataset, const RunConfig& cfg,
                        StepObserver* observer) {
    const auto start = Clock::now();
    PhaseReport phase;
    phase.name = "local";
    const auto perturbed = local_perturbations(dataset, cfg);
    for (size_t i = 0; i < dataset.size(); ++i) {
        merge(phase, intra_modify(dataset[i], static_cast<uint32_t>(i), perturbed[i].second,
                                  cfg.granularity, cfg.strategy, observer));
    }
    phase.wall_ms = ms_since(start);
    return phase;
}

}  // namespace

PipelineReport run_pipeline(std::vector<Trajectory>& dataset, const RunConfig& cfg,
                            StepObserver* observer) {
    if (cfg.m < 1) throw std::invalid_argument("m must be >= 1");
    PipelineReport report;
    switch (cfg.mode) {
        case BudgetMode::PureG:
            report.budget = {cfg.eps_global, 0.0};
            report.phases.push_back(global_phase(dataset, cfg, observer));
            break;
        case BudgetMode::PureL:
            report.budget = {0.0, cfg.eps_local};
            report.phases.push_back(local_phase(dataset, cfg, observer));
            break;
        case BudgetMode::GL:
            report.budget = {cfg.eps_global, cfg.eps_local};
            if (cfg.gl_order == GLOrder::GlobalFirst) {
                report.phases.push_back(global_phase(dataset, cfg, observer));
                report.phases.push_back(local_phase(dataset, cfg, observer));
            } else {
                report.phases.push_back(local_phase(dataset, cfg, observer));
                report.phases.push_back(global_phase(dataset, cfg, observer));
            }
            break;
    }
    for (const PhaseReport& p : report.phases) report.total_loss += p.loss;
    return report;
}

std::vector<BenchRow> bench_strategies(const std::vector<Trajectory>& dataset,
                                       const std::vector<Strategy>& strategies,
                                       const RunConfig& cfg) {
    const auto perturbed = local_perturbations(dataset, cfg);
    std::vector<BenchRow> rows;
    std::vector<Trajectory> baseline;
    for (Strategy s : strategies) {
        std::vector<Trajectory> work = dataset;
        // copying the corpus stays outside the timed region
        const auto start = Clock::now();
        for (size_t i = 0; i < work.size(); ++i) {
            intra_modify(work[i], static_cast<uint32_t>(i), perturbed[i].second,
                         cfg.granularity, s, nullptr);
        }
        BenchRow row{s, dataset.size(), ms_since(start), true};
        if (rows.empty()) {
            baseline = std::move(work);
        } else {
            row.output_matches = true;
            for (size_t i = 0; i < work.size() && row.output_matches; ++i) {
                if (work[i].points.size() != baseline[i].points.size()) {
                    row.output_matches = false;
                    break;
                }
                for (size_t j = 0; j < work[i].points.size(); ++j) {
                    if (work[i].points[j].loc != baseline[i].points[j].loc ||
                        work[i].points[j].t != baseline[i].points[j].t) {
                        row.output_matches = false;
                        break;
                    }
                }
            }
        }
        rows.push_back(row);
    }
    return rows;
}

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Linear:
            return "linear";
        case Strategy::UG:
            return "UG";
        case Strategy::HGTopDown:
            return "HG_t";
        case Strategy::HGBottomUp:
            return "HG_b";
        case Strategy::HGBud:
            return "HG_+";
    }
    return "?";
}

bool parse_strategy(const std::string& name, Strategy& out) {
    if (name == "linear") out = Strategy::Linear;
    else if (name == "UG") out = Strategy::UG;
    else if (name == "HG_t") out = Strategy::HGTopDown;
    else if (name == "HG_b") out = Strategy::HGBottomUp;
    else if (name == "HG_+") out = Strategy::HGBud;
    else return false;
    return true;
}

}  // namespace trajdp
