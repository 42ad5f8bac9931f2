#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "trajdp/geo.hpp"
#include "trajdp/rng.hpp"
#include "trajdp/signature.hpp"

namespace trajdp {

struct LaplaceParams {
    double mu{0.0};
    double lambda{1.0};
};

// Inverse-CDF transform of a single uniform draw u in (0,1).
inline double laplace_from_uniform(LaplaceParams params, double u) {
    const double v = u - 0.5;
    const double sign = v < 0.0 ? -1.0 : (v > 0.0 ? 1.0 : 0.0);
    return params.mu - params.lambda * sign * std::log(1.0 - 2.0 * std::abs(v));
}

inline double sample_laplace(LaplaceParams params, Rng& rng) {
    return laplace_from_uniform(params, rng.uniform01());
}

// Noise indirection so tests can inject exact noise sequences.
class NoiseSource {
public:
    virtual ~NoiseSource() = default;
    virtual double draw(double mu, double lambda) = 0;
};

class LaplaceNoise : public NoiseSource {
public:
    explicit LaplaceNoise(Rng& rng) : rng_(&rng) {}
    double draw(double mu, double lambda) override {
        return sample_laplace({mu, lambda}, *rng_);
    }

private:
    Rng* rng_;
};

class InjectedNoise : public NoiseSource {
public:
    explicit InjectedNoise(std::vector<double> values) : values_(std::move(values)) {}
    double draw(double mu, double lambda) override;
    std::vector<std::pair<double, double>> requested;  // (mu, lambda) per draw

private:
    std::vector<double> values_;
    size_t next_{0};
};

// round-half-away-from-zero
inline long long round_int(double v) { return std::llround(v); }

struct PerturbedTF {
    // location -> (original l, perturbed l*)
    std::map<Location, std::pair<int, int>> entries;
};

struct PFEntry {
    Location loc;
    int f{0};
    int f_star{0};
};

struct PerturbedPF {
    uint32_t traj{0};
    std::vector<PFEntry> entries;  // aligned 1:1 with the point list
};

// Global TF randomization over the candidate set: l* = clamp(round(l + eta), 0, |D|),
// eta ~ Lap(0, 1/eps_g) independently per point.
PerturbedTF perturb_tf(const TFDistribution& tf_over_candidates, double eps_g,
                       size_t dataset_size, NoiseSource& noise);

// Two-stage local PF randomization over the trajectory's point list.
PerturbedPF perturb_pf(const std::vector<Location>& point_list, const PFCounts& pf,
                       int m, double eps_l, NoiseSource& noise);

enum class BudgetMode { PureG, PureL, GL };

struct PrivacyBudget {
    double eps_global{0.0};
    double eps_local{0.0};
    double total() const { return eps_global + eps_local; }
};

// PureG -> (eps, 0); PureL -> (0, eps); GL -> even split unless overridden.
PrivacyBudget budget_report(BudgetMode mode, double eps_total,
                            double explicit_global = -1.0, double explicit_local = -1.0);

}  // namespace trajdp
