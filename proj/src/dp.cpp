#include "trajdp/dp.hpp"

#include <algorithm>
#include <stdexcept>

namespace trajdp {

double InjectedNoise::draw(double mu, double lambda) {
    requested.emplace_back(mu, lambda);
    if (next_ >= values_.size()) throw std::runtime_error("injected noise exhausted");
    return values_[next_++];
}

PerturbedTF perturb_tf(const TFDistribution& tf, double eps_g, size_t dataset_size,
                       NoiseSource& noise) {
    if (eps_g <= 0.0) throw std::invalid_argument("eps_g must be positive");
    const double lambda = 1.0 / eps_g;
    PerturbedTF out;
    for (const auto& [loc, l] : tf.counts) {
        const double eta = noise.draw(0.0, lambda);
        // post-processing after noise: round, then clamp to [0, |D|]
        long long l_star = round_int(l + eta);
        l_star = std::clamp<long long>(l_star, 0, static_cast<long long>(dataset_size));
        out.entries[loc] = {l, static_cast<int>(l_star)};
    }
    return out;
}

PerturbedPF perturb_pf(const std::vector<Location>& point_list, const PFCounts& pf,
                       int m, double eps_l, NoiseSource& noise) {
    if (eps_l <= 0.0) throw std::invalid_argument("eps_l must be positive");
    const double lambda = 1.0 / eps_l;
    PerturbedPF out;
    out.entries.reserve(point_list.size());

    const size_t stage1 = std::min<size_t>(m, point_list.size());
    double noise_sum = 0.0;
    for (size_t k = 0; k < stage1; ++k) {
        auto it = pf.find(point_list[k]);
        const int f = it == pf.end() ? 0 : it->second;
        const double eta = noise.draw(-static_cast<double>(f), lambda);
        const long long f_star = std::max<long long>(round_int(f + eta), 0);
        noise_sum += static_cast<double>(f_star - f);  // actual noise, post-rounding
        out.entries.push_back({point_list[k], f, static_cast<int>(f_star)});
    }
    // average over the actual stage-1 prefix, which may be shorter than m
    const double mu_bar = stage1 > 0 ? noise_sum / static_cast<double>(stage1) : 0.0;

    for (size_t k = stage1; k < point_list.size(); ++k) {
        auto it = pf.find(point_list[k]);
        const int f = it == pf.end() ? 0 : it->second;
        const double eta = noise.draw(-mu_bar, lambda);
        const long long f_star = std::max<long long>(round_int(f + eta), 0);
        out.entries.push_back({point_list[k], f, static_cast<int>(f_star)});
    }
    return out;
}

PrivacyBudget budget_report(BudgetMode mode, double eps_total, double explicit_global,
                            double explicit_local) {
    switch (mode) {
        case BudgetMode::PureG:
            return {eps_total, 0.0};
        case BudgetMode::PureL:
            return {0.0, eps_total};
        case BudgetMode::GL:
            if (explicit_global >= 0.0 && explicit_local >= 0.0) {
                return {explicit_global, explicit_local};
            }
            return {eps_total / 2.0, eps_total / 2.0};
    }
    throw std::invalid_argument("unknown budget mode");
}

}  // namespace trajdp
