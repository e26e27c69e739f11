#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "irlstab/soft_planner.hpp"

namespace irlstab {

// Forward KL with the 0*ln(0/.) = 0 convention; +infinity when q fails to
// cover the support of p.
double kl_discrete(std::span<const double> p, std::span<const double> q);

struct DivergenceReport {
    double d_weighted = 0.0;
    double d_worstcase = 0.0;
    std::vector<double> per_state_kl;
    std::optional<double> delta_p;
    std::optional<double> bound_cor1;
    std::optional<double> bound_cor2;
};

// Occupancy-weighted expected KL at theta*, optionally filling per-state KLs.
double weighted_divergence(const PolicyFamily& pi_star, const PolicyFamily& pi_tilde,
                           const OccupancyMeasure& w_star, int theta_star_index,
                           std::vector<double>* per_state_kl = nullptr);

// Supremum of the per-state KL over the whole theta grid and all states.
double worstcase_divergence(const PolicyFamily& pi_star, const PolicyFamily& pi_tilde);

// Exact-expectation negative log-likelihood of the model at theta_index when
// data is generated by pi_star at theta_star_index with state weights w_star.
double expected_nll(const PolicyFamily& pi_tilde, const PolicyFamily& pi_star,
                    const OccupancyMeasure& w_star, int theta_star_index, int theta_index);

struct InferenceResult {
    double theta_hat = 0.0;
    std::vector<double> loss_curve;
    bool unique = true;
    double theta_star = 0.0;
    double sq_error = 0.0;
};

InferenceResult mle_infer(const std::vector<double>& loss_curve, const ThetaGrid& grid,
                          double theta_star);

// n i.i.d. (state, action) pairs: state from the exact occupancy of pi_star's
// theta* slice in mdp, action from that slice.
std::vector<std::pair<int, int>> sample_dataset(const TabularMdp& mdp,
                                                const PolicyFamily& pi_star, int theta_star_index,
                                                int n, std::uint64_t seed);

struct ConcavityEstimate {
    double c_hat = 0.0;
    std::vector<std::tuple<int, int, int>> witnesses;  // (state, action, theta index)
};

// Minimum over (s,a) and interior theta of the negated second central
// difference of log pi, divided by the squared grid spacing.
ConcavityEstimate estimate_concavity(const PolicyFamily& pi);

double cor1_bound(double delta_p, int n_actions, double r_max, double gamma);
double cor2_bound(int n_actions, double r_max, double gamma_tilde, double gamma_star);

// (2/c) * d_weighted when c_hat > 0; nullopt when the concavity assumption is
// unverified.
std::optional<double> theorem2_bound(double c_hat, double d_weighted);

}  // namespace irlstab
