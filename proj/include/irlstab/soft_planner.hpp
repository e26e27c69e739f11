#pragma once

#include <span>
#include <vector>

#include "irlstab/mdp.hpp"

namespace irlstab {

struct SoftValues {
    std::vector<double> q;  // s * n_actions + a
    std::vector<double> v;  // per state
    double theta = 0.0;
    double residual = 0.0;
    std::vector<double> residual_history;
};

// Fixed point of the soft Bellman update
//   Q(s,a) = r(s,a;theta) + gamma * sum_{s'} P(s'|s,a) V(s'),
//   V(s)   = logsumexp_a Q(s,a),
// iterated until the sup-norm residual of Q drops below tol.
SoftValues soft_value_iteration(const TabularMdp& mdp, const RewardModel& reward, double theta,
                                double tol = 1e-9, int max_iter = 100000);

// pi(a|s) = exp(q(s,a) - v(s)); throws on non-finite q.
std::vector<double> boltzmann_policy(const SoftValues& values, int n_actions);

// Boltzmann policies for every theta on the grid, theta-major.
struct PolicyFamily {
    int n_states = 0;
    int n_actions = 0;
    ThetaGrid theta_grid;
    std::vector<double> probs;  // (theta_index * n_states + s) * n_actions + a

    double prob(int theta_index, int s, int a) const {
        return probs[(static_cast<std::size_t>(theta_index) * n_states + s) * n_actions + a];
    }
    std::span<const double> slice(int theta_index) const {
        return {probs.data() + static_cast<std::size_t>(theta_index) * n_states * n_actions,
                static_cast<std::size_t>(n_states) * n_actions};
    }
    std::span<const double> row(int theta_index, int s) const {
        return {probs.data() +
                    (static_cast<std::size_t>(theta_index) * n_states + s) * n_actions,
                static_cast<std::size_t>(n_actions)};
    }
};

PolicyFamily policy_family(const TabularMdp& mdp, const RewardModel& reward, double tol = 1e-9,
                           int max_iter = 100000);

struct OccupancyMeasure {
    std::vector<double> w;
};

// Exact discounted occupancy: solves
//   w(s) = (1-gamma) rho(s) + gamma * sum_{s',a'} w(s') pi(a'|s') P(s|s',a')
// by a direct linear solve. policy is indexed s * n_actions + a.
OccupancyMeasure occupancy(const TabularMdp& mdp, std::span<const double> policy);

}  // namespace irlstab
