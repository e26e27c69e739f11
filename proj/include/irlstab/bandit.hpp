#pragma once

#include <vector>

#include "irlstab/inference.hpp"

namespace irlstab {

// Continuous-action bandit on [0,1] whose demonstrator density carries a huge
// multiplicative boost on a tiny ball around each dataset action whenever
// theta falls below a threshold.
struct BanditInstance {
    int action_resolution = 4096;
    int theta_resolution = 1000;
    double theta_lower = 0.0005;
    double theta_upper = 0.9995;
    double delta = 1e-4;  // ball half-width around each dataset action
    double boost = 1e9;
    double theta_threshold = 0.001;
    std::vector<double> dataset{1.0};

    void check() const;
    double theta_value(int i) const {
        return theta_lower + i * (theta_upper - theta_lower) / (theta_resolution - 1);
    }
    double action_value(int i) const {
        return static_cast<double>(i) / (action_resolution - 1);
    }
    double theta_diameter_sq() const {
        return (theta_upper - theta_lower) * (theta_upper - theta_lower);
    }
};

// r(a; theta) = a^theta (1-a)^(1-theta), with 0^0 = 1 at the boundary.
double bandit_reward(double a, double theta);

// Density over actions per theta slice. Normalizers combine a trapezoid rule
// over the uniform action grid with fine sub-grid trapezoid integrals of each
// boosted ball, since the balls can be far narrower than the grid spacing.
struct BanditDensity {
    BanditInstance instance;
    bool boosted = false;   // adversarial variant
    std::vector<double> z;  // normalizer per theta slice
    std::vector<double> base_z;
    std::vector<double> ball_integral;  // unboosted weight inside all balls, per slice
    std::vector<double> values;         // theta-major density table at grid actions

    bool slice_boosted(int theta_index) const;
    bool in_ball(double a) const;
    // Density at an arbitrary action (not restricted to the grid).
    double density(int theta_index, double a) const;
    double table(int theta_index, int action_index) const {
        return values[static_cast<std::size_t>(theta_index) * instance.action_resolution +
                      action_index];
    }
    // Probability mass of the boosted balls under this density.
    double ball_mass(int theta_index) const;
    // Piecewise trapezoid integral of the slice (uniform grid + ball refinement).
    double slice_integral(int theta_index) const;
    // Log-likelihood of one observed action, as the log of the average density
    // over the delta-ball around it.
    double log_likelihood(int theta_index, double a_obs) const;
};

BanditDensity build_model_density(const BanditInstance& instance);
BanditDensity build_adversarial_density(const BanditInstance& instance);

// KL(p || q) for one theta slice; exact for the model/adversarial pair, which
// differ only by the constant boost factor inside the balls.
double bandit_slice_kl(const BanditDensity& p, const BanditDensity& q, int theta_index);
double bandit_worstcase_kl(const BanditDensity& p, const BanditDensity& q);

struct BanditDemoReport {
    double epsilon = 0.0;
    double delta_used = 0.0;
    double d_wc = 0.0;
    double theta_star = 0.0;
    double theta_hat = 0.0;
    double sq_error = 0.0;
    bool diameter_bound_ok = false;
};

// Shrinks delta until the worst-case divergence is below epsilon, then runs
// MLE under the adversarial and model densities on the single-action dataset.
BanditDemoReport run_demo(BanditInstance instance, double epsilon);

// Log-concavity scan of the adversarial family over the theta grid, using
// pointwise log densities at the grid actions.
double bandit_concavity(const BanditDensity& density);

}  // namespace irlstab
