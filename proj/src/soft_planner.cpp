#include "irlstab/soft_planner.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace irlstab {

namespace {

double logsumexp(std::span<const double> xs) {
    double m = *std::max_element(xs.begin(), xs.end());
    if (!std::isfinite(m)) return m;
    double sum = 0.0;
    for (double x : xs) sum += std::exp(x - m);
    return m + std::log(sum);
}

}  // namespace

SoftValues soft_value_iteration(const TabularMdp& mdp, const RewardModel& reward, double theta,
                                double tol, int max_iter) {
    if (mdp.gamma >= 1.0) throw std::invalid_argument("soft value iteration requires gamma < 1");
    if (tol <= 0.0) throw std::invalid_argument("tolerance must be positive");
    const int S = mdp.n_states, A = mdp.n_actions;

    std::vector<double> r(static_cast<std::size_t>(S) * A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) r[s * A + a] = reward.value(s, a, theta);

    SoftValues out;
    out.theta = theta;
    out.q.assign(static_cast<std::size_t>(S) * A, 0.0);
    out.v.assign(S, 0.0);
    std::vector<double> q_next(out.q.size());
    std::vector<double> v_prev(S);

    for (int iter = 0; iter < max_iter; ++iter) {
        for (int s = 0; s < S; ++s) {
            for (int a = 0; a < A; ++a) {
                const double* row = &mdp.transition[static_cast<std::size_t>(s * A + a) * S];
                double ev = 0.0;
                for (int s2 = 0; s2 < S; ++s2) ev += row[s2] * out.v[s2];
                q_next[s * A + a] = r[s * A + a] + mdp.gamma * ev;
            }
        }
        out.q.swap(q_next);
        v_prev.swap(out.v);
        double residual = 0.0;
        for (int s = 0; s < S; ++s) {
            out.v[s] = logsumexp({out.q.data() + static_cast<std::size_t>(s) * A,
                                  static_cast<std::size_t>(A)});
            // sup-norm change of V: the soft Bellman operator contracts it by gamma
            residual = std::max(residual, std::abs(out.v[s] - v_prev[s]));
        }
        out.residual = residual;
        out.residual_history.push_back(residual);
        if (residual <= tol) return out;
    }
    throw std::runtime_error("soft value iteration did not converge: residual " +
                             std::to_string(out.residual) + " after " + std::to_string(max_iter) +
                             " iterations");
}

std::vector<double> boltzmann_policy(const SoftValues& values, int n_actions) {
    std::vector<double> pi(values.q.size());
    const int S = static_cast<int>(values.v.size());
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < n_actions; ++a) {
            double q = values.q[s * n_actions + a];
            if (!std::isfinite(q)) throw std::invalid_argument("non-finite Q value");
            pi[s * n_actions + a] = std::exp(q - values.v[s]);
        }
        // exact row normalization on top of the log-space computation
        double sum = 0.0;
        for (int a = 0; a < n_actions; ++a) sum += pi[s * n_actions + a];
        for (int a = 0; a < n_actions; ++a) pi[s * n_actions + a] /= sum;
    }
    return pi;
}

PolicyFamily policy_family(const TabularMdp& mdp, const RewardModel& reward, double tol,
                           int max_iter) {
    const ThetaGrid& grid = reward.theta_grid;
    if (grid.resolution < 1) throw std::invalid_argument("theta grid must be nonempty");
    PolicyFamily family;
    family.n_states = mdp.n_states;
    family.n_actions = mdp.n_actions;
    family.theta_grid = grid;
    const std::size_t slice_size = static_cast<std::size_t>(mdp.n_states) * mdp.n_actions;
    family.probs.assign(static_cast<std::size_t>(grid.resolution) * slice_size, 0.0);

    std::vector<std::string> errors(grid.resolution);
    auto solve_range = [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            try {
                SoftValues values = soft_value_iteration(mdp, reward, grid.value(i), tol, max_iter);
                std::vector<double> pi = boltzmann_policy(values, mdp.n_actions);
                std::copy(pi.begin(), pi.end(), family.probs.begin() + i * slice_size);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };

    int n_threads = std::min<int>(std::max(1u, std::thread::hardware_concurrency()),
                                  grid.resolution);
    if (n_threads <= 1) {
        solve_range(0, grid.resolution);
    } else {
        std::vector<std::thread> workers;
        int chunk = (grid.resolution + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            int begin = t * chunk, end = std::min(grid.resolution, begin + chunk);
            if (begin >= end) break;
            workers.emplace_back(solve_range, begin, end);
        }
        for (auto& w : workers) w.join();
    }
    for (int i = 0; i < grid.resolution; ++i)
        if (!errors[i].empty())
            throw std::runtime_error("policy family solve failed at theta index " +
                                     std::to_string(i) + ": " + errors[i]);
    return family;
}

OccupancyMeasure occupancy(const TabularMdp& mdp, std::span<const double> policy) {
    const int S = mdp.n_states, A = mdp.n_actions;
    if (policy.size() != static_cast<std::size_t>(S) * A)
        throw std::invalid_argument("policy table has wrong shape");
    for (int s = 0; s < S; ++s) {
        double sum = 0.0;
        for (int a = 0; a < A; ++a) sum += policy[s * A + a];
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("policy row " + std::to_string(s) + " is not stochastic");
    }

    // State-to-state chain under the policy: M(s -> s').
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(S, S);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            double pa = policy[s * A + a];
            if (pa == 0.0) continue;
            for (int s2 = 0; s2 < S; ++s2) m(s, s2) += pa * mdp.p(s, a, s2);
        }

    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(S, S) - mdp.gamma * m.transpose();
    Eigen::VectorXd rhs(S);
    for (int s = 0; s < S; ++s) rhs(s) = (1.0 - mdp.gamma) * mdp.initial_dist[s];

    Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
    if (!lu.isInvertible()) throw std::runtime_error("occupancy balance system is singular");
    Eigen::VectorXd w = lu.solve(rhs);
    if (!w.allFinite()) throw std::runtime_error("occupancy solve produced non-finite values");

    OccupancyMeasure out;
    out.w.assign(w.data(), w.data() + S);
    for (double& x : out.w)
        if (x < 0.0 && x > -1e-12) x = 0.0;  // clip solver roundoff
    return out;
}

}  // namespace irlstab
