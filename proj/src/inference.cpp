#include "irlstab/inference.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace irlstab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_distribution(std::span<const double> p, const char* name) {
    double sum = 0.0;
    for (double v : p) {
        if (v < 0.0) throw std::domain_error(std::string(name) + " has a negative entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::domain_error(std::string(name) + " is not normalized");
}

void check_shapes(const PolicyFamily& a, const PolicyFamily& b) {
    if (a.n_states != b.n_states || a.n_actions != b.n_actions ||
        a.theta_grid.resolution != b.theta_grid.resolution)
        throw std::invalid_argument("policy families have mismatched shapes");
}

int sample_index(std::span<const double> weights, std::mt19937_64& rng) {
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
}

}  // namespace

double kl_discrete(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::domain_error("KL arguments differ in support size");
    check_distribution(p, "p");
    check_distribution(q, "q");
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) return kInf;
        kl += p[i] * std::log(p[i] / q[i]);
    }
    return std::max(kl, 0.0);
}

double weighted_divergence(const PolicyFamily& pi_star, const PolicyFamily& pi_tilde,
                           const OccupancyMeasure& w_star, int theta_star_index,
                           std::vector<double>* per_state_kl) {
    check_shapes(pi_star, pi_tilde);
    if (static_cast<int>(w_star.w.size()) != pi_star.n_states)
        throw std::invalid_argument("occupancy size does not match the policy family");
    double total = 0.0;
    if (per_state_kl) per_state_kl->assign(pi_star.n_states, 0.0);
    for (int s = 0; s < pi_star.n_states; ++s) {
        double kl = kl_discrete(pi_star.row(theta_star_index, s), pi_tilde.row(theta_star_index, s));
        if (per_state_kl) (*per_state_kl)[s] = kl;
        total += w_star.w[s] * kl;
    }
    return total;
}

double worstcase_divergence(const PolicyFamily& pi_star, const PolicyFamily& pi_tilde) {
    check_shapes(pi_star, pi_tilde);
    double worst = 0.0;
    for (int i = 0; i < pi_star.theta_grid.resolution; ++i)
        for (int s = 0; s < pi_star.n_states; ++s)
            worst = std::max(worst, kl_discrete(pi_star.row(i, s), pi_tilde.row(i, s)));
    return worst;
}

double expected_nll(const PolicyFamily& pi_tilde, const PolicyFamily& pi_star,
                    const OccupancyMeasure& w_star, int theta_star_index, int theta_index) {
    check_shapes(pi_star, pi_tilde);
    double total = 0.0;
    for (int s = 0; s < pi_star.n_states; ++s) {
        double ws = w_star.w[s];
        if (ws == 0.0) continue;
        for (int a = 0; a < pi_star.n_actions; ++a) {
            double pa = pi_star.prob(theta_star_index, s, a);
            if (pa == 0.0) continue;
            double qa = pi_tilde.prob(theta_index, s, a);
            if (qa == 0.0) return kInf;
            total -= ws * pa * std::log(qa);
        }
    }
    return total;
}

InferenceResult mle_infer(const std::vector<double>& loss_curve, const ThetaGrid& grid,
                          double theta_star) {
    if (static_cast<int>(loss_curve.size()) != grid.resolution)
        throw std::invalid_argument("loss curve length does not match the theta grid");
    int best = -1;
    for (int i = 0; i < grid.resolution; ++i) {
        if (std::isnan(loss_curve[i]))
            throw std::invalid_argument("loss curve contains NaN");
        if (loss_curve[i] == kInf) continue;
        if (best < 0 || loss_curve[i] < loss_curve[best]) best = i;
    }
    if (best < 0) throw std::runtime_error("loss curve is infinite everywhere: model covers no data");

    InferenceResult result;
    result.loss_curve = loss_curve;
    result.theta_star = theta_star;
    int n_min = 0;
    int first = -1;
    for (int i = 0; i < grid.resolution; ++i) {
        if (loss_curve[i] <= loss_curve[best] + 1e-12) {
            ++n_min;
            if (first < 0) first = i;
        }
    }
    result.theta_hat = grid.value(first);  // ties break toward the smallest theta
    result.unique = n_min == 1;
    result.sq_error = (result.theta_hat - theta_star) * (result.theta_hat - theta_star);
    return result;
}

std::vector<std::pair<int, int>> sample_dataset(const TabularMdp& mdp,
                                                const PolicyFamily& pi_star, int theta_star_index,
                                                int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("dataset size must be at least 1");
    OccupancyMeasure w = occupancy(mdp, pi_star.slice(theta_star_index));
    std::mt19937_64 rng(seed);
    std::vector<std::pair<int, int>> data;
    data.reserve(n);
    for (int t = 0; t < n; ++t) {
        int s = sample_index(w.w, rng);
        int a = sample_index(pi_star.row(theta_star_index, s), rng);
        data.emplace_back(s, a);
    }
    return data;
}

ConcavityEstimate estimate_concavity(const PolicyFamily& pi) {
    const ThetaGrid& grid = pi.theta_grid;
    if (grid.resolution < 3)
        throw std::invalid_argument("concavity estimation needs theta resolution >= 3");
    const double dt2 = grid.spacing() * grid.spacing();
    ConcavityEstimate est;
    est.c_hat = kInf;
    for (int s = 0; s < pi.n_states; ++s) {
        for (int a = 0; a < pi.n_actions; ++a) {
            for (int i = 1; i + 1 < grid.resolution; ++i) {
                double lo = pi.prob(i - 1, s, a), mid = pi.prob(i, s, a), hi = pi.prob(i + 1, s, a);
                if (lo <= 0.0 || mid <= 0.0 || hi <= 0.0)
                    throw std::domain_error("zero policy probability: log-curvature undefined");
                double c = -(std::log(lo) - 2.0 * std::log(mid) + std::log(hi)) / dt2;
                if (c < est.c_hat - 1e-12) {
                    est.c_hat = c;
                    est.witnesses.assign(1, {s, a, i});
                } else if (c < est.c_hat + 1e-12 && est.witnesses.size() < 16) {
                    est.witnesses.emplace_back(s, a, i);
                }
            }
        }
    }
    return est;
}

double cor1_bound(double delta_p, int n_actions, double r_max, double gamma) {
    if (gamma >= 1.0) throw std::domain_error("cor1_bound requires gamma < 1");
    return 2.0 * n_actions * r_max * delta_p / ((1.0 - gamma) * (1.0 - gamma));
}

double cor2_bound(int n_actions, double r_max, double gamma_tilde, double gamma_star) {
    if (gamma_tilde <= 0.0 || gamma_tilde >= 1.0 || gamma_star <= 0.0 || gamma_star >= 1.0)
        throw std::domain_error("cor2_bound requires discounts in (0,1)");
    return 2.0 * n_actions * r_max * std::abs(gamma_tilde - gamma_star) /
           ((1.0 - gamma_tilde) * (1.0 - gamma_star));
}

std::optional<double> theorem2_bound(double c_hat, double d_weighted) {
    if (c_hat <= 0.0) return std::nullopt;
    return 2.0 / c_hat * d_weighted;
}

}  // namespace irlstab
