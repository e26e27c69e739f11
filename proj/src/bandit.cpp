#include "irlstab/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace irlstab {

namespace {

constexpr int kBallNodes = 129;  // fine trapezoid nodes per ball

double trapezoid_uniform(const std::vector<double>& ys, double h) {
    double sum = 0.0;
    for (double y : ys) sum += y;
    sum -= 0.5 * (ys.front() + ys.back());
    return sum * h;
}

struct Ball {
    double lo, hi;
    double length() const { return hi - lo; }
};

Ball clipped_ball(double center, double delta) {
    return {std::max(0.0, center - delta), std::min(1.0, center + delta)};
}

// Fine trapezoid integral of f over [lo, hi].
template <typename F>
double integrate_fine(F f, double lo, double hi) {
    if (hi <= lo) return 0.0;
    double h = (hi - lo) / (kBallNodes - 1);
    double sum = 0.5 * (f(lo) + f(hi));
    for (int k = 1; k + 1 < kBallNodes; ++k) sum += f(lo + k * h);
    return sum * h;
}

BanditDensity build_density(const BanditInstance& instance, bool boosted) {
    instance.check();
    BanditDensity d;
    d.instance = instance;
    d.boosted = boosted;
    const int T = instance.theta_resolution, M = instance.action_resolution;
    d.base_z.resize(T);
    d.ball_integral.resize(T);
    d.z.resize(T);
    d.values.resize(static_cast<std::size_t>(T) * M);

    std::vector<double> w(M);
    const double h = 1.0 / (M - 1);
    for (int ti = 0; ti < T; ++ti) {
        const double theta = instance.theta_value(ti);
        for (int j = 0; j < M; ++j) w[j] = std::exp(bandit_reward(instance.action_value(j), theta));
        d.base_z[ti] = trapezoid_uniform(w, h);
        double ball = 0.0;
        for (double a1 : instance.dataset) {
            Ball b = clipped_ball(a1, instance.delta);
            ball += integrate_fine(
                [&](double a) { return std::exp(bandit_reward(a, theta)); }, b.lo, b.hi);
        }
        d.ball_integral[ti] = ball;
        double factor = (boosted && theta < instance.theta_threshold) ? instance.boost : 1.0;
        d.z[ti] = d.base_z[ti] + (factor - 1.0) * ball;
        for (int j = 0; j < M; ++j) {
            double f = (factor != 1.0 && d.in_ball(instance.action_value(j))) ? factor : 1.0;
            d.values[static_cast<std::size_t>(ti) * M + j] = w[j] * f / d.z[ti];
        }
    }
    return d;
}

// Recompute the delta-dependent parts (ball integrals, normalizers, table
// entries inside balls) without re-evaluating the full weight table.
void rebuild_balls(BanditDensity& d, double delta) {
    d.instance.delta = delta;
    const BanditInstance& inst = d.instance;
    const int T = inst.theta_resolution, M = inst.action_resolution;
    for (int ti = 0; ti < T; ++ti) {
        const double theta = inst.theta_value(ti);
        double ball = 0.0;
        for (double a1 : inst.dataset) {
            Ball b = clipped_ball(a1, delta);
            ball += integrate_fine(
                [&](double a) { return std::exp(bandit_reward(a, theta)); }, b.lo, b.hi);
        }
        d.ball_integral[ti] = ball;
        double factor = (d.boosted && theta < inst.theta_threshold) ? inst.boost : 1.0;
        d.z[ti] = d.base_z[ti] + (factor - 1.0) * ball;
        // Unboosted slices keep z = base_z, so their table rows are unchanged.
        if (factor == 1.0) continue;
        for (int j = 0; j < M; ++j) {
            double a = inst.action_value(j);
            double f = d.in_ball(a) ? factor : 1.0;
            double base = std::exp(bandit_reward(a, theta));
            d.values[static_cast<std::size_t>(ti) * M + j] = base * f / d.z[ti];
        }
    }
}

}  // namespace

void BanditInstance::check() const {
    if (action_resolution < 1024)
        throw std::invalid_argument("action grid resolution must be at least 1024");
    if (theta_resolution < 2) throw std::invalid_argument("theta grid resolution must be >= 2");
    if (theta_lower <= 0.0 || theta_upper >= 1.0 || theta_lower >= theta_upper)
        throw std::invalid_argument("theta grid must lie strictly inside (0,1)");
    if (delta <= 0.0 || delta >= 0.5)
        throw std::invalid_argument("ball half-width must lie in (0, 0.5)");
    if (boost < 1.0) throw std::invalid_argument("boost must be >= 1");
    if (dataset.empty()) throw std::invalid_argument("dataset must be nonempty");
    for (double a : dataset)
        if (a < 0.0 || a > 1.0) throw std::invalid_argument("dataset actions must lie in [0,1]");
}

double bandit_reward(double a, double theta) {
    if (a < 0.0 || a > 1.0) throw std::domain_error("action outside [0,1]");
    if (theta < 0.0 || theta > 1.0) throw std::domain_error("theta outside [0,1]");
    // pow(0,0) == 1 covers the boundary convention
    return std::pow(a, theta) * std::pow(1.0 - a, 1.0 - theta);
}

bool BanditDensity::slice_boosted(int theta_index) const {
    return boosted && instance.theta_value(theta_index) < instance.theta_threshold;
}

bool BanditDensity::in_ball(double a) const {
    for (double a1 : instance.dataset) {
        Ball b = clipped_ball(a1, instance.delta);
        if (a >= b.lo && a <= b.hi) return true;
    }
    return false;
}

double BanditDensity::density(int theta_index, double a) const {
    double w = std::exp(bandit_reward(a, instance.theta_value(theta_index)));
    double factor = (slice_boosted(theta_index) && in_ball(a)) ? instance.boost : 1.0;
    return w * factor / z[theta_index];
}

double BanditDensity::ball_mass(int theta_index) const {
    double factor = slice_boosted(theta_index) ? instance.boost : 1.0;
    return factor * ball_integral[theta_index] / z[theta_index];
}

double BanditDensity::slice_integral(int theta_index) const {
    const int M = instance.action_resolution;
    const double h = 1.0 / (M - 1);
    // Uniform-grid trapezoid of the unboosted part, with each elementary cell
    // clipped against the balls, plus fine integration inside the balls.
    double outside = 0.0;
    const double theta = instance.theta_value(theta_index);
    auto base = [&](double a) { return std::exp(bandit_reward(a, theta)) / z[theta_index]; };
    for (int j = 0; j + 1 < M; ++j) {
        double x0 = instance.action_value(j), x1 = instance.action_value(j + 1);
        double removed = 0.0;
        for (double a1 : instance.dataset) {
            Ball b = clipped_ball(a1, instance.delta);
            removed += std::max(0.0, std::min(x1, b.hi) - std::max(x0, b.lo));
        }
        outside += 0.5 * (base(x0) + base(x1)) * (h - removed);
    }
    double inside = 0.0;
    for (double a1 : instance.dataset) {
        Ball b = clipped_ball(a1, instance.delta);
        inside += integrate_fine([&](double a) { return density(theta_index, a); }, b.lo, b.hi);
    }
    return outside + inside;
}

double BanditDensity::log_likelihood(int theta_index, double a_obs) const {
    Ball b = clipped_ball(a_obs, instance.delta);
    double mass = integrate_fine([&](double a) { return density(theta_index, a); }, b.lo, b.hi);
    return std::log(mass / b.length());
}

BanditDensity build_model_density(const BanditInstance& instance) {
    return build_density(instance, false);
}

BanditDensity build_adversarial_density(const BanditInstance& instance) {
    return build_density(instance, true);
}

double bandit_slice_kl(const BanditDensity& p, const BanditDensity& q, int theta_index) {
    if (p.instance.action_resolution != q.instance.action_resolution ||
        p.instance.theta_resolution != q.instance.theta_resolution)
        throw std::invalid_argument("bandit densities have mismatched grids");
    double fp = p.slice_boosted(theta_index) ? p.instance.boost : 1.0;
    double fq = q.slice_boosted(theta_index) ? q.instance.boost : 1.0;
    if (fp == fq) return 0.0;  // identical slices (shared base weights)
    double kl = std::log(q.z[theta_index] / p.z[theta_index]) +
                p.ball_mass(theta_index) * std::log(fp / fq);
    return std::max(kl, 0.0);
}

double bandit_worstcase_kl(const BanditDensity& p, const BanditDensity& q) {
    double worst = 0.0;
    for (int ti = 0; ti < p.instance.theta_resolution; ++ti)
        worst = std::max(worst, bandit_slice_kl(p, q, ti));
    return worst;
}

BanditDemoReport run_demo(BanditInstance instance, double epsilon) {
    if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
    BanditDensity model = build_model_density(instance);
    BanditDensity adv = build_adversarial_density(instance);

    double delta = instance.delta;
    double d_wc = bandit_worstcase_kl(adv, model);
    int budget = 200;
    while (d_wc >= epsilon) {
        if (--budget == 0)
            throw std::runtime_error("no admissible delta found within the bisection budget");
        delta *= 0.5;
        rebuild_balls(adv, delta);
        rebuild_balls(model, delta);
        d_wc = bandit_worstcase_kl(adv, model);
    }

    auto mle = [&](const BanditDensity& d) {
        int best = 0;
        double best_ll = -std::numeric_limits<double>::infinity();
        for (int ti = 0; ti < instance.theta_resolution; ++ti) {
            double ll = 0.0;
            for (double a1 : instance.dataset) ll += d.log_likelihood(ti, a1);
            if (ll > best_ll) {
                best_ll = ll;
                best = ti;
            }
        }
        return instance.theta_value(best);
    };

    BanditDemoReport report;
    report.epsilon = epsilon;
    report.delta_used = delta;
    report.d_wc = d_wc;
    report.theta_star = mle(adv);
    report.theta_hat = mle(model);
    report.sq_error =
        (report.theta_hat - report.theta_star) * (report.theta_hat - report.theta_star);
    report.diameter_bound_ok = report.sq_error > 0.5 * instance.theta_diameter_sq();
    return report;
}

double bandit_concavity(const BanditDensity& density) {
    const BanditInstance& inst = density.instance;
    const double dt = (inst.theta_upper - inst.theta_lower) / (inst.theta_resolution - 1);
    double c_hat = std::numeric_limits<double>::infinity();
    for (int j = 0; j < inst.action_resolution; ++j) {
        for (int ti = 1; ti + 1 < inst.theta_resolution; ++ti) {
            double lo = density.table(ti - 1, j), mid = density.table(ti, j),
                   hi = density.table(ti + 1, j);
            double c = -(std::log(lo) - 2.0 * std::log(mid) + std::log(hi)) / (dt * dt);
            c_hat = std::min(c_hat, c);
        }
    }
    return c_hat;
}

}  // namespace irlstab
