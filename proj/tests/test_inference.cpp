#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>

#include "irlstab/bias.hpp"
#include "irlstab/inference.hpp"
#include "irlstab/sweep.hpp"

using namespace irlstab;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

PolicyFamily make_family(int n_states, int n_actions, const ThetaGrid& grid,
                         std::vector<double> probs) {
    PolicyFamily f;
    f.n_states = n_states;
    f.n_actions = n_actions;
    f.theta_grid = grid;
    f.probs = std::move(probs);
    return f;
}
}  // namespace

TEST_CASE("discrete KL closed forms") {
    std::vector<double> p = {0.5, 0.5}, q = {0.25, 0.75};
    CHECK(kl_discrete(p, p) == 0.0);
    CHECK(kl_discrete(p, q) ==
          doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)).epsilon(1e-12));
    CHECK(kl_discrete(p, q) == doctest::Approx(0.14384).epsilon(1e-4));
    std::vector<double> point = {1.0, 0.0};
    CHECK(kl_discrete(p, point) == kInf);
    CHECK(kl_discrete(point, p) == doctest::Approx(std::log(2.0)));

    std::vector<double> bad = {0.6, 0.3};
    CHECK_THROWS_AS(kl_discrete(bad, p), std::domain_error);
    std::vector<double> neg = {1.2, -0.2};
    CHECK_THROWS_AS(kl_discrete(neg, p), std::domain_error);
}

TEST_CASE("KL is nonnegative and zero iff equal") {
    std::vector<std::vector<double>> dists = {
        {0.2, 0.3, 0.5}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, {0.9, 0.05, 0.05}};
    for (const auto& p : dists)
        for (const auto& q : dists) {
            double kl = kl_discrete(p, q);
            CHECK(kl >= 0.0);
            if (p == q) CHECK(kl == 0.0);
            else CHECK(kl > 1e-12);
        }
}

TEST_CASE("weighted divergence definition on two states") {
    ThetaGrid grid{1.0, 2.0, 2};
    auto star = make_family(2, 2, grid, {0.5, 0.5, 0.9, 0.1, 0.5, 0.5, 0.9, 0.1});
    auto tilde = make_family(2, 2, grid, {0.25, 0.75, 0.6, 0.4, 0.25, 0.75, 0.6, 0.4});
    OccupancyMeasure w{{0.5, 0.5}};
    double k1 = kl_discrete(std::vector<double>{0.5, 0.5}, std::vector<double>{0.25, 0.75});
    double k2 = kl_discrete(std::vector<double>{0.9, 0.1}, std::vector<double>{0.6, 0.4});
    std::vector<double> per_state;
    double d = weighted_divergence(star, tilde, w, 0, &per_state);
    CHECK(d == doctest::Approx((k1 + k2) / 2).epsilon(1e-14));
    CHECK(per_state[0] == doctest::Approx(k1));
    CHECK(per_state[1] == doctest::Approx(k2));
    CHECK(weighted_divergence(star, star, w, 0) == 0.0);
}

TEST_CASE("weighted divergence matches a brute-force summation on environment A") {
    GridLayout layout = builtin_layout("A");
    auto [mdp, reward] = build_gridworld(layout);
    auto pi_tilde = policy_family(mdp, reward);
    TabularMdp biased = apply_bias(mdp, layout, BiasSpec::transition_slip(0.0));
    auto pi_star = policy_family(biased, reward);
    int idx = reward.theta_grid.index_of(3.0);
    auto w = occupancy(biased, pi_star.slice(idx));

    double brute = 0.0;
    for (int s = 0; s < mdp.n_states; ++s) {
        double kl = 0.0;
        for (int a = 0; a < mdp.n_actions; ++a) {
            double ps = pi_star.prob(idx, s, a);
            kl += ps * std::log(ps / pi_tilde.prob(idx, s, a));
        }
        brute += w.w[s] * kl;
    }
    double d = weighted_divergence(pi_star, pi_tilde, w, idx);
    CHECK(d == doctest::Approx(brute).epsilon(1e-12));
    CHECK(d > 0.0);
    CHECK(worstcase_divergence(pi_star, pi_tilde) >= d);
}

TEST_CASE("worst-case divergence picks out a single perturbed pair") {
    ThetaGrid grid{1.0, 2.0, 2};
    auto base = make_family(2, 2, grid, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5});
    auto other = base;
    other.probs[4] = 0.8;  // theta slice 1, state 0
    other.probs[5] = 0.2;
    CHECK(worstcase_divergence(base, base) == 0.0);
    double expected = kl_discrete(std::vector<double>{0.5, 0.5}, std::vector<double>{0.8, 0.2});
    CHECK(worstcase_divergence(base, other) == doctest::Approx(expected));
}

TEST_CASE("expected NLL of a uniform model is ln(number of actions)") {
    GridLayout layout = builtin_layout("A");
    auto [mdp, reward] = build_gridworld(layout, ThetaGrid{1.0, 4.0, 4});
    auto pi_star = policy_family(mdp, reward);
    PolicyFamily uniform = pi_star;
    for (auto& v : uniform.probs) v = 0.2;
    auto w = occupancy(mdp, pi_star.slice(0));
    for (int i = 0; i < 4; ++i)
        CHECK(expected_nll(uniform, pi_star, w, 0, i) == doctest::Approx(std::log(5.0)).epsilon(1e-12));
}

TEST_CASE("Gibbs inequality: self-model loss is minimized at theta*") {
    GridLayout layout = builtin_layout("B");
    auto [mdp, reward] = build_gridworld(layout, ThetaGrid{1.0, 4.0, 16});
    auto family = policy_family(mdp, reward);
    int idx = 10;
    auto w = occupancy(mdp, family.slice(idx));
    double at_star = expected_nll(family, family, w, idx, idx);
    for (int i = 0; i < 16; ++i) {
        double nll = expected_nll(family, family, w, idx, i);
        CHECK(nll >= at_star - 1e-12);
    }
}

TEST_CASE("unbiased exact recovery of theta*") {
    GridLayout layout = builtin_layout("A");
    auto [mdp, reward] = build_gridworld(layout);
    auto family = policy_family(mdp, reward);
    int idx = reward.theta_grid.index_of(3.0);
    auto w = occupancy(mdp, family.slice(idx));
    std::vector<double> curve(reward.theta_grid.resolution);
    for (int i = 0; i < reward.theta_grid.resolution; ++i)
        curve[i] = expected_nll(family, family, w, idx, i);
    auto result = mle_infer(curve, reward.theta_grid, 3.0);
    CHECK(result.theta_hat == 3.0);
    CHECK(result.sq_error == 0.0);
    CHECK(result.unique);
}

TEST_CASE("MLE tie-breaking and failure modes") {
    ThetaGrid grid{0.0, 1.0, 5};
    auto r = mle_infer({3.0, 1.0, 2.0, 4.0, 5.0}, grid, 0.25);
    CHECK(r.theta_hat == doctest::Approx(0.25));
    CHECK(r.unique);
    CHECK(r.sq_error == doctest::Approx(0.0));

    auto tie = mle_infer({1.0, 1.0, 1.0, 1.0, 1.0}, grid, 0.5);
    CHECK(tie.theta_hat == 0.0);  // smallest grid point
    CHECK(!tie.unique);

    auto partial = mle_infer({kInf, 2.0, kInf, kInf, kInf}, grid, 0.25);
    CHECK(partial.theta_hat == doctest::Approx(0.25));
    CHECK_THROWS_AS(mle_infer({kInf, kInf, kInf, kInf, kInf}, grid, 0.5), std::runtime_error);
}

TEST_CASE("dataset sampling is seeded and matches the occupancy") {
    GridLayout layout = builtin_layout("A");
    auto [mdp, reward] = build_gridworld(layout, ThetaGrid{1.0, 4.0, 4});
    auto family = policy_family(mdp, reward);
    auto d1 = sample_dataset(mdp, family, 2, 500, 42);
    auto d2 = sample_dataset(mdp, family, 2, 500, 42);
    CHECK(d1 == d2);
    auto d3 = sample_dataset(mdp, family, 2, 500, 43);
    CHECK(d1 != d3);

    auto w = occupancy(mdp, family.slice(2));
    auto big = sample_dataset(mdp, family, 2, 100000, 1);
    std::vector<double> freq(mdp.n_states, 0.0);
    for (auto [s, a] : big) freq[s] += 1.0 / big.size();
    double tv = 0.0;
    for (int s = 0; s < mdp.n_states; ++s) tv += std::abs(freq[s] - w.w[s]);
    CHECK(tv / 2 < 0.02);
}

TEST_CASE("point-mass occupancy and policy force the dataset") {
    TabularMdp mdp;
    mdp.n_states = 1;
    mdp.n_actions = 2;
    mdp.gamma = 0.5;
    mdp.transition = {1.0, 1.0};
    mdp.initial_dist = {1.0};
    mdp.absorbing = {1};
    auto family = make_family(1, 2, ThetaGrid{0.0, 1.0, 2}, {1.0, 0.0, 1.0, 0.0});
    auto data = sample_dataset(mdp, family, 0, 1, 9);
    REQUIRE(data.size() == 1);
    CHECK(data[0].first == 0);
    CHECK(data[0].second == 0);
}

TEST_CASE("concavity estimator on synthetic families") {
    auto quad = estimate_concavity(quadratic_family());
    CHECK(quad.c_hat == doctest::Approx(2.0).epsilon(1e-9));

    auto kinked = estimate_concavity(kinked_preference_family());
    CHECK(kinked.c_hat < 0.0);
    REQUIRE(!kinked.witnesses.empty());
    // the violation sits at the kink of max(theta, 10-theta)
    auto [s, a, i] = kinked.witnesses.front();
    CHECK(kinked_preference_family().theta_grid.value(i) == doctest::Approx(5.0).epsilon(0.02));

    // log pi affine in theta -> zero curvature
    ThetaGrid grid{0.0, 1.0, 11};
    PolicyFamily affine = make_family(1, 1, grid, {});
    affine.probs.resize(11);
    for (int i = 0; i < 11; ++i) affine.probs[i] = std::exp(0.3 * grid.value(i) - 1.0);
    CHECK(estimate_concavity(affine).c_hat == doctest::Approx(0.0).epsilon(1e-9));

    PolicyFamily zero = affine;
    zero.probs[5] = 0.0;
    CHECK_THROWS_AS(estimate_concavity(zero), std::domain_error);
    PolicyFamily tiny = affine;
    tiny.theta_grid.resolution = 2;
    tiny.probs.resize(2);
    CHECK_THROWS_AS(estimate_concavity(tiny), std::invalid_argument);
}

TEST_CASE("corollary bound arithmetic") {
    CHECK(cor1_bound(0.0, 5, 4.0, 0.98) == 0.0);
    CHECK(cor1_bound(0.2, 5, 4.0, 0.98) == doctest::Approx(20000.0).epsilon(1e-9));
    CHECK_THROWS_AS(cor1_bound(0.1, 5, 4.0, 1.0), std::domain_error);

    CHECK(cor2_bound(5, 4.0, 0.98, 0.98) == 0.0);
    CHECK(cor2_bound(5, 4.0, 0.98, 0.5) == doctest::Approx(1920.0).epsilon(1e-9));
    CHECK_THROWS_AS(cor2_bound(5, 4.0, 1.2, 0.5), std::domain_error);
}

TEST_CASE("theorem-2 bound guard") {
    auto b = theorem2_bound(2.0, 0.1);
    REQUIRE(b.has_value());
    CHECK(*b == doctest::Approx(0.1));
    CHECK(!theorem2_bound(0.0, 0.1).has_value());
    CHECK(!theorem2_bound(-1.0, 0.1).has_value());
    CHECK(*theorem2_bound(2.0, 0.0) == 0.0);
}

TEST_CASE("conditional stability holds on a strongly log-concave synthetic family") {
    // Softmax over scored actions with quadratic preference -(a - theta)^2 / 2:
    // every log-probability has curvature bounded away from zero on this range.
    const int K = 9;
    ThetaGrid grid{2.0, 6.0, 81};
    auto build = [&](double tilt) {
        PolicyFamily f;
        f.n_states = 1;
        f.n_actions = K;
        f.theta_grid = grid;
        f.probs.resize(static_cast<std::size_t>(grid.resolution) * K);
        for (int i = 0; i < grid.resolution; ++i) {
            double theta = grid.value(i);
            double m = -1e300;
            std::vector<double> q(K);
            for (int a = 0; a < K; ++a) {
                q[a] = -0.5 * (a - theta) * (a - theta) + tilt * a;
                m = std::max(m, q[a]);
            }
            double z = 0.0;
            for (int a = 0; a < K; ++a) z += std::exp(q[a] - m);
            for (int a = 0; a < K; ++a) f.probs[i * K + a] = std::exp(q[a] - m) / z;
        }
        return f;
    };
    PolicyFamily pi_tilde = build(0.0);
    PolicyFamily pi_star = build(0.05);  // mildly misspecified demonstrator
    double c_star = estimate_concavity(pi_star).c_hat;
    double c_tilde = estimate_concavity(pi_tilde).c_hat;
    REQUIRE(c_star > 0.0);
    REQUIRE(c_tilde > 0.0);
    double c = std::min(c_star, c_tilde);

    OccupancyMeasure w{{1.0}};
    int idx = grid.index_of(4.0);
    double d_w = weighted_divergence(pi_star, pi_tilde, w, idx);
    std::vector<double> curve(grid.resolution);
    for (int i = 0; i < grid.resolution; ++i)
        curve[i] = expected_nll(pi_tilde, pi_star, w, idx, i);
    double sq_error = mle_infer(curve, grid, 4.0).sq_error;
    auto bound = theorem2_bound(c, d_w);
    REQUIRE(bound.has_value());
    CHECK(sq_error <= *bound + 1e-9);
}
