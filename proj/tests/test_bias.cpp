#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "irlstab/bias.hpp"

using namespace irlstab;

TEST_CASE("bias spec range checks") {
    CHECK_THROWS_AS(BiasSpec::transition_slip(1.0).check(), std::invalid_argument);
    CHECK_THROWS_AS(BiasSpec::power_sharpen(0.5).check(), std::invalid_argument);
    CHECK_THROWS_AS(BiasSpec::myopia(1.0).check(), std::invalid_argument);
    CHECK_NOTHROW(BiasSpec::none().check());
    CHECK_NOTHROW(BiasSpec::transition_slip(0.0).check());
}

TEST_CASE("no bias returns an identical MDP") {
    GridLayout layout = builtin_layout("A");
    auto [mdp, reward] = build_gridworld(layout);
    TabularMdp out = apply_bias(mdp, layout, BiasSpec::none());
    CHECK(out.transition == mdp.transition);
    CHECK(out.gamma == mdp.gamma);
}

TEST_CASE("transition slip bias rebuilds the world with the believed slip") {
    GridLayout layout = builtin_layout("A");
    auto [mdp, reward] = build_gridworld(layout);
    TabularMdp believed = apply_bias(mdp, layout, BiasSpec::transition_slip(0.1));
    GridLayout direct = layout;
    direct.slip_prob = 0.1;
    CHECK(believed.transition == build_gridworld(direct).first.transition);
    CHECK(validate(believed).ok());
}

TEST_CASE("power sharpening arithmetic") {
    TabularMdp mdp;
    mdp.n_states = 2;
    mdp.n_actions = 1;
    mdp.gamma = 0.9;
    mdp.transition = {0.7, 0.3, 0.0, 1.0};
    mdp.initial_dist = {1.0, 0.0};
    mdp.absorbing = {0, 1};
    GridLayout unused;  // only transition-slip biases consult the layout

    TabularMdp identity = apply_bias(mdp, unused, BiasSpec::power_sharpen(1.0));
    CHECK(identity.p(0, 0, 0) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(identity.p(0, 0, 1) == doctest::Approx(0.3).epsilon(1e-15));

    TabularMdp squared = apply_bias(mdp, unused, BiasSpec::power_sharpen(2.0));
    CHECK(squared.p(0, 0, 0) == doctest::Approx(0.49 / 0.58).epsilon(1e-12));
    CHECK(squared.p(0, 0, 1) == doctest::Approx(0.09 / 0.58).epsilon(1e-12));

    TabularMdp sharp = apply_bias(mdp, unused, BiasSpec::power_sharpen(64.0));
    CHECK(sharp.p(0, 0, 0) > 1.0 - 1e-9);
}

TEST_CASE("power sharpening keeps rows stochastic on a gridworld") {
    GridLayout layout = builtin_layout("B");
    auto [mdp, reward] = build_gridworld(layout);
    for (double n : {1.5, 4.0, 32.0}) {
        TabularMdp out = apply_bias(mdp, layout, BiasSpec::power_sharpen(n));
        CHECK(validate(out).ok());
    }
}

TEST_CASE("power sharpening preserves argmax ties proportionally") {
    TabularMdp mdp;
    mdp.n_states = 2;
    mdp.n_actions = 1;
    mdp.gamma = 0.9;
    mdp.transition = {0.5, 0.5, 0.0, 1.0};
    mdp.initial_dist = {1.0, 0.0};
    mdp.absorbing = {0, 1};
    GridLayout unused;
    TabularMdp out = apply_bias(mdp, unused, BiasSpec::power_sharpen(16.0));
    CHECK(out.p(0, 0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(out.p(0, 0, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("myopia only replaces the discount") {
    GridLayout layout = builtin_layout("A");
    auto [mdp, reward] = build_gridworld(layout);
    TabularMdp out = apply_bias(mdp, layout, BiasSpec::myopia(0.5));
    CHECK(out.gamma == doctest::Approx(0.5));
    CHECK(out.transition == mdp.transition);
}

TEST_CASE("transition gap basics") {
    TabularMdp a;
    a.n_states = 2;
    a.n_actions = 1;
    a.gamma = 0.9;
    a.transition = {1.0, 0.0, 0.0, 1.0};
    a.initial_dist = {1.0, 0.0};
    a.absorbing = {0, 0};
    TabularMdp b = a;
    CHECK(transition_gap(a, b) == 0.0);
    b.transition = {0.0, 1.0, 0.0, 1.0};
    CHECK(transition_gap(a, b) == doctest::Approx(2.0));

    TabularMdp c = a;
    c.n_states = 1;
    c.n_actions = 1;
    c.transition = {1.0};
    CHECK_THROWS_AS(transition_gap(a, c), std::invalid_argument);
}

TEST_CASE("slip gridworld gap has the closed form 2|p1 - p2|") {
    GridLayout layout = builtin_layout("A");
    auto mdp03 = build_gridworld(layout).first;
    layout.slip_prob = 0.2;
    auto mdp02 = build_gridworld(layout).first;
    CHECK(transition_gap(mdp03, mdp02) == doctest::Approx(0.2).epsilon(1e-12));
    layout.slip_prob = 0.0;
    auto mdp00 = build_gridworld(layout).first;
    CHECK(transition_gap(mdp03, mdp00) == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("transition gap behaves like a metric on slip worlds") {
    GridLayout layout = builtin_layout("C");
    auto make = [&](double slip) {
        GridLayout l = layout;
        l.slip_prob = slip;
        return build_gridworld(l).first;
    };
    TabularMdp x = make(0.3), y = make(0.15), z = make(0.05);
    CHECK(transition_gap(x, y) == doctest::Approx(transition_gap(y, x)).epsilon(1e-15));
    CHECK(transition_gap(x, x) == 0.0);
    CHECK(transition_gap(x, z) <= transition_gap(x, y) + transition_gap(y, z) + 1e-12);
}
