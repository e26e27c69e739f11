#include "irlstab/bias.hpp"

#include <cmath>
#include <stdexcept>

namespace irlstab {

void BiasSpec::check() const {
    switch (kind) {
        case Kind::None:
            break;
        case Kind::TransitionSlip:
            if (value < 0.0 || value >= 1.0)
                throw std::invalid_argument("believed slip must lie in [0,1)");
            break;
        case Kind::PowerSharpen:
            if (value < 1.0) throw std::invalid_argument("sharpening exponent must satisfy n >= 1");
            break;
        case Kind::Myopia:
            if (value <= 0.0 || value >= 1.0)
                throw std::invalid_argument("believed gamma must lie in (0,1)");
            break;
    }
}

TabularMdp apply_bias(const TabularMdp& mdp, const GridLayout& layout, const BiasSpec& spec) {
    spec.check();
    switch (spec.kind) {
        case BiasSpec::Kind::None:
            return mdp;
        case BiasSpec::Kind::TransitionSlip: {
            GridLayout believed = layout;
            believed.slip_prob = spec.value;
            return build_gridworld(believed).first;
        }
        case BiasSpec::Kind::PowerSharpen: {
            TabularMdp out = mdp;
            const int S = mdp.n_states, A = mdp.n_actions;
            for (int s = 0; s < S; ++s) {
                for (int a = 0; a < A; ++a) {
                    double sum = 0.0;
                    for (int s2 = 0; s2 < S; ++s2) {
                        double v = std::pow(mdp.p(s, a, s2), spec.value);
                        out.p(s, a, s2) = v;
                        sum += v;
                    }
                    if (!(sum > 0.0))
                        throw std::runtime_error("power sharpening produced an all-zero row");
                    for (int s2 = 0; s2 < S; ++s2) out.p(s, a, s2) /= sum;
                }
            }
            return out;
        }
        case BiasSpec::Kind::Myopia: {
            TabularMdp out = mdp;
            out.gamma = spec.value;
            return out;
        }
    }
    throw std::logic_error("unreachable bias kind");
}

double transition_gap(const TabularMdp& p_true, const TabularMdp& p_believed) {
    if (p_true.n_states != p_believed.n_states || p_true.n_actions != p_believed.n_actions)
        throw std::invalid_argument("transition_gap requires matching MDP shapes");
    double gap = 0.0;
    const int S = p_true.n_states, A = p_true.n_actions;
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            double l1 = 0.0;
            for (int s2 = 0; s2 < S; ++s2)
                l1 += std::abs(p_true.p(s, a, s2) - p_believed.p(s, a, s2));
            gap = std::max(gap, l1);
        }
    return gap;
}

}  // namespace irlstab
