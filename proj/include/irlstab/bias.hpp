#pragma once

#include "irlstab/mdp.hpp"

namespace irlstab {

// Structured demonstrator irrationalities: a misbelieved slip probability,
// illusion-of-control sharpening of transition rows, or a myopic discount.
struct BiasSpec {
    enum class Kind { None, TransitionSlip, PowerSharpen, Myopia };
    Kind kind = Kind::None;
    double value = 0.0;  // believed slip, exponent n, or believed gamma

    static BiasSpec none() { return {Kind::None, 0.0}; }
    static BiasSpec transition_slip(double believed_slip) {
        return {Kind::TransitionSlip, believed_slip};
    }
    static BiasSpec power_sharpen(double n) { return {Kind::PowerSharpen, n}; }
    static BiasSpec myopia(double believed_gamma) { return {Kind::Myopia, believed_gamma}; }

    void check() const;
};

TabularMdp apply_bias(const TabularMdp& mdp, const GridLayout& layout, const BiasSpec& spec);

// Delta_P: max over (s,a) of the L1 distance between transition rows.
double transition_gap(const TabularMdp& p_true, const TabularMdp& p_believed);

}  // namespace irlstab
