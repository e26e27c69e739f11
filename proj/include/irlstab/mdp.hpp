#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace irlstab {

// Tabular MDP with dense row-stochastic transitions.
// transition is indexed (s * n_actions + a) * n_states + s'.
struct TabularMdp {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> transition;
    double gamma = 0.0;
    std::vector<double> initial_dist;
    std::vector<char> absorbing;

    double p(int s, int a, int s2) const {
        return transition[static_cast<std::size_t>(s * n_actions + a) * n_states + s2];
    }
    double& p(int s, int a, int s2) {
        return transition[static_cast<std::size_t>(s * n_actions + a) * n_states + s2];
    }
};

enum class CellRole { Start, Goal, Waypoint, Lava, Wall, Empty };

char role_char(CellRole r);
CellRole role_from_char(char c);

// Rectangular grid, row-major, row 0 at the top.
struct GridLayout {
    int width = 0;
    int height = 0;
    std::vector<CellRole> cells;
    double slip_prob = 0.0;
    double gamma = 0.98;

    CellRole cell(int x, int y) const { return cells[y * width + x]; }
    int state_index(int x, int y) const { return y * width + x; }

    // Text format: header line "slip=<float> gamma=<float>", then one row of
    // cell characters per line (S/G/W/L/#/.).
    static GridLayout parse(const std::string& text);
    std::string to_text() const;
};

// Builtin 8x4 environments; id is "A", "B" or "C".
GridLayout builtin_layout(const std::string& id);

struct ThetaGrid {
    double lower = 1.0;
    double upper = 4.0;
    int resolution = 64;

    double value(int i) const {
        return lower + static_cast<double>(i) * (upper - lower) / (resolution - 1);
    }
    double spacing() const { return (upper - lower) / (resolution - 1); }
    // Index of the grid point closest to theta; throws if theta is not on the
    // grid within 1e-9.
    int index_of(double theta) const;
};

// One scalar parameter theta: goal pays theta per step, waypoint pays 1,
// everything else 0. Rewards are action-independent.
struct RewardModel {
    std::vector<CellRole> role;
    ThetaGrid theta_grid;
    double r_max = 0.0;

    double value(int state, int action, double theta) const;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// Gridworld actions, in this order.
enum GridAction { kUp = 0, kDown = 1, kLeft = 2, kRight = 3, kStay = 4 };
inline constexpr int kNumGridActions = 5;

std::pair<TabularMdp, RewardModel> build_gridworld(const GridLayout& layout,
                                                   const ThetaGrid& theta_grid = ThetaGrid{});

ValidationReport validate(const TabularMdp& mdp);

}  // namespace irlstab
