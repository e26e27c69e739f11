#include "irlstab/mdp.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace irlstab {

char role_char(CellRole r) {
    switch (r) {
        case CellRole::Start: return 'S';
        case CellRole::Goal: return 'G';
        case CellRole::Waypoint: return 'W';
        case CellRole::Lava: return 'L';
        case CellRole::Wall: return '#';
        case CellRole::Empty: return '.';
    }
    return '?';
}

CellRole role_from_char(char c) {
    switch (c) {
        case 'S': return CellRole::Start;
        case 'G': return CellRole::Goal;
        case 'W': return CellRole::Waypoint;
        case 'L': return CellRole::Lava;
        case '#': return CellRole::Wall;
        case '.': return CellRole::Empty;
    }
    throw std::invalid_argument(std::string("unknown layout cell character '") + c + "'");
}

namespace {
void check_layout(const GridLayout& layout);
}  // namespace

GridLayout GridLayout::parse(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    GridLayout layout;
    bool have_header = false;
    std::vector<std::string> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!have_header) {
            double slip = -1.0, gamma = -1.0;
            if (std::sscanf(line.c_str(), "slip=%lf gamma=%lf", &slip, &gamma) != 2)
                throw std::invalid_argument("layout header must be 'slip=<float> gamma=<float>'");
            layout.slip_prob = slip;
            layout.gamma = gamma;
            have_header = true;
            continue;
        }
        rows.push_back(line);
    }
    if (!have_header) throw std::invalid_argument("layout text is missing the header line");
    if (rows.empty()) throw std::invalid_argument("layout text has no grid rows");
    layout.height = static_cast<int>(rows.size());
    layout.width = static_cast<int>(rows[0].size());
    for (const auto& r : rows)
        if (static_cast<int>(r.size()) != layout.width)
            throw std::invalid_argument("layout rows have inconsistent widths");
    layout.cells.reserve(static_cast<std::size_t>(layout.width) * layout.height);
    for (const auto& r : rows)
        for (char c : r) layout.cells.push_back(role_from_char(c));
    check_layout(layout);
    return layout;
}

std::string GridLayout::to_text() const {
    std::ostringstream out;
    out << "slip=" << slip_prob << " gamma=" << gamma << "\n";
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) out << role_char(cell(x, y));
        out << "\n";
    }
    return out.str();
}

GridLayout builtin_layout(const std::string& id) {
    static const char* kEnvA =
        "slip=0.3 gamma=0.98\n"
        "S......G\n"
        ".####...\n"
        ".W...L..\n"
        "........\n";
    static const char* kEnvB =
        "slip=0.3 gamma=0.98\n"
        "S......G\n"
        ".####...\n"
        ".....L..\n"
        "...W....\n";
    static const char* kEnvC =
        "slip=0.3 gamma=0.98\n"
        "S......G\n"
        ".####...\n"
        ".....L..\n"
        "......W.\n";
    if (id == "A") return GridLayout::parse(kEnvA);
    if (id == "B") return GridLayout::parse(kEnvB);
    if (id == "C") return GridLayout::parse(kEnvC);
    throw std::invalid_argument("unknown builtin layout '" + id + "' (expected A, B or C)");
}

int ThetaGrid::index_of(double theta) const {
    double pos = (theta - lower) / spacing();
    int i = static_cast<int>(std::lround(pos));
    if (i < 0 || i >= resolution || std::abs(value(i) - theta) > 1e-9)
        throw std::invalid_argument("theta is not a point of the theta grid");
    return i;
}

double RewardModel::value(int state, int /*action*/, double theta) const {
    if (theta < theta_grid.lower - 1e-12 || theta > theta_grid.upper + 1e-12)
        throw std::domain_error("theta outside the theta grid range");
    switch (role[state]) {
        case CellRole::Goal: return theta;
        case CellRole::Waypoint: return 1.0;
        default: return 0.0;
    }
}

namespace {

void check_layout(const GridLayout& layout) {
    if (layout.width <= 0 || layout.height <= 0)
        throw std::invalid_argument("layout must have positive dimensions");
    if (layout.slip_prob < 0.0 || layout.slip_prob >= 1.0)
        throw std::invalid_argument("slip_prob must lie in [0,1)");
    if (layout.gamma <= 0.0 || layout.gamma >= 1.0)
        throw std::invalid_argument("gamma must lie in (0,1)");
    int starts = 0, goals = 0, waypoints = 0;
    for (CellRole r : layout.cells) {
        starts += r == CellRole::Start;
        goals += r == CellRole::Goal;
        waypoints += r == CellRole::Waypoint;
    }
    if (starts != 1) throw std::invalid_argument("layout must have exactly one start cell");
    if (goals != 1) throw std::invalid_argument("layout must have exactly one goal cell");
    if (waypoints != 1) throw std::invalid_argument("layout must have exactly one waypoint cell");
}

}  // namespace

std::pair<TabularMdp, RewardModel> build_gridworld(const GridLayout& layout,
                                                   const ThetaGrid& theta_grid) {
    check_layout(layout);
    if (theta_grid.resolution < 2 || theta_grid.upper <= theta_grid.lower)
        throw std::invalid_argument("theta grid must be strictly increasing with resolution >= 2");

    const int w = layout.width, h = layout.height;
    const int n_states = w * h;
    TabularMdp mdp;
    mdp.n_states = n_states;
    mdp.n_actions = kNumGridActions;
    mdp.gamma = layout.gamma;
    mdp.transition.assign(static_cast<std::size_t>(n_states) * kNumGridActions * n_states, 0.0);
    mdp.initial_dist.assign(n_states, 0.0);
    mdp.absorbing.assign(n_states, 0);

    const int dx[4] = {0, 0, -1, 1};  // up, down, left, right
    const int dy[4] = {-1, 1, 0, 0};

    auto resolve = [&](int x, int y, int dir) {
        int nx = x + dx[dir], ny = y + dy[dir];
        if (nx < 0 || nx >= w || ny < 0 || ny >= h || layout.cell(nx, ny) == CellRole::Wall)
            return layout.state_index(x, y);  // blocked: stay in place
        return layout.state_index(nx, ny);
    };

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int s = layout.state_index(x, y);
            const CellRole role = layout.cell(x, y);
            if (role == CellRole::Start) mdp.initial_dist[s] = 1.0;
            const bool absorbing = role == CellRole::Goal || role == CellRole::Waypoint ||
                                   role == CellRole::Lava || role == CellRole::Wall;
            mdp.absorbing[s] = absorbing;
            for (int a = 0; a < kNumGridActions; ++a) {
                if (absorbing || a == kStay) {
                    mdp.p(s, a, s) = 1.0;
                    continue;
                }
                mdp.p(s, a, resolve(x, y, a)) += 1.0 - layout.slip_prob;
                for (int d = 0; d < 4; ++d) {
                    if (d == a) continue;
                    mdp.p(s, a, resolve(x, y, d)) += layout.slip_prob / 3.0;
                }
            }
        }
    }

    RewardModel reward;
    reward.role = layout.cells;
    reward.theta_grid = theta_grid;
    reward.r_max = std::max(theta_grid.upper, 1.0);
    return {std::move(mdp), std::move(reward)};
}

ValidationReport validate(const TabularMdp& mdp) {
    ValidationReport report;
    auto add = [&](const std::string& msg) { report.violations.push_back(msg); };
    if (mdp.n_states <= 0 || mdp.n_actions <= 0) {
        add("state and action counts must be positive");
        return report;
    }
    for (int s = 0; s < mdp.n_states; ++s) {
        for (int a = 0; a < mdp.n_actions; ++a) {
            double sum = 0.0;
            for (int s2 = 0; s2 < mdp.n_states; ++s2) {
                double v = mdp.p(s, a, s2);
                if (v < 0.0)
                    add("negative transition probability at (s=" + std::to_string(s) +
                        ", a=" + std::to_string(a) + ", s'=" + std::to_string(s2) + ")");
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-12)
                add("transition row (s=" + std::to_string(s) + ", a=" + std::to_string(a) +
                    ") sums to " + std::to_string(sum));
        }
        if (!mdp.absorbing.empty() && mdp.absorbing[s]) {
            for (int a = 0; a < mdp.n_actions; ++a)
                if (std::abs(mdp.p(s, a, s) - 1.0) > 1e-12)
                    add("absorbing state " + std::to_string(s) +
                        " does not self-loop under action " + std::to_string(a));
        }
    }
    double init_sum = 0.0;
    for (double v : mdp.initial_dist) init_sum += v;
    if (std::abs(init_sum - 1.0) > 1e-12)
        add("initial distribution sums to " + std::to_string(init_sum));
    if (mdp.gamma <= 0.0 || mdp.gamma >= 1.0) add("gamma must lie in (0,1)");
    return report;
}

}  // namespace irlstab
