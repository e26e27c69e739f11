#include "irlstab/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace irlstab {

GridLayout resolve_environment(const std::string& id) {
    if (id == "A" || id == "B" || id == "C") return builtin_layout(id);
    std::ifstream in(id);
    if (!in) throw std::invalid_argument("cannot open layout file '" + id + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return GridLayout::parse(buf.str());
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t point, std::uint64_t k) {
    std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (point * 1024 + k + 1));
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

std::vector<double> empirical_loss_curve(const std::vector<std::pair<int, int>>& data,
                                         const PolicyFamily& pi_tilde) {
    std::vector<double> curve(pi_tilde.theta_grid.resolution, 0.0);
    for (int i = 0; i < pi_tilde.theta_grid.resolution; ++i) {
        double loss = 0.0;
        for (auto [s, a] : data) loss -= std::log(pi_tilde.prob(i, s, a));
        curve[i] = loss / data.size();
    }
    return curve;
}

}  // namespace

void SweepConfig::check() const {
    if (bias_kind != "transition" && bias_kind != "power" && bias_kind != "myopia")
        throw std::invalid_argument("bias kind must be transition, power or myopia");
    if (mode != "exact" && mode != "sampled")
        throw std::invalid_argument("mode must be exact or sampled");
    if (theta_grid.resolution < 2 || theta_grid.upper <= theta_grid.lower)
        throw std::invalid_argument("invalid theta grid");
    theta_grid.index_of(theta_star);  // throws when theta_star is off-grid
    if (n_samples < 1 || n_seeds < 1)
        throw std::invalid_argument("sampled mode needs n_samples >= 1 and n_seeds >= 1");
    for (double v : effective_sweep_values()) {
        BiasSpec spec = bias_kind == "transition" ? BiasSpec::transition_slip(v)
                        : bias_kind == "power"    ? BiasSpec::power_sharpen(v)
                                                  : BiasSpec::myopia(v);
        spec.check();
    }
}

std::vector<double> SweepConfig::effective_sweep_values() const {
    if (!sweep_values.empty()) return sweep_values;
    if (bias_kind == "transition") return {0.30, 0.25, 0.20, 0.15, 0.10, 0.05, 0.00};
    if (bias_kind == "myopia") return {0.98, 0.9, 0.8, 0.7, 0.6, 0.5};
    return {1.0, 2.0, 4.0, 8.0, 16.0, 32.0};  // power
}

SweepConfig SweepConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    SweepConfig config;
    try {
        if (j.contains("environment")) config.environment = j["environment"].get<std::string>();
        if (j.contains("bias")) config.bias_kind = j["bias"].get<std::string>();
        if (j.contains("sweep_values"))
            config.sweep_values = j["sweep_values"].get<std::vector<double>>();
        if (j.contains("theta_star")) config.theta_star = j["theta_star"].get<double>();
        if (j.contains("theta_grid")) {
            const auto& g = j["theta_grid"];
            config.theta_grid.lower = g.at("lower").get<double>();
            config.theta_grid.upper = g.at("upper").get<double>();
            config.theta_grid.resolution = g.at("resolution").get<int>();
        }
        if (j.contains("mode")) config.mode = j["mode"].get<std::string>();
        if (j.contains("n")) config.n_samples = j["n"].get<int>();
        if (j.contains("n_seeds")) config.n_seeds = j["n_seeds"].get<int>();
        if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("out")) config.out_dir = j["out"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config field error: ") + e.what());
    }
    return config;
}

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
    config.check();
    GridLayout layout = resolve_environment(config.environment);
    auto [mdp_true, reward] = build_gridworld(layout, config.theta_grid);
    const int theta_star_index = config.theta_grid.index_of(config.theta_star);
    const PolicyFamily pi_tilde = policy_family(mdp_true, reward);
    const double c_tilde = estimate_concavity(pi_tilde).c_hat;

    std::vector<SweepRow> rows;
    const std::vector<double> values = config.effective_sweep_values();
    for (std::size_t point = 0; point < values.size(); ++point) {
        SweepRow row;
        row.bias_value = values[point];
        try {
            BiasSpec spec = config.bias_kind == "transition"
                                ? BiasSpec::transition_slip(row.bias_value)
                            : config.bias_kind == "power"
                                ? BiasSpec::power_sharpen(row.bias_value)
                                : BiasSpec::myopia(row.bias_value);
            TabularMdp biased = apply_bias(mdp_true, layout, spec);
            PolicyFamily pi_star = policy_family(biased, reward);
            OccupancyMeasure w_star = occupancy(biased, pi_star.slice(theta_star_index));

            row.d_weighted = weighted_divergence(pi_star, pi_tilde, w_star, theta_star_index);
            row.d_worstcase = worstcase_divergence(pi_star, pi_tilde);

            if (config.mode == "exact") {
                std::vector<double> curve(config.theta_grid.resolution);
                for (int i = 0; i < config.theta_grid.resolution; ++i)
                    curve[i] = expected_nll(pi_tilde, pi_star, w_star, theta_star_index, i);
                row.sq_error =
                    mle_infer(curve, config.theta_grid, config.theta_star).sq_error;
            } else {
                std::vector<double> errors;
                for (int k = 0; k < config.n_seeds; ++k) {
                    auto data = sample_dataset(biased, pi_star, theta_star_index,
                                               config.n_samples,
                                               mix_seed(config.seed, point, k));
                    auto curve = empirical_loss_curve(data, pi_tilde);
                    errors.push_back(
                        mle_infer(curve, config.theta_grid, config.theta_star).sq_error);
                }
                double mean = std::accumulate(errors.begin(), errors.end(), 0.0) / errors.size();
                double var = 0.0;
                for (double e : errors) var += (e - mean) * (e - mean);
                row.sq_error = mean;
                row.sq_error_stderr =
                    errors.size() > 1 ? std::sqrt(var / (errors.size() - 1) / errors.size()) : 0.0;
            }

            if (config.bias_kind == "myopia") {
                row.cor_bound = cor2_bound(mdp_true.n_actions, reward.r_max, mdp_true.gamma,
                                           biased.gamma);
            } else {
                row.delta_p = transition_gap(biased, mdp_true);
                row.cor_bound =
                    cor1_bound(*row.delta_p, mdp_true.n_actions, reward.r_max, mdp_true.gamma);
            }
            row.c_hat = std::min(estimate_concavity(pi_star).c_hat, c_tilde);
            row.thm2_bound = theorem2_bound(row.c_hat, row.d_weighted);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "bias_value,delta_p,d_weighted,d_worstcase,sq_error,cor_bound,c_hat,thm2_bound\n";
    for (const SweepRow& row : rows) {
        if (!row.error.empty()) {
            out << fmt(row.bias_value) << ",,,,,,,\n";
            continue;
        }
        out << fmt(row.bias_value) << ',' << (row.delta_p ? fmt(*row.delta_p) : "") << ','
            << fmt(row.d_weighted) << ',' << fmt(row.d_worstcase) << ',' << fmt(row.sq_error)
            << ',' << fmt(row.cor_bound) << ',' << fmt(row.c_hat) << ','
            << (row.thm2_bound ? fmt(*row.thm2_bound) : "na") << '\n';
    }
    return out.str();
}

namespace {

void write_svg_chart(const std::string& path, const std::vector<double>& xs,
                     const std::vector<double>& ys, const std::string& x_label,
                     const std::string& y_label, bool line) {
    const int w = 640, h = 480, margin = 60;
    double x_min = *std::min_element(xs.begin(), xs.end());
    double x_max = *std::max_element(xs.begin(), xs.end());
    double y_min = *std::min_element(ys.begin(), ys.end());
    double y_max = *std::max_element(ys.begin(), ys.end());
    if (x_max == x_min) x_max = x_min + 1;
    if (y_max == y_min) y_max = y_min + 1;
    auto px = [&](double x) { return margin + (x - x_min) / (x_max - x_min) * (w - 2 * margin); };
    auto py = [&](double y) {
        return h - margin - (y - y_min) / (y_max - y_min) * (h - 2 * margin);
    };
    std::ofstream out(path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<line x1='" << margin << "' y1='" << h - margin << "' x2='" << w - margin << "' y2='"
        << h - margin << "' stroke='black'/>\n";
    out << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin << "' y2='"
        << h - margin << "' stroke='black'/>\n";
    out << "<text x='" << w / 2 << "' y='" << h - 15 << "' text-anchor='middle'>" << x_label
        << "</text>\n";
    out << "<text x='15' y='" << h / 2 << "' text-anchor='middle' transform='rotate(-90 15 "
        << h / 2 << ")'>" << y_label << "</text>\n";
    if (line) {
        out << "<polyline fill='none' stroke='steelblue' stroke-width='2' points='";
        for (std::size_t i = 0; i < xs.size(); ++i) out << px(xs[i]) << ',' << py(ys[i]) << ' ';
        out << "'/>\n";
    }
    for (std::size_t i = 0; i < xs.size(); ++i)
        out << "<circle cx='" << px(xs[i]) << "' cy='" << py(ys[i])
            << "' r='4' fill='steelblue'/>\n";
    out << "</svg>\n";
}

}  // namespace

void write_sweep_outputs(const SweepConfig& config, const std::vector<SweepRow>& rows) {
    std::filesystem::path dir = config.out_dir.empty() ? "." : config.out_dir;
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "sweep.csv", std::ios::binary);
        out << sweep_csv(rows);
    }
    if (config.svg) {
        std::vector<double> bias, dw, err;
        for (const SweepRow& row : rows) {
            if (!row.error.empty()) continue;
            bias.push_back(row.bias_value);
            dw.push_back(row.d_weighted);
            err.push_back(row.sq_error);
        }
        if (!bias.empty()) {
            write_svg_chart((dir / "divergence.svg").string(), bias, dw, "bias value",
                            "weighted divergence", true);
            write_svg_chart((dir / "scatter.svg").string(), dw, err, "weighted divergence",
                            "squared reward error", false);
        }
    }
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("spearman needs two equal-length series of size >= 2");
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> order(v.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        std::size_t i = 0;
        while (i < order.size()) {
            std::size_t j = i;
            while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
            double avg = (static_cast<double>(i) + j) / 2.0 + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    std::vector<double> rx = ranks(x), ry = ranks(y);
    double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / rx.size();
    double my = std::accumulate(ry.begin(), ry.end(), 0.0) / ry.size();
    double num = 0.0, vx = 0.0, vy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        vx += (rx[i] - mx) * (rx[i] - mx);
        vy += (ry[i] - my) * (ry[i] - my);
    }
    if (vx == 0.0 || vy == 0.0) return 1.0;  // a constant series ranks everything equally
    return num / std::sqrt(vx * vy);
}

PolicyFamily kinked_preference_family(int resolution) {
    PolicyFamily family;
    family.n_states = 1;
    family.n_actions = 2;
    family.theta_grid = {0.0, 10.0, resolution};
    family.probs.resize(2 * static_cast<std::size_t>(resolution));
    for (int i = 0; i < resolution; ++i) {
        double theta = family.theta_grid.value(i);
        double l0 = std::max(theta, 10.0 - theta);
        double l1 = 8.0;
        double m = std::max(l0, l1);
        double z = std::exp(l0 - m) + std::exp(l1 - m);
        family.probs[2 * i] = std::exp(l0 - m) / z;
        family.probs[2 * i + 1] = std::exp(l1 - m) / z;
    }
    return family;
}

PolicyFamily quadratic_family(int resolution) {
    PolicyFamily family;
    family.n_states = 1;
    family.n_actions = 1;
    family.theta_grid = {0.0, 10.0, resolution};
    family.probs.resize(resolution);
    for (int i = 0; i < resolution; ++i) {
        double theta = family.theta_grid.value(i);
        family.probs[i] = std::exp(-(theta - 5.0) * (theta - 5.0));
    }
    return family;
}

ConcavityReport run_concavity_target(const std::string& target) {
    ConcavityReport report;
    report.target = target;
    ConcavityEstimate est;
    if (target == "appendix-b") {
        est = estimate_concavity(kinked_preference_family());
    } else if (target == "quadratic") {
        est = estimate_concavity(quadratic_family());
    } else {
        GridLayout layout = resolve_environment(target);
        auto [mdp, reward] = build_gridworld(layout);
        est = estimate_concavity(policy_family(mdp, reward));
    }
    report.c_hat = est.c_hat;
    report.pass = est.c_hat > 0.0;
    report.witnesses = est.witnesses;
    return report;
}

void write_concavity_report(const ConcavityReport& report, const std::string& out_dir) {
    std::filesystem::path dir = out_dir.empty() ? "." : out_dir;
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "concavity.txt", std::ios::binary);
    out << "target=" << report.target << "\n";
    out << "c_hat=" << fmt(report.c_hat) << "\n";
    out << "log_concavity=" << (report.pass ? "pass" : "fail") << "\n";
    for (auto [s, a, i] : report.witnesses)
        out << "witness state=" << s << " action=" << a << " theta_index=" << i << "\n";
}

BanditDemoReport run_adversarial(const BanditInstance& instance, double epsilon,
                                 const std::string& out_dir) {
    BanditDemoReport report = run_demo(instance, epsilon);
    std::filesystem::path dir = out_dir.empty() ? "." : out_dir;
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "adversarial.csv", std::ios::binary);
        out << "epsilon,delta,d_wc,theta_star,theta_hat,sq_error,diameter_bound_ok\n";
        out << fmt(report.epsilon) << ',' << fmt(report.delta_used) << ',' << fmt(report.d_wc)
            << ',' << fmt(report.theta_star) << ',' << fmt(report.theta_hat) << ','
            << fmt(report.sq_error) << ',' << (report.diameter_bound_ok ? 1 : 0) << '\n';
    }
    {
        std::ofstream out(dir / "adversarial.txt", std::ios::binary);
        out << "worst-case divergence " << fmt(report.d_wc) << " (< " << fmt(report.epsilon)
            << ") with ball half-width " << fmt(report.delta_used) << "\n";
        out << "demonstrator MLE theta* = " << fmt(report.theta_star)
            << ", model MLE theta^ = " << fmt(report.theta_hat) << "\n";
        out << "squared inference error " << fmt(report.sq_error)
            << (report.diameter_bound_ok ? " exceeds" : " does not exceed")
            << " half the squared parameter diameter\n";
    }
    return report;
}

}  // namespace irlstab
