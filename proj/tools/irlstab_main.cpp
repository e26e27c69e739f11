#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "irlstab/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitNumericError = 2;

int run_sweep_command(const std::string& config_path, const std::string& out_dir,
                      const std::string& mode, bool svg, std::uint64_t seed, bool seed_set) {
    irlstab::SweepConfig config;
    try {
        if (!config_path.empty()) config = irlstab::SweepConfig::from_json_file(config_path);
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (!mode.empty()) config.mode = mode;
        if (svg) config.svg = true;
        if (seed_set) config.seed = seed;
        config.check();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    try {
        auto rows = irlstab::run_sweep(config);
        irlstab::write_sweep_outputs(config, rows);
        int failures = 0;
        for (const auto& row : rows)
            if (!row.error.empty()) {
                std::cerr << "point " << row.bias_value << " failed: " << row.error << "\n";
                ++failures;
            }
        std::cout << irlstab::sweep_csv(rows);
        return failures == 0 ? kExitOk : kExitNumericError;
    } catch (const std::exception& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumericError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"misspecified-demonstrator reward inference experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir, mode;
    bool svg = false;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON sweep config");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_flag("--svg", svg, "also write SVG charts");
        cmd->add_option("--mode", mode, "exact|sampled")
            ->check(CLI::IsMember({"exact", "sampled"}));
        return cmd->add_option("--seed", seed, "base RNG seed");
    };

    auto* sweep_cmd = app.add_subcommand("sweep", "run a bias sweep and write CSV");
    CLI::Option* seed_opt = add_common(sweep_cmd);

    auto* adv_cmd = app.add_subcommand("adversarial", "run the worst-case bandit demo");
    double epsilon = 0.01;
    double boost = 1e9;
    adv_cmd->add_option("--epsilon", epsilon, "target worst-case divergence");
    adv_cmd->add_option("--boost", boost, "ball boost factor override");
    adv_cmd->add_option("--out", out_dir, "output directory");

    auto* conc_cmd = app.add_subcommand("concavity", "log-concavity scan of a policy family");
    std::string target = "appendix-b";
    conc_cmd->add_option("target", target, "appendix-b|quadratic|A|B|C|layout path");
    conc_cmd->add_option("--out", out_dir, "output directory");

    auto* val_cmd = app.add_subcommand("validate", "validate an environment's MDP invariants");
    std::string env = "A";
    val_cmd->add_option("target", env, "A|B|C|layout path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep_cmd->parsed())
            return run_sweep_command(config_path, out_dir, mode, svg, seed, seed_opt->count() > 0);

        if (adv_cmd->parsed()) {
            irlstab::BanditInstance instance;
            instance.boost = boost;
            try {
                auto report = irlstab::run_adversarial(instance, epsilon, out_dir);
                std::cout << "d_wc=" << report.d_wc << " theta_star=" << report.theta_star
                          << " theta_hat=" << report.theta_hat
                          << " sq_error=" << report.sq_error
                          << " diameter_bound_ok=" << report.diameter_bound_ok << "\n";
                return kExitOk;
            } catch (const std::invalid_argument& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return kExitConfigError;
            }
        }

        if (conc_cmd->parsed()) {
            auto report = irlstab::run_concavity_target(target);
            irlstab::write_concavity_report(report, out_dir);
            std::cout << "target=" << report.target << " c_hat=" << report.c_hat << " "
                      << (report.pass ? "pass" : "fail") << "\n";
            return kExitOk;
        }

        if (val_cmd->parsed()) {
            irlstab::GridLayout layout;
            try {
                layout = irlstab::resolve_environment(env);
            } catch (const std::exception& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return kExitConfigError;
            }
            auto [mdp, reward] = irlstab::build_gridworld(layout);
            auto report = irlstab::validate(mdp);
            for (const auto& v : report.violations) std::cout << v << "\n";
            std::cout << (report.ok() ? "valid" : "invalid") << "\n";
            return report.ok() ? kExitOk : kExitNumericError;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumericError;
    }
    return kExitOk;
}
