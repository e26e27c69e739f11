#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "irlstab/bandit.hpp"
#include "irlstab/bias.hpp"
#include "irlstab/inference.hpp"

namespace irlstab {

// Builtin env id (A/B/C) or path to a layout text file.
GridLayout resolve_environment(const std::string& id);

struct SweepConfig {
    std::string environment = "A";     // A | B | C | path to a layout file
    std::string bias_kind = "transition";  // transition | power | myopia
    std::vector<double> sweep_values;  // empty -> default grid for the bias kind
    double theta_star = 3.0;
    ThetaGrid theta_grid{1.0, 4.0, 64};
    std::string mode = "exact";  // exact | sampled
    int n_samples = 10000;
    int n_seeds = 10;
    std::uint64_t seed = 0;
    std::string out_dir;
    bool svg = false;

    void check() const;
    std::vector<double> effective_sweep_values() const;
    static SweepConfig from_json_file(const std::string& path);
};

struct SweepRow {
    double bias_value = 0.0;
    std::optional<double> delta_p;
    double d_weighted = 0.0;
    double d_worstcase = 0.0;
    double sq_error = 0.0;
    double cor_bound = 0.0;
    double c_hat = 0.0;
    std::optional<double> thm2_bound;
    double sq_error_stderr = 0.0;  // sampled mode only
    std::string error;             // per-point failure, empty on success
};

std::vector<SweepRow> run_sweep(const SweepConfig& config);

// CSV with the fixed schema
// bias_value,delta_p,d_weighted,d_worstcase,sq_error,cor_bound,c_hat,thm2_bound
std::string sweep_csv(const std::vector<SweepRow>& rows);

// Writes sweep.csv and, when config.svg is set, divergence/scatter charts.
void write_sweep_outputs(const SweepConfig& config, const std::vector<SweepRow>& rows);

// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct ConcavityReport {
    std::string target;
    double c_hat = 0.0;
    bool pass = false;  // Assumption-2 style check: c_hat > 0
    std::vector<std::tuple<int, int, int>> witnesses;
};

// target: "appendix-b" | "quadratic" | builtin env id | layout file path.
ConcavityReport run_concavity_target(const std::string& target);
void write_concavity_report(const ConcavityReport& report, const std::string& out_dir);

// Two-action family pi(a0|theta) proportional to exp(max(theta, 10-theta))
// against a constant competitor, on theta in [0,10].
PolicyFamily kinked_preference_family(int resolution = 101);
// Single-entry diagnostic family with log pi = -(theta-5)^2 exactly.
PolicyFamily quadratic_family(int resolution = 101);

BanditDemoReport run_adversarial(const BanditInstance& instance, double epsilon,
                                 const std::string& out_dir);

}  // namespace irlstab
