#ifndef TODAMT_TOOLS_CONFIG_HPP
#define TODAMT_TOOLS_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "todamt/minimize.hpp"
#include "todamt/weights.hpp"

namespace todamt::cli {

enum class RhoMode { fraction, absolute };
enum class InitKind { zero, random, bubble };

struct ExperimentConfig {
    int n = 512;
    std::vector<Point> points;
    std::vector<double> alpha1, alpha2;
    std::optional<TrigBase> base;  // unset means flat
    RhoMode rho_mode = RhoMode::fraction;
    double rho1 = 0.8, rho2 = 0.8;
    std::vector<double> lambdas{8, 16, 32, 64};
    MinimizeOptions minimize;
    InitKind init = InitKind::zero;
    double bubble_lambda = 16.0;
    std::vector<double> path{0.5, 0.7, 0.9};  // fractions of critical
    std::vector<double> disk_alphas{0.0, -0.5};
    int disk_nodes = 2048;
    std::string out_dir = "out";
    std::uint64_t seed = 1;

    /// Reads an INI file; missing keys keep their defaults. Throws std::runtime_error on bad values.
    static ExperimentConfig load(const std::string& path);

    /// Checks every precondition that can be decided without computing.
    void validate() const;

    nlohmann::json to_json() const;
    /// FNV-1a of the canonical JSON echo, as 16 hex digits.
    std::string hash() const;
};

/// Everything built from a config on one grid.
struct Experiment {
    ExperimentConfig config;
    SurfaceGrid grid;
    SingularConfig singular;
    WeightField w1, w2;
    RhoParams critical;
    RhoParams rho;

    explicit Experiment(ExperimentConfig cfg);
    WeightPair weights() const { return {&w1, &w2}; }
    RhoParams rho_at(double fraction) const { return critical.scaled(fraction); }
};

}  // namespace todamt::cli

#endif  // TODAMT_TOOLS_CONFIG_HPP
