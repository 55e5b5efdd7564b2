#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "delam/evolution.hpp"
#include "delam/limits.hpp"

namespace delam {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Validated run configuration. Loads are not configured directly: the
/// scenario name selects a load schedule scaled by load_scale.
struct RunConfig {
    MeshSpec mesh{1.0, 0.5, 32, 8, {EdgeTag::Top, EdgeTag::Bottom}, {}};
    double rho = 1.0;
    double lambda = 1.0;
    double mu = 1.0;
    double visc_lambda = 0.0;
    double visc_mu = 1.0;
    double a0 = 0.5;
    double a1 = 0.5;
    double b = 0.5;
    double k = 100.0;
    std::vector<double> k_values{10.0, 100.0, 1000.0, 10000.0};
    CoefficientScaling scaling = CoefficientScaling::OneOverK;
    double tau = 0.01;
    double horizon = 3.0;
    std::string scenario = "peel";
    double load_scale = 1.0;
    double load_omega = 6.283185307179586;
    bool initial_bonded = true;
    bool strict_init = true;
    StepOrder order = StepOrder::UThenZ;
    bool streaming = false;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    int samples = 10;
    int exclusion_steps = 2;
    int threads = 0;

    friend bool operator==(const RunConfig& a, const RunConfig& b);
};

/// Names accepted by [run] scenario.
const std::vector<std::string>& scenario_names();

/// Parses the flat sectioned key-value document. Unknown keys, duplicate
/// keys, type errors and validation failures throw ConfigError with the
/// offending line number when there is one.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Every key with its normalized value; parse_config(dump_config(c)) == c.
std::string dump_config(const RunConfig& config);

/// Throws ConfigError for out-of-range values.
void validate_config(const RunConfig& config);

/// Model parameters with the scenario's load schedule at adhesive stiffness k.
ModelParams model_params(const RunConfig& config, double k);
/// Mesh spec with the scenario's loaded edges added to the Neumann set.
MeshSpec mesh_spec(const RunConfig& config);
EvolutionOptions evolution_options(const RunConfig& config);
SweepSetup sweep_setup(const RunConfig& config);
SweepOptions sweep_options(const RunConfig& config);

}  // namespace delam
