#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "decotunnel/environment.hpp"
#include "decotunnel/errors.hpp"
#include "decotunnel/spectral.hpp"

namespace decotunnel::cli {

struct GeometryConfig {
    double x_a = 1.0;
    double x_b = 1.0;
    double s_tilde = 100.0;
};

struct ModeSelection {
    std::optional<double> k_max;
    std::optional<int> j_a;  // explicit (j_A, j_B) pair target
    std::optional<int> j_b;
};

struct GridSpec {
    double min = 0.0;
    double max = 0.0;
    int points = 0;
    bool log = true;
};

struct DecoherenceConfig {
    std::string basis = "partition";  // "partition" | "energy"
    double lambda = 1.0;
    std::optional<double> tau_d;
    std::optional<GridSpec> omega_d_grid;
    std::string events = "deterministic";  // "deterministic" | "stochastic"
    std::uint64_t seed = 0;
    bool simulate = false;
};

struct EvolveConfig {
    int pair_index = 0;
    double t_max = 0.0;
    int samples = 400;
};

struct EnvironmentConfig {
    std::string model = "energy_diagonal";  // "energy_diagonal" | "section_a"
    std::vector<environment::EnvState> ensemble;
    int pair_index = 0;
    double t_max = 0.0;
    int samples = 400;
};

struct OracleConfig {
    int n_points = 2000;
    double dt = 0.01;
    std::optional<double> barrier_width;
};

struct OutputConfig {
    bool normalized = false;
};

struct ExperimentConfig {
    GeometryConfig geometry;
    ModeSelection modes;
    spectral::ClassThresholds thresholds;
    DecoherenceConfig decoherence;
    EvolveConfig evolve;
    EnvironmentConfig environment;
    OracleConfig oracle;
    OutputConfig output;
};

// Parses and validates; throws ConfigError carrying every field-level problem
// found (unknown keys included).
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

// Canonical dump; parse_config(dump_config(c)) reproduces c exactly.
std::string dump_config(const ExperimentConfig& c);

std::vector<double> expand_grid(const GridSpec& spec);

}  // namespace decotunnel::cli
