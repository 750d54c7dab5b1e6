#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "decotunnel/config.hpp"
#include "decotunnel/spectral.hpp"

namespace decotunnel::cli {

struct RunOptions {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;  // overrides the config seed
    int threads = 1;
    bool force_normalized = false;  // --normalized
};

// Exit codes: 0 success, 1 config error, 2 numeric error, 3 validation failure.
int run(const std::string& subcommand, const std::string& config_path,
        const RunOptions& options);

// Pieces exposed for tests.
spectral::BoxGeometry geometry_from(const ExperimentConfig& c);
std::vector<spectral::EigenMode> modes_from(const ExperimentConfig& c);
spectral::ModePair select_pair(const ExperimentConfig& c, int index);

struct ValidationCheck {
    std::string name;
    double predicted = 0.0;
    double observed = 0.0;
    double rel_error = 0.0;
    bool pass = false;
};

std::vector<ValidationCheck> run_validation_suite(const ExperimentConfig& c);

}  // namespace decotunnel::cli
