/// @file config.hpp
/// @brief Run configuration: sectioned key-value text, lossless round-trip,
/// content hash. Command-line flags override file values via set().

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hcf/flow.hpp"
#include "hcf/grid.hpp"

namespace hcf {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    // [preset]
    std::string preset_name = "flat";
    double amplitude = 0.1;
    int modes = 2;
    std::uint64_t seed = 1;

    // [grid]
    int n = 1;
    int resolution = 16;
    std::string mode = "spectral";  // spectral | fd4
    double period = 2.0 * 3.14159265358979323846;

    // [flow]
    double t_end = 0.05;
    double c1 = 0.5;
    double safety = 0.5;
    double min_dt = 1e-9;
    double max_dt = 0.0;  // 0 = parabolic stability cap
    int record_every = 1;
    int snapshot_every = 10;
    int checkpoint_every = 25;
    long max_steps = 200000;

    // [monitors]
    bool monitors_enabled = true;
    int monitors_every = 1;
    std::size_t stride = 1;
    double epsilon = 0.0;
    double K = 0.0;
    long pinch_samples = 2000;
    int griffiths_restarts = 8;
    double tolerance = 1e-8;

    // [heat]
    bool heat_enabled = false;
    double heat_k = 1.0;
    double heat_B = 1.0;
    double heat_eps = 1e-3;
    int bump_power = 4;
    double bump_amplitude = 0.5;

    // [check]
    double check_tolerance = 1e-7;
    double t_star = 4e-3;
    std::vector<double> deltas = {2e-3, 1e-3, 5e-4};

    // [output]
    std::string output_dir = "out";
    std::string formats = "csv,json";

    /// Canonical serialization: fixed section/key order, %.17g doubles.
    std::string dump() const;

    /// FNV-1a 64 over dump().
    std::uint64_t hash() const;

    /// Apply one "section.key=value" override; throws ConfigError on unknown
    /// fields or malformed values.
    void set(const std::string& assignment);

    /// Throws ConfigError on out-of-range values (naming the violated rule).
    void validate() const;

    GridPtr make_grid_from_config() const;
    FlowOptions flow_options() const;
};

/// Parse the sectioned key=value text. Unknown sections/keys and malformed
/// values raise ConfigError naming the field and line number.
RunConfig parse_config(const std::string& text);

RunConfig load_config_file(const std::string& path);

}  // namespace hcf
