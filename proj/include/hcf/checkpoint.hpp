/// @file checkpoint.hpp
/// @brief Self-describing binary flow checkpoints with bit-exact round-trip.
///
/// Layout: 8-byte magic "HCFCKPT1", u64 little-endian header length, a JSON
/// header (grid descriptor, time as both decimal and raw bits, step count,
/// run seed, config hash, axis-order documentation), then the metric as raw
/// little-endian double pairs, component-major: comp (i, j) = g_{i jbar},
/// i*n+j slowest, grid point (axis 0 fastest) within each component.

#pragma once

#include <cstdint>
#include <string>

#include "hcf/flow.hpp"
#include "hcf/metric.hpp"

namespace hcf {

struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CheckpointData {
    double t = 0.0;
    long step_count = 0;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    int n = 1;
    int resolution = 8;
    std::string mode = "spectral";
    double period = 0.0;
    MetricField g;

    CheckpointData() : g(MetricField::identity(make_grid(1, 8))) {}
};

void write_checkpoint(const std::string& path, const FlowState& state, std::uint64_t seed,
                      std::uint64_t config_hash);

/// Throws CheckpointError on bad magic, truncation, or malformed headers.
CheckpointData read_checkpoint(const std::string& path);

/// Rebuild a FlowState (package not yet refreshed).
FlowState to_flow_state(const CheckpointData& data);

}  // namespace hcf
