/// @file report.hpp
/// @brief Artifact emission: versioned CSV time series and JSON summaries.
/// Every artifact embeds the config hash and run seed.

#pragma once

#include <fstream>
#include <string>

#include "hcf/conditions.hpp"
#include "hcf/flow.hpp"

namespace hcf {

/// Column schema, version 1. Parsers of version N accept files of version <= N.
inline constexpr int kTimeSeriesVersion = 1;
inline constexpr const char* kTimeSeriesColumns =
    "step,t,dt,sup_rm,sup_t_sq,sup_gradT,F_sup,K_now,ricci_max_eig,griffiths_kappa,pinch_min,"
    "min_phi,max_eig_A,hermitian_drift";

class TimeSeriesWriter {
public:
    /// Opens (truncates) and writes the commented header. Throws
    /// std::runtime_error on I/O failure.
    TimeSeriesWriter(const std::string& path, std::uint64_t config_hash, std::uint64_t seed);

    void row(const TrajectoryRecord& r);
    void flush();

private:
    std::ofstream out_;
    std::string path_;
};

std::string hex64(std::uint64_t v);

/// summary.json for a flow run. conditions_held_until is the largest recorded
/// time up to which the monitored sign conditions (kappa_hat <= tol and max
/// Ricci eigenvalue <= tol) held continuously from t = 0 (NaN when the
/// condition monitors were off).
void write_run_summary(const std::string& path, std::uint64_t config_hash, std::uint64_t seed,
                       const FlowResult& result, const ConditionSummary* conditions,
                       double conditions_held_until);

}  // namespace hcf
