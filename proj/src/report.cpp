#include "hcf/report.hpp"

#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace hcf {

namespace {
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

TimeSeriesWriter::TimeSeriesWriter(const std::string& path, std::uint64_t config_hash,
                                   std::uint64_t seed)
    : out_(path, std::ios::trunc), path_(path) {
    if (!out_) throw std::runtime_error("cannot open time series for writing: " + path);
    out_ << "# hcflow-timeseries v" << kTimeSeriesVersion << "\n";
    out_ << "# config_hash=" << hex64(config_hash) << " seed=" << seed << "\n";
    out_ << kTimeSeriesColumns << "\n";
}

void TimeSeriesWriter::row(const TrajectoryRecord& r) {
    out_ << r.step << ',' << fmt(r.t) << ',' << fmt(r.dt) << ',' << fmt(r.sup_rm) << ','
         << fmt(r.sup_t_sq) << ',' << fmt(r.sup_gradT) << ',' << fmt(r.F_sup) << ','
         << fmt(r.K_now) << ',' << fmt(r.ricci_max_eig) << ',' << fmt(r.kappa_hat) << ','
         << fmt(r.pinch_min) << ',' << fmt(r.min_phi) << ',' << fmt(r.max_eig_A) << ','
         << fmt(r.hermitian_drift) << "\n";
    if (!out_) throw std::runtime_error("write failure on time series: " + path_);
}

void TimeSeriesWriter::flush() { out_.flush(); }

void write_run_summary(const std::string& path, std::uint64_t config_hash, std::uint64_t seed,
                       const FlowResult& result, const ConditionSummary* conditions,
                       double conditions_held_until) {
    nlohmann::json j{
        {"format", "hcflow-summary"},
        {"version", 1},
        {"config_hash", hex64(config_hash)},
        {"seed", seed},
        {"steps", result.final_state.step_count},
        {"t_final", result.final_state.t},
        {"K0", result.K0},
        {"aborted", result.aborted},
        {"abort_reason", result.abort_reason},
        {"smp_assertion_active", result.smp_assertion_active},
        {"conditions_held_until", conditions_held_until},
        {"rows", result.series.size()},
    };
    if (!result.series.empty()) {
        const auto& last = result.series.back();
        j["final"] = {{"K_now", last.K_now},
                      {"F_sup", last.F_sup},
                      {"ricci_max_eig", last.ricci_max_eig},
                      {"sup_t_sq", last.sup_t_sq}};
    }
    if (conditions) {
        j["classify"] = {{"griffiths_nonpositive", conditions->griffiths_nonpositive},
                         {"ricci_nonpositive", conditions->ricci_nonpositive},
                         {"ricci_quasi_negative", conditions->ricci_quasi_negative},
                         {"kappa_max", conditions->kappa_max},
                         {"ricci_max_eigenvalue", conditions->ricci_max_eigenvalue},
                         {"ricci_min_of_max_eigenvalue", conditions->ricci_min_of_max_eigenvalue},
                         {"griffiths_witness_point", conditions->griffiths_witness},
                         {"ricci_witness_point", conditions->ricci_witness},
                         {"tolerance", conditions->tolerance}};
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open summary for writing: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failure on summary: " + path);
}

}  // namespace hcf
