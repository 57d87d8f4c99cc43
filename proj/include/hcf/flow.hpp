/// @file flow.hpp
/// @brief Time integration of the metric flow dg/dt = -S(g) and its monitors.
///
/// Explicit RK4 with a two-sided step rule: dt = safety * c1 / K_now (K_now =
/// sup |Rm| + |T|^2 + |nabla T|) capped by the parabolic stability estimate of
/// the spectral discretization. Hermitianity is re-projected after every step;
/// loss of positivity or non-finite values abort the run (NumericalAbort) --
/// leaving the positive cone is treated as a result, not papered over.

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hcf/chern.hpp"
#include "hcf/conditions.hpp"
#include "hcf/metric.hpp"

namespace hcf {

struct NumericalAbort : std::runtime_error {
    enum class Kind { PositivityLoss, Overflow };
    NumericalAbort(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
    Kind kind;
};

// ---------------------------------------------------------------------------

struct FlowState {
    double t = 0.0;
    long step_count = 0;
    MetricField g;
    std::shared_ptr<const ChernPackage> pkg;  // refreshed after every accepted step

    explicit FlowState(MetricField metric) : g(std::move(metric)) {}
    void refresh_package() { pkg = std::make_shared<const ChernPackage>(compute_chern(g)); }
};

/// One RK4 step of g -> g - dt*S(g); each stage recomputes S from the stage
/// metric. Returns the advanced state with a fresh package. The returned
/// hermitian_drift is the pre-projection deviation (diagnostic).
struct StepOutcome {
    FlowState state;
    double hermitian_drift;
};
StepOutcome step_hcf(const FlowState& state, double dt);

// ---------------------------------------------------------------------------

/// dt = clamp(safety * c1 / K_now, [min_dt, max_dt]) with max_dt <= the RK4
/// parabolic stability cap of the current metric (max_dt = 0 requests the cap
/// itself).
struct StepController {
    double c1 = 0.5;
    double safety = 0.5;
    double min_dt = 1e-9;
    double max_dt = 0.0;

    double operator()(double K_now, const MetricField& g) const;
};

/// RK4 stability bound for the function-level heat operator g^{r sbar} d_r d_sbar
/// on this grid; also used as the flow's parabolic cap.
double stability_dt(const MetricField& g);

// ---------------------------------------------------------------------------
// Heat companion

/// One RK4 step of d(phi)/dt = g^{r sbar} d_r d_sbar phi on a frozen metric.
/// enforce_positivity aborts when min Re(phi) < -1e-12 after the step.
TensorField heat_step(const TensorField& phi, const TensorField& g_inv, double dt,
                      bool enforce_positivity = true);

/// Largest generalized eigenvalue over the grid of
///   A = Ric + e^{-k t} phi^2 g - eps e^{B t} g
/// against g. Throws std::invalid_argument when phi is out of sync with t.
struct SmpSample {
    double max_eigenvalue;
    std::size_t argmax;
};
SmpSample smp_monitor(const TensorField& Ric, const MetricField& g, const TensorField& phi,
                      double phi_time, double state_time, double k, double B, double eps);

// ---------------------------------------------------------------------------
// Flow driver

struct MonitorOptions {
    bool conditions_enabled = true;
    std::size_t condition_stride = 1;  // grid-point stride for griffiths/pinch
    int condition_every = 1;           // evaluate conditions every k-th step
    double epsilon = 0.0;              // pinch shift; 0 disables the pinch monitor
    double K = 0.0;                    // pinch (1 + K t) factor
    long pinch_samples = 2000;
    GriffithsOptions griffiths;
    double tolerance = 1e-8;
};

struct HeatOptions {
    bool enabled = false;
    double k = 1.0;
    double B = 1.0;
    double eps = 1e-3;
    int bump_power = 4;
    double bump_amplitude = 0.5;
};

struct FlowOptions {
    double t_end = 0.1;
    StepController controller;
    int record_every = 1;
    int snapshot_every = 10;
    long max_steps = 200000;
    std::uint64_t seed = 1;
    MonitorOptions monitors;
    HeatOptions heat;
};

/// Scalar row recorded per accepted step.
struct TrajectoryRecord {
    long step;
    double t;
    double dt;
    double sup_rm;
    double sup_t_sq;
    double sup_gradT;
    double F_sup;
    double K_now;
    double ricci_max_eig;
    double kappa_hat;    // NaN when conditions disabled / off-cadence
    double pinch_min;    // NaN when disabled
    double min_phi;      // NaN unless heat enabled
    double max_eig_A;    // NaN unless heat enabled
    double hermitian_drift;
};

struct Snapshot {
    long step;
    double t;
    MetricField g;
    TensorField F_field;              // pointwise F at the snapshot
    std::optional<TensorField> phi;   // heat companion when enabled
};

struct FlowResult {
    FlowState final_state;
    std::vector<TrajectoryRecord> series;
    std::vector<Snapshot> snapshots;
    double K0;
    bool aborted;
    std::string abort_reason;
    bool smp_assertion_active;  // initial data satisfied Ric <= -phi0^2 g
};

using StepCallback = std::function<void(const FlowState&, const TrajectoryRecord&)>;

FlowResult run_flow(FlowState initial, const FlowOptions& opt, const StepCallback& on_step = {});

// ---------------------------------------------------------------------------
// Doubling-time monitor

struct DoublingReport {
    double K0;
    double window_end;            // c1 / K0
    bool within_2K0;              // sup(|Rm|+|T|^2+|nabla T|) <= 2 K0 on the window
    double max_K_over_window;
    double c0_fit;                // from F_sup(t)^{-1/2} ~ K0^{-1} - c0 t (raw, may be < 0)
    double envelope_ratio;        // max_t F_sup(t) / (K0^{-1} - max(c0,0) t)^{-2}
    bool envelope_within_factor2;
    double residual_max;          // sup (d/dt - Lap) F - 2 max(c0_fit,0) F^{3/2}
    double residual_tol;          // FD noise + universal-constant allowance
    double c0_required;           // smallest c making the inequality hold pointwise
    bool residual_pass;
};

/// Requires at least 3 recorded rows and 3 snapshots (throws
/// std::invalid_argument otherwise). c0_allowance is the universal constant
/// granted to the differential inequality (d/dt - Lap) F <= 2 c0 F^{3/2};
/// the report also carries the smallest constant the data actually needs.
DoublingReport doubling_check(const FlowResult& result, double c1, double c0_allowance = 1.0);

}  // namespace hcf
