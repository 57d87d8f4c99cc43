#include "hcf/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hcf/presets.hpp"
#include "hcf/rng.hpp"

namespace hcf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

MetricField axpy_metric(const MetricField& g, const TensorField& k, double a) {
    TensorField out = g.tensor().clone();
    TensorField scaled = k.clone();
    scaled *= cplx(a);
    out += scaled;
    return MetricField(std::move(out));
}

void require_finite(const TensorField& t, const char* where) {
    for (const auto& v : t.raw())
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NumericalAbort(NumericalAbort::Kind::Overflow,
                                 std::string(where) + ": non-finite value encountered");
}

/// Function-level Laplacian g^{r sbar} d_r d_sbar phi.
TensorField function_laplacian(const TensorField& phi, const TensorField& g_inv) {
    const int n = phi.grid().n();
    TensorField out(phi.grid_ptr(), Signature{});
    for (int s = 0; s < n; ++s) {
        TensorField ds = partial_anti(phi, s);
        for (int r = 0; r < n; ++r) {
            TensorField drs = partial_holo(ds, r);
            axpy_scalar_field(out, g_inv.comp(g_inv.comp_index({r, s})), drs, 1.0);
        }
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

StepOutcome step_hcf(const FlowState& state, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_hcf: dt must be positive");
    const MetricField& g = state.g;

    auto velocity = [](const MetricField& m) {
        // stage metrics outside the positive cone mean the step was too large
        auto pos = m.positivity();
        if (!pos.positive)
            throw NumericalAbort(NumericalAbort::Kind::PositivityLoss,
                                 "step_hcf: stage metric lost positivity at point " +
                                     std::to_string(pos.worst_point) + " (min eigenvalue " +
                                     std::to_string(pos.min_eigenvalue) + ")");
        require_finite(m.tensor(), "step_hcf stage");
        TensorField s = second_ricci_of(m);
        // The continuum S is Hermitian; its discrete counterpart carries a
        // spectral-tail asymmetry. Integrating the Hermitian part keeps the
        // semi-discrete flow tangent to the Hermitian cone, so the post-step
        // projection only ever removes roundoff (and RK4 keeps its order).
        hermitize_rank2(s);
        s *= cplx(-1.0);
        return s;  // dg/dt = -S
    };

    TensorField k1 = velocity(g);
    TensorField k2 = velocity(axpy_metric(g, k1, 0.5 * dt));
    TensorField k3 = velocity(axpy_metric(g, k2, 0.5 * dt));
    TensorField k4 = velocity(axpy_metric(g, k3, dt));

    TensorField incr = k1.clone();
    incr += k4;
    k2 *= cplx(2.0);
    incr += k2;
    k3 *= cplx(2.0);
    incr += k3;

    MetricField g_new = axpy_metric(g, incr, dt / 6.0);
    require_finite(g_new.tensor(), "step_hcf");
    const double drift = g_new.hermitian_deviation();
    g_new.hermitize();

    auto pos = g_new.positivity();
    if (!pos.positive)
        throw NumericalAbort(NumericalAbort::Kind::PositivityLoss,
                             "step_hcf: metric lost positivity at point " +
                                 std::to_string(pos.worst_point) + " (min eigenvalue " +
                                 std::to_string(pos.min_eigenvalue) + ")");

    FlowState next(std::move(g_new));
    next.t = state.t + dt;
    next.step_count = state.step_count + 1;
    next.refresh_package();
    return {std::move(next), drift};
}

// ---------------------------------------------------------------------------

double stability_dt(const MetricField& g) {
    const TorusGrid& grid = g.grid();
    const int n = grid.n();
    const int N = grid.resolution();

    // trace of g^{-1} bounds its top eigenvalue, cheap over the whole grid
    TensorField ginv = g.inverse();
    double sup_tr = 0.0;
    for (std::size_t p = 0; p < grid.npoints(); ++p) {
        double tr = 0.0;
        for (int i = 0; i < n; ++i)
            tr += ginv.at(static_cast<std::size_t>(i * n + i), p).real();
        sup_tr = std::max(sup_tr, tr);
    }

    // spectral symbol of d_r d_sbar peaks at kmax^2/4 per real-axis pair;
    // the Nyquist derivative is zeroed, so kmax = (N/2 - 1) * 2 pi / L
    double lam = 0.0;
    for (int a = 0; a < n; ++a) {
        const double kmax = (N / 2 - 1) * 2.0 * M_PI / grid.period(a);
        lam += 0.5 * kmax * kmax;  // (kx^2 + ky^2)/4 <= kmax^2/2
    }
    const double op_norm = sup_tr * lam;
    if (op_norm <= 0.0) return 1.0;
    return 2.5 / op_norm;  // RK4 real-axis stability boundary is ~2.785
}

double StepController::operator()(double K_now, const MetricField& g) const {
    const double cap = stability_dt(g);
    double hi = max_dt > 0.0 ? std::min(max_dt, cap) : cap;
    double dt = safety * c1 / std::max(K_now, 1e-300);
    dt = std::min(dt, hi);
    return std::max(dt, min_dt);
}

// ---------------------------------------------------------------------------

TensorField heat_step(const TensorField& phi, const TensorField& g_inv, double dt,
                      bool enforce_positivity) {
    if (phi.rank() != 0) throw std::invalid_argument("heat_step: phi must be a scalar field");

    TensorField k1 = function_laplacian(phi, g_inv);
    TensorField s2 = phi.clone();
    {
        TensorField tmp = k1.clone();
        tmp *= cplx(0.5 * dt);
        s2 += tmp;
    }
    TensorField k2 = function_laplacian(s2, g_inv);
    TensorField s3 = phi.clone();
    {
        TensorField tmp = k2.clone();
        tmp *= cplx(0.5 * dt);
        s3 += tmp;
    }
    TensorField k3 = function_laplacian(s3, g_inv);
    TensorField s4 = phi.clone();
    {
        TensorField tmp = k3.clone();
        tmp *= cplx(dt);
        s4 += tmp;
    }
    TensorField k4 = function_laplacian(s4, g_inv);

    TensorField out = phi.clone();
    k2 *= cplx(2.0);
    k3 *= cplx(2.0);
    TensorField incr = k1;
    incr += k2;
    incr += k3;
    incr += k4;
    incr *= cplx(dt / 6.0);
    out += incr;

    require_finite(out, "heat_step");
    if (enforce_positivity && min_real(out) < -1e-12)
        throw NumericalAbort(NumericalAbort::Kind::PositivityLoss,
                             "heat_step: positivity lost (min phi = " +
                                 std::to_string(min_real(out)) + "), dt too large");
    return out;
}

SmpSample smp_monitor(const TensorField& Ric, const MetricField& g, const TensorField& phi,
                      double phi_time, double state_time, double k, double B, double eps) {
    if (std::abs(phi_time - state_time) > 1e-12)
        throw std::invalid_argument("smp_monitor: phi is not synchronized with the flow state");
    const int n = g.n();
    const std::size_t np = g.tensor().npoints();
    const double decay = std::exp(-k * state_time);
    const double grow = eps * std::exp(B * state_time);

    SmpSample out{-std::numeric_limits<double>::infinity(), 0};
    for (std::size_t p = 0; p < np; ++p) {
        const double f = phi.at(0, p).real();
        const double coeff = decay * f * f - grow;
        pointwise::Mat a = pointwise::gather(Ric, p);
        const pointwise::Mat gm = pointwise::gather(g.tensor(), p);
        a += coeff * gm;
        const pointwise::RVec ev = pointwise::pencil_eigvals(a, gm);
        if (ev(n - 1) > out.max_eigenvalue) {
            out.max_eigenvalue = ev(n - 1);
            out.argmax = p;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

FlowResult run_flow(FlowState initial, const FlowOptions& opt, const StepCallback& on_step) {
    if (!initial.pkg) initial.refresh_package();

    FlowResult result{std::move(initial), {}, {}, 0.0, false, "", false};
    FlowState& state = result.final_state;

    // Heat companion setup.
    TensorField phi(state.g.grid_ptr(), Signature{});
    TensorField ginv_cache = state.g.inverse();
    if (opt.heat.enabled) {
        std::vector<double> center(static_cast<std::size_t>(state.g.grid().naxes()), 0.0);
        TrigPoly bump = bump_profile(state.g.n(), state.g.grid().period(0), opt.heat.bump_power,
                                     opt.heat.bump_amplitude, center);
        phi = sample_scalar(state.g.grid_ptr(), bump);
        // assertion mode applies when Ric(g0) + phi0^2 g0 <= 0
        TensorField shifted = state.pkg->Ric_first.clone();
        const std::size_t np = shifted.npoints();
        for (std::size_t c = 0; c < shifted.ncomp(); ++c) {
            auto dst = shifted.comp(c);
            auto gsrc = state.g.tensor().comp(c);
            for (std::size_t p = 0; p < np; ++p) {
                const double f = phi.at(0, p).real();
                dst[p] += f * f * gsrc[p];
            }
        }
        RicciSpectrum spec = ricci_spectrum(shifted, state.g);
        result.smp_assertion_active = spec.global_max <= opt.monitors.tolerance;
    }

    auto record = [&](double dt_used, double drift) {
        const TensorNorms norms = tensor_norms(*state.pkg);
        TrajectoryRecord row{state.step_count,
                             state.t,
                             dt_used,
                             norms.sup_rm,
                             norms.sup_t_sq,
                             norms.sup_gradT,
                             norms.sup_F,
                             norms.K_now,
                             kNaN,
                             kNaN,
                             kNaN,
                             kNaN,
                             kNaN,
                             drift};

        RicciSpectrum spec = ricci_spectrum(state.pkg->Ric_first, state.g);
        row.ricci_max_eig = spec.global_max;

        const bool cond_step = opt.monitors.conditions_enabled &&
                               (state.step_count % std::max(1, opt.monitors.condition_every) == 0);
        if (cond_step) {
            GriffithsOptions gopt = opt.monitors.griffiths;
            gopt.seed = opt.seed;
            GriffithsField gf = griffiths_field(state.pkg->Rm_lowered, state.g, gopt,
                                                opt.monitors.condition_stride);
            row.kappa_hat = gf.global_max;
            if (opt.monitors.epsilon > 0.0) {
                EpsilonShift shift =
                    eps_shift(state.pkg->Rm_lowered, state.g, opt.monitors.epsilon);
                PinchOptions popt;
                popt.K = opt.monitors.K;
                popt.t = state.t;
                popt.samples = opt.monitors.pinch_samples;
                popt.seed = splitmix64(opt.seed ^ static_cast<std::uint64_t>(state.step_count));
                popt.stride = opt.monitors.condition_stride;
                row.pinch_min = pinch_margin(shift, state.g, popt).min_margin;
            }
        }
        if (opt.heat.enabled) {
            row.min_phi = min_real(phi);
            row.max_eig_A = smp_monitor(state.pkg->Ric_first, state.g, phi, state.t, state.t,
                                        opt.heat.k, opt.heat.B, opt.heat.eps)
                                .max_eigenvalue;
        }
        return row;
    };

    auto snapshot = [&](const TensorNorms& norms) {
        Snapshot snap{state.step_count, state.t, MetricField(state.g.tensor().clone()),
                      norms.F.clone(),
                      opt.heat.enabled ? std::optional<TensorField>(phi.clone()) : std::nullopt};
        result.snapshots.push_back(std::move(snap));
    };

    // initial record + snapshot
    double K_now_current;
    {
        TrajectoryRecord row0 = record(0.0, 0.0);
        result.K0 = row0.K_now;
        K_now_current = row0.K_now;
        result.series.push_back(row0);
        if (on_step) on_step(state, row0);
        snapshot(tensor_norms(*state.pkg));
    }

    try {
        while (state.t < opt.t_end && state.step_count < opt.max_steps) {
            double dt = opt.controller(K_now_current, state.g);
            dt = std::min(dt, opt.t_end - state.t);

            // advance the heat companion on the pre-step metric (frozen in dt)
            if (opt.heat.enabled) {
                const double cap = 0.9 * stability_dt(state.g);
                const int substeps = std::max(1, static_cast<int>(std::ceil(dt / cap)));
                const double h = dt / substeps;
                for (int s = 0; s < substeps; ++s) phi = heat_step(phi, ginv_cache, h);
            }

            StepOutcome outcome = step_hcf(state, dt);
            state = std::move(outcome.state);
            ginv_cache = state.g.inverse();

            const bool rec = (state.step_count % std::max(1, opt.record_every) == 0) ||
                             state.t >= opt.t_end;
            if (rec) {
                TrajectoryRecord row = record(dt, outcome.hermitian_drift);
                K_now_current = row.K_now;
                result.series.push_back(row);
                if (on_step) on_step(state, row);
            } else {
                K_now_current = tensor_norms(*state.pkg).K_now;
            }
            if (state.step_count % std::max(1, opt.snapshot_every) == 0 || state.t >= opt.t_end)
                snapshot(tensor_norms(*state.pkg));
        }
    } catch (const NumericalAbort& e) {
        result.aborted = true;
        result.abort_reason = e.what();
    }
    return result;
}

// ---------------------------------------------------------------------------

DoublingReport doubling_check(const FlowResult& result, double c1, double c0_allowance) {
    if (result.series.size() < 3 || result.snapshots.size() < 3)
        throw std::invalid_argument("doubling_check: insufficient trajectory length");

    DoublingReport rep{};
    rep.K0 = result.K0;
    rep.window_end = c1 / std::max(rep.K0, 1e-300);

    rep.within_2K0 = true;
    rep.max_K_over_window = 0.0;
    for (const auto& row : result.series) {
        if (row.t > rep.window_end) break;
        rep.max_K_over_window = std::max(rep.max_K_over_window, row.K_now);
        if (row.K_now > 2.0 * rep.K0 * (1.0 + 1e-9)) rep.within_2K0 = false;
    }

    // c0 from F_sup(t)^{-1/2} ~ K0^{-1} - c0 t with the intercept pinned at
    // K0^{-1} (F_sup(0) <= K0^2, so the t = 0 bound already envelopes).
    double num = 0.0, den = 0.0;
    const double y0 = 1.0 / std::max(rep.K0, 1e-300);
    for (const auto& row : result.series) {
        if (row.t > rep.window_end || !(row.F_sup > 0.0)) continue;
        const double y = 1.0 / std::sqrt(row.F_sup);
        num += (y0 - y) * row.t;
        den += row.t * row.t;
    }
    rep.c0_fit = den > 0.0 ? num / den : 0.0;

    // The bound model (K0^{-1} - c0 t)^{-2} only makes sense for c0 >= 0
    // (the raw fit goes negative on decaying series); floor it for the bound.
    const double c0_bound = std::max(rep.c0_fit, 0.0);
    rep.envelope_ratio = 0.0;
    for (const auto& row : result.series) {
        if (row.t > rep.window_end) break;
        const double base = y0 - c0_bound * row.t;
        const double bound = base > 0.0 ? 1.0 / (base * base) : std::numeric_limits<double>::infinity();
        if (std::isfinite(bound) && bound > 0.0)
            rep.envelope_ratio = std::max(rep.envelope_ratio, row.F_sup / bound);
    }
    rep.envelope_within_factor2 = rep.envelope_ratio <= 2.0;

    // pointwise (d/dt - Lap) F <= 2 c0 F^{3/2} as a residual over snapshot triples
    const double c0_used = std::max(rep.c0_fit, 0.0);
    rep.residual_max = -std::numeric_limits<double>::infinity();
    rep.c0_required = 0.0;
    double scale = 0.0;
    double sup_F32 = 0.0;
    for (std::size_t i = 1; i + 1 < result.snapshots.size(); ++i) {
        const Snapshot& lo = result.snapshots[i - 1];
        const Snapshot& mid = result.snapshots[i];
        const Snapshot& hi = result.snapshots[i + 1];
        if (mid.t > rep.window_end) break;
        const double dt2 = hi.t - lo.t;
        if (!(dt2 > 0.0)) continue;
        TensorField ginv = mid.g.inverse();
        TensorField lap(mid.F_field.grid_ptr(), Signature{});
        {
            const int n = mid.g.n();
            for (int s = 0; s < n; ++s) {
                TensorField ds = partial_anti(mid.F_field, s);
                for (int r = 0; r < n; ++r) {
                    TensorField drs = partial_holo(ds, r);
                    axpy_scalar_field(lap, ginv.comp(ginv.comp_index({r, s})), drs, 1.0);
                }
            }
        }
        const double F_floor = 1e-3 * std::max(result.series.front().F_sup, 1e-300);
        const std::size_t np = mid.F_field.npoints();
        for (std::size_t p = 0; p < np; ++p) {
            const double dF = (hi.F_field.at(0, p).real() - lo.F_field.at(0, p).real()) / dt2;
            const double lp = lap.at(0, p).real();
            const double F = std::max(mid.F_field.at(0, p).real(), 0.0);
            const double F32 = std::pow(F, 1.5);
            const double res = dF - lp - 2.0 * c0_used * F32;
            rep.residual_max = std::max(rep.residual_max, res);
            scale = std::max(scale, std::abs(dF) + std::abs(lp));
            sup_F32 = std::max(sup_F32, F32);
            if (F > F_floor) rep.c0_required = std::max(rep.c0_required, (dF - lp) / (2.0 * F32));
        }
    }
    // tolerance: the allowed universal constant, plus centered-difference noise
    rep.residual_tol = std::max(1e-10, 2.0 * c0_allowance * sup_F32 + 0.02 * scale);
    rep.residual_pass = rep.residual_max <= rep.residual_tol;
    return rep;
}

}  // namespace hcf
