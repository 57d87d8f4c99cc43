#include "hcf/cli.hpp"

#include <cmath>
#include <limits>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hcf/bandlimited.hpp"
#include "hcf/checkpoint.hpp"
#include "hcf/config.hpp"
#include "hcf/presets.hpp"
#include "hcf/probe.hpp"
#include "hcf/report.hpp"
#include "hcf/verify.hpp"

namespace hcf {

namespace fs = std::filesystem;

namespace {

/// Output root: --out wins, else config value, both resolved under
/// HCFLOW_OUTPUT_ROOT when that is set and the path is relative.
fs::path resolve_output_dir(const RunConfig& cfg, const std::string& out_flag) {
    fs::path dir = out_flag.empty() ? fs::path(cfg.output_dir) : fs::path(out_flag);
    if (dir.is_relative()) {
        if (const char* root = std::getenv("HCFLOW_OUTPUT_ROOT")) dir = fs::path(root) / dir;
    }
    return dir;
}

RunConfig assemble_config(const std::string& config_path, const std::vector<std::string>& sets) {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config_file(config_path);
    for (const auto& s : sets) cfg.set(s);
    cfg.validate();
    return cfg;
}

MetricField initial_metric(const RunConfig& cfg, const GridPtr& grid) {
    Preset preset = make_preset(cfg.preset_name, cfg.n, cfg.period, cfg.amplitude, cfg.modes,
                                cfg.seed);
    return preset.build(grid);
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw std::ios_base::failure("cannot create output directory " + dir.string());
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot write " + path.string());
    out << text;
    if (!out) throw std::ios_base::failure("write failure on " + path.string());
}

ConditionSummary final_conditions(const FlowState& state, const RunConfig& cfg) {
    GriffithsOptions gopt;
    gopt.restarts = cfg.griffiths_restarts;
    gopt.seed = cfg.seed;
    GriffithsField gf = griffiths_field(state.pkg->Rm_lowered, state.g, gopt, cfg.stride);
    RicciSpectrum rs = ricci_spectrum(state.pkg->Ric_first, state.g);
    return classify(gf, rs, cfg.tolerance);
}

// -----------------------------------------------------------------------
// run / resume

int drive_flow(FlowState initial, const RunConfig& cfg, const fs::path& dir,
               const std::string& tag) {
    ensure_dir(dir);
    ensure_dir(dir / "checkpoints");
    write_text(dir / ("config" + tag + ".txt"), cfg.dump());

    const std::uint64_t hash = cfg.hash();
    const bool want_csv = cfg.formats.find("csv") != std::string::npos;
    const bool want_json = cfg.formats.find("json") != std::string::npos;
    std::optional<TimeSeriesWriter> csv;
    if (want_csv) csv.emplace((dir / ("timeseries" + tag + ".csv")).string(), hash, cfg.seed);

    FlowOptions opt = cfg.flow_options();
    const int ckpt_every = std::max(1, cfg.checkpoint_every);
    auto on_step = [&](const FlowState& s, const TrajectoryRecord& row) {
        if (csv) csv->row(row);
        if (s.step_count > 0 && s.step_count % ckpt_every == 0)
            write_checkpoint(
                (dir / "checkpoints" / ("step_" + std::to_string(s.step_count) + ".ckpt")).string(),
                s, cfg.seed, hash);
    };

    FlowResult result = run_flow(std::move(initial), opt, on_step);
    if (csv) csv->flush();
    write_checkpoint((dir / "checkpoints" / "final.ckpt").string(), result.final_state, cfg.seed,
                     hash);

    ConditionSummary cond{};
    const ConditionSummary* cond_ptr = nullptr;
    if (cfg.monitors_enabled && !result.aborted) {
        cond = final_conditions(result.final_state, cfg);
        cond_ptr = &cond;
    }
    // largest recorded t up to which the monitored sign conditions held
    double held_until = std::numeric_limits<double>::quiet_NaN();
    for (const auto& row : result.series) {
        if (std::isnan(row.kappa_hat)) continue;
        if (row.kappa_hat <= cfg.tolerance && row.ricci_max_eig <= cfg.tolerance)
            held_until = row.t;
        else
            break;
    }
    if (want_json)
        write_run_summary((dir / ("summary" + tag + ".json")).string(), hash, cfg.seed, result,
                          cond_ptr, held_until);

    if (result.aborted) {
        std::cerr << "numerical abort: " << result.abort_reason << "\n";
        return kNumericalAbort;
    }
    return kOk;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& sets,
            const std::string& out_flag) {
    RunConfig cfg = assemble_config(config_path, sets);
    GridPtr grid = cfg.make_grid_from_config();
    FlowState state(initial_metric(cfg, grid));
    state.refresh_package();
    return drive_flow(std::move(state), cfg, resolve_output_dir(cfg, out_flag), "");
}

int cmd_resume(const std::string& checkpoint_path, const std::string& config_path,
               const std::vector<std::string>& sets, const std::string& out_flag, bool force) {
    CheckpointData data = read_checkpoint(checkpoint_path);
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config_file(config_path);
    if (!force && cfg.hash() != data.config_hash)
        throw ConfigError("config hash mismatch with checkpoint (use --force to override): config " +
                          hex64(cfg.hash()) + " vs checkpoint " + hex64(data.config_hash));
    for (const auto& s : sets) cfg.set(s);
    cfg.validate();

    // the stored grid is authoritative; a changed grid cannot be resumed
    if (cfg.n != data.n || cfg.resolution != data.resolution ||
        cfg.mode != data.mode || cfg.period != data.period)
        throw ConfigError("resume: incompatible grid (checkpoint has n=" + std::to_string(data.n) +
                          " resolution=" + std::to_string(data.resolution) + " mode=" + data.mode +
                          ")");

    FlowState state = to_flow_state(data);
    state.refresh_package();
    return drive_flow(std::move(state), cfg, resolve_output_dir(cfg, out_flag), "_resume");
}

// -----------------------------------------------------------------------
// check

int cmd_check(const std::string& which, const std::string& config_path,
              const std::vector<std::string>& sets, const std::string& out_flag) {
    RunConfig cfg = assemble_config(config_path, sets);
    const fs::path dir = resolve_output_dir(cfg, out_flag);
    ensure_dir(dir);
    const std::uint64_t hash = cfg.hash();

    nlohmann::json report{{"format", "hcflow-check"},
                          {"version", 1},
                          {"which", which},
                          {"config_hash", hex64(hash)},
                          {"seed", cfg.seed}};
    bool pass = true;
    std::ostringstream text;
    text << "# check " << which << "  config_hash=" << hex64(hash) << " seed=" << cfg.seed << "\n";

    if (which == "identities") {
        GridPtr grid = cfg.make_grid_from_config();
        ChernPackage pkg = compute_chern(initial_metric(cfg, grid));
        auto records = identity_suite(pkg, cfg.check_tolerance, cfg.seed);
        pass = all_pass(records);
        text << format_report(records);
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : records)
            rows.push_back({{"id", r.name}, {"value", r.value}, {"tol", r.tol}, {"pass", r.pass}});
        report["records"] = rows;
    } else if (which == "evolution") {
        GridPtr grid = cfg.make_grid_from_config();
        MetricField g0 = initial_metric(cfg, grid);
        nlohmann::json rows = nlohmann::json::array();
        for (auto q : {EvolvedQuantity::Rm, EvolvedQuantity::Ric}) {
            EvolutionStudy study = evolution_study(g0, cfg.t_star, cfg.deltas, q);
            const auto& last = study.rows.back();
            const bool order_ok = study.measured_order > 1.5 && study.measured_order < 2.5;
            const bool resid_ok = last.residual_sup <= study.tol(last.delta);
            pass = pass && order_ok && resid_ok;
            text << (order_ok && resid_ok ? "PASS" : "FAIL") << "  evolution/"
                 << last.which << "  order " << study.measured_order << "  residual "
                 << last.residual_sup << "  tol " << study.tol(last.delta)
                 << "  (one-sided assembly " << last.residual_sup_onesided << ")\n";
            nlohmann::json deltas = nlohmann::json::array();
            for (const auto& row : study.rows)
                deltas.push_back({{"delta", row.delta},
                                  {"residual_sup", row.residual_sup},
                                  {"residual_mean", row.residual_mean},
                                  {"residual_sup_onesided", row.residual_sup_onesided},
                                  {"rhs_sup", row.rhs_sup}});
            rows.push_back({{"id", std::string("evolution/") + last.which},
                            {"measured_order", study.measured_order},
                            {"fitted_A", study.fitted_A},
                            {"fitted_floor", study.fitted_floor},
                            {"pass", order_ok && resid_ok},
                            {"deltas", deltas}});
        }
        report["records"] = rows;
    } else if (which == "conditions") {
        nlohmann::json rows = nlohmann::json::array();
        auto push = [&](const std::string& id, double value, double tol, bool ok) {
            pass = pass && ok;
            text << (ok ? "PASS" : "FAIL") << "  " << id << "  value " << value << "  tol " << tol
                 << "\n";
            rows.push_back({{"id", id}, {"value", value}, {"tol", tol}, {"pass", ok}});
        };
        if (cfg.preset_name == "synthetic_injection") {
            // closed-form battery on injected point tensors, no grid involved
            const int n = cfg.n;
            pointwise::Mat gm(n, n);
            gm.setZero();
            for (int i = 0; i < n; ++i) gm(i, i) = 1.0;
            PointTensor4 mb = b_tensor_point(gm);
            for (auto& v : mb.v) v = -v;

            GriffithsOptions gopt;
            gopt.restarts = cfg.griffiths_restarts;
            gopt.seed = cfg.seed;
            GriffithsPoint gp = griffiths_extremum_point(mb, gm, gopt);
            const double want = n == 1 ? -2.0 : -1.0;
            push("synthetic/griffiths-minus-b", std::abs(gp.kappa - want), 1e-8,
                 std::abs(gp.kappa - want) <= 1e-8);
            push("synthetic/ratio-bound", std::abs(gp.kappa_ratio + 1.0), 1e-8,
                 std::abs(gp.kappa_ratio + 1.0) <= 1e-8);

            // Ricci of -B is -(n+1) uniformly
            pointwise::Mat ric(n, n);
            ric.setZero();
            for (int i = 0; i < n; ++i) ric(i, i) = -(n + 1.0);
            auto ev = pointwise::pencil_eigvals(ric, gm);
            push("synthetic/ricci-minus-b", std::abs(ev(n - 1) + (n + 1.0)), 1e-10,
                 std::abs(ev(n - 1) + (n + 1.0)) <= 1e-10);

            PinchPointResult pinched =
                pinch_margin_point(mb, ric, gm, cfg.K, 0.0, cfg.pinch_samples, cfg.seed);
            if (n == 1) {
                // equality witness u = v = x at eps = 0
                push("synthetic/pinch-equality-witness", std::abs(pinched.min_margin), 1e-9,
                     std::abs(pinched.min_margin) <= 1e-9);
            } else {
                push("synthetic/pinch-nonnegative", -pinched.min_margin, 1e-9,
                     pinched.min_margin >= -1e-9);
            }
        } else {
            GridPtr grid = cfg.make_grid_from_config();
            MetricField g = initial_metric(cfg, grid);
            ChernPackage pkg = compute_chern(g);
            EpsilonShift shift = eps_shift(pkg.Rm_lowered, g, cfg.epsilon);
            push("conditions/b-trace", shift.trace_residual, 1e-10,
                 shift.trace_residual <= 1e-10);

            GriffithsOptions gopt;
            gopt.restarts = cfg.griffiths_restarts;
            gopt.seed = cfg.seed;
            GriffithsField gf = griffiths_field(shift.R_eps, g, gopt, cfg.stride);
            RicciSpectrum rs = ricci_spectrum(first_ricci_trace(shift.R_eps, pkg.g_inv), g);
            ConditionSummary summary = classify(gf, rs, cfg.tolerance);
            push("conditions/extremizers-converged", gf.all_converged ? 0.0 : 1.0, 0.5,
                 gf.all_converged);
            report["classify"] = {
                {"griffiths_nonpositive", summary.griffiths_nonpositive},
                {"ricci_nonpositive", summary.ricci_nonpositive},
                {"ricci_quasi_negative", summary.ricci_quasi_negative},
                {"kappa_max", summary.kappa_max},
                {"ricci_max_eigenvalue", summary.ricci_max_eigenvalue}};
            text << "info  kappa_max " << summary.kappa_max << "  ricci_max "
                 << summary.ricci_max_eigenvalue << "\n";

            if (cfg.epsilon > 0.0 && summary.griffiths_nonpositive) {
                PinchOptions popt;
                popt.K = cfg.K;
                popt.t = 0.0;
                popt.samples = cfg.pinch_samples;
                popt.seed = cfg.seed;
                popt.stride = cfg.stride;
                PinchReport pr = pinch_margin(shift, g, popt);
                push("conditions/pinch-positive", -pr.min_margin, 0.0, pr.min_margin > 0.0);
            }
        }
        report["records"] = rows;
    } else {
        throw ConfigError("unknown check '" + which + "' (identities | evolution | conditions)");
    }

    report["pass"] = pass;
    write_text(dir / ("check_" + which + ".txt"), text.str());
    write_text(dir / ("check_" + which + ".json"), report.dump(2) + "\n");
    std::cout << text.str();
    return pass ? kOk : kCheckFail;
}

// -----------------------------------------------------------------------
// probe

int cmd_probe(const std::string& config_path, const std::vector<std::string>& sets,
              const std::string& out_flag, const std::string& resolutions_csv) {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config_file(config_path);
    for (const auto& s : sets) cfg.set(s);
    const fs::path dir = resolve_output_dir(cfg, out_flag);
    ensure_dir(dir);

    std::vector<int> resolutions;
    {
        std::stringstream ss(resolutions_csv);
        std::string item;
        while (std::getline(ss, item, ',')) resolutions.push_back(std::stoi(item));
    }

    std::array<double, TrigPoly::kMaxAxes> periods{};
    for (int a = 0; a < 2 * cfg.n; ++a) periods[a] = cfg.period;
    // canonical probe fields: sin(x^1) cos(y^1) and a random band-limited mix
    std::vector<std::pair<std::string, TrigPoly>> cases;
    cases.emplace_back("sin(x1)cos(y1)", TrigPoly::sine(2 * cfg.n, periods, 0) *
                                             TrigPoly::cosine(2 * cfg.n, periods, cfg.n));
    cases.emplace_back("band-limited-random",
                       random_complex_trigpoly(2 * cfg.n, cfg.period, 3, 8, 1.0, cfg.seed));

    std::ostringstream text;
    text << "# derivative convergence probe, d/dz axis 0\n";
    text << "# config_hash=" << hex64(cfg.hash()) << " seed=" << cfg.seed << "\n";
    for (const auto& [name, f] : cases) {
        text << name << "\n";
        auto rows = convergence_probe(f, 0, false, resolutions);
        for (const auto& r : rows)
            text << "  resolution " << r.resolution << "  spectral " << r.err_spectral << "  fd4 "
                 << r.err_fd4 << "\n";
        for (std::size_t i = 1; i < rows.size(); ++i)
            text << "  fd4 ratio " << rows[i - 1].resolution << "->" << rows[i].resolution << ": "
                 << rows[i - 1].err_fd4 / rows[i].err_fd4 << "\n";
    }
    write_text(dir / "probe.txt", text.str());
    std::cout << text.str();
    return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"hcflow: curvature-flow laboratory on discretized complex tori"};
    app.require_subcommand(1);

    std::string config_path, out_flag, resolutions = "16,32,64";
    std::vector<std::string> sets;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "configuration file");
        cmd->add_option("--set", sets, "override: section.key=value")->take_all();
        cmd->add_option("--out", out_flag, "output directory (overrides [output] dir)");
    };

    auto* run = app.add_subcommand("run", "integrate the flow and emit artifacts");
    add_common(run);

    auto* check = app.add_subcommand("check", "run a verification suite");
    std::string which;
    check->add_option("which", which, "identities | evolution | conditions")->required();
    add_common(check);

    auto* resume = app.add_subcommand("resume", "continue from a checkpoint");
    std::string ckpt;
    bool force = false;
    resume->add_option("--checkpoint", ckpt, "checkpoint file")->required();
    resume->add_flag("--force", force, "skip the config-hash match");
    add_common(resume);

    auto* probe = app.add_subcommand("probe", "derivative convergence table");
    add_common(probe);
    probe->add_option("--resolutions", resolutions, "comma-separated resolutions");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            std::cout << app.help() << "\n";
            return kOk;
        }
        std::cerr << "argument error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, sets, out_flag);
        if (check->parsed()) return cmd_check(which, config_path, sets, out_flag);
        if (resume->parsed()) return cmd_resume(ckpt, config_path, sets, out_flag, force);
        if (probe->parsed()) return cmd_probe(config_path, sets, out_flag, resolutions);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const NumericalAbort& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return kNumericalAbort;
    } catch (const CheckpointError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::runtime_error& e) {
        // remaining runtime errors from the numerics (e.g. positivity at build)
        std::cerr << "numerical abort: " << e.what() << "\n";
        return kNumericalAbort;
    }
    return kOk;
}

}  // namespace hcf
