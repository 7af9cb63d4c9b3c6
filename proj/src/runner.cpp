#include "agingmimo/runner.hpp"

#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "agingmimo/bounds.hpp"
#include "agingmimo/combining.hpp"
#include "agingmimo/csv.hpp"
#include "agingmimo/estimation.hpp"
#include "agingmimo/frame.hpp"
#include "agingmimo/linalg.hpp"
#include "agingmimo/optimizer.hpp"
#include "agingmimo/rng.hpp"
#include "agingmimo/scenario.hpp"
#include "agingmimo/special.hpp"
#include "agingmimo/system.hpp"

namespace agingmimo {

namespace {

constexpr const char* kVersion = "0.1.0";

bool log_enabled() {
    const char* v = std::getenv("AGING_MIMO_LOG");
    return v != nullptr && *v != '\0';
}

void log_line(const std::string& s) {
    if (log_enabled()) std::cerr << "[aging-mimo] " << s << std::endl;
}

std::string utc_timestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string hex_u64(std::uint64_t v) {
    std::ostringstream ss;
    ss << "0x" << std::hex << v;
    return ss.str();
}

struct RunContext {
    RunnerOptions opts;
    ScenarioConfig cfg;
    std::uint64_t scenario_hash = 0;
    std::uint64_t seed = 0;
    int trials = 1;
    std::vector<std::string> outputs;

    std::string out_path(const std::string& base) const {
        return opts.out_dir.empty() ? base : opts.out_dir + "/" + base;
    }
};

void write_manifest(const RunContext& ctx) {
    nlohmann::json m;
    m["tool"] = "aging-mimo";
    m["version"] = kVersion;
    m["command"] = ctx.opts.command;
    m["scenario"] = ctx.cfg.name;
    m["scenario_path"] = ctx.opts.scenario_path;
    m["scenario_hash"] = hex_u64(ctx.scenario_hash);
    m["seed"] = ctx.seed;
    m["trials"] = ctx.trials;
    m["threads"] = ctx.opts.threads;
    m["timestamp"] = utc_timestamp();
    m["outputs"] = ctx.outputs;
    write_file(ctx.out_path("manifest.json"), m.dump(2) + "\n");
}

void require_finite(double v, const std::string& what) {
    if (!std::isfinite(v)) throw NumericalError(what + " is not finite");
}

/// Beamformers used by the Monte-Carlo commands: the per-user rule in
/// "optimal" mode.  Covariance-shaped isotropic transmission has no per-trial
/// direction, so it is limited to the deterministic commands.
std::vector<VecC> mc_beamformers(const BuiltSystem& sys, const SlotStats& ss,
                                 double data_power) {
    if (sys.cfg.beamformer_mode != "optimal")
        throw ScenarioError(sys.cfg.name +
                            ": Monte-Carlo commands need beamformer = 'optimal'");
    return slot_beamformers(sys.ensemble, ss, data_power);
}

const SlotStats& stats_at_slot(const std::vector<SlotStats>& all, int slot) {
    for (const SlotStats& s : all)
        if (s.slot == slot) return s;
    throw ScenarioError("slot " + std::to_string(slot) + " is not a data slot");
}

// ---------------------------------------------------------------------------
// correlate: whitened space-time correlation of one user against a reference
// slot, entry by entry.
// ---------------------------------------------------------------------------
void run_correlate(RunContext& ctx) {
    if (!ctx.cfg.has_correlate)
        throw ScenarioError(ctx.cfg.name + ": correlate command needs a correlate section");
    const CorrelateConfig& co = ctx.cfg.correlate;
    const BuiltSystem sys = build_system(ctx.cfg, ctx.cfg.n_rx, co.numeric);
    const SecondOrderStats& stats = sys.ensemble.stats[co.user];

    std::vector<std::vector<std::string>> rows;
    for (int t = co.t_start; t <= co.t_end; ++t) {
        log_line("correlate: slot " + std::to_string(t));
        const MatC p = stats.corr(co.reference_t, t);
        for (Eigen::Index r = 0; r < p.rows(); ++r)
            for (Eigen::Index c = 0; c < p.cols(); ++c) {
                require_finite(p(r, c).real(), "correlation entry");
                rows.push_back({format_int(co.reference_t), format_int(t),
                                format_int(r), format_int(c),
                                format_double(p(r, c).real()),
                                format_double(p(r, c).imag())});
            }
    }
    write_csv(ctx.out_path("correlate.csv"), {"t1", "t2", "row", "col", "re", "im"}, rows);
    ctx.outputs.push_back("correlate.csv");
}

// ---------------------------------------------------------------------------
// estimate: analytic estimator traces per data slot plus a Monte-Carlo check
// through the full pilot synthesis pipeline.
// ---------------------------------------------------------------------------
void run_estimate(RunContext& ctx) {
    if (!ctx.cfg.has_frame || !ctx.cfg.has_powers)
        throw ScenarioError(ctx.cfg.name + ": estimate needs frame and powers sections");
    const BuiltSystem sys = build_system(ctx.cfg);
    const UplinkEnsemble& ens = sys.ensemble;
    const PowerSplit split = split_powers(ctx.cfg.pilot_budget, ctx.cfg.data_budget, sys.frame);
    const std::vector<MatR> pilots =
        pilot_matrices(ens.n_users(), ctx.cfg.n_tx, ctx.cfg.tau_p);
    const Eigen::Index n = static_cast<Eigen::Index>(ctx.cfg.n_tx) * sys.n_rx;

    std::vector<std::vector<std::string>> rows;
    for (int slot : sys.frame.data_slots) {
        log_line("estimate: slot " + std::to_string(slot));
        const std::vector<int> ptimes = pilot_times_for_slot(sys.frame, slot);
        const int np = static_cast<int>(ptimes.size());

        // Per-user estimators and joint square-root factors over
        // (pilot times..., slot).
        std::vector<LmmseEstimator> est;
        std::vector<MatC> joint_factor;
        for (int k = 0; k < ens.n_users(); ++k) {
            const double reg = pilot_regularizer(ens.pilot_noise_var, ens.gains[k],
                                                 split.pilot, ens.tau_p);
            est.push_back(make_estimator(ens.stats[k], ptimes, slot, reg));
            std::vector<int> times = ptimes;
            times.push_back(slot);
            MatC joint(static_cast<Eigen::Index>(times.size()) * n,
                       static_cast<Eigen::Index>(times.size()) * n);
            for (std::size_t a = 0; a < times.size(); ++a)
                for (std::size_t b = 0; b < times.size(); ++b)
                    joint.block(a * n, b * n, n, n) =
                        ens.stats[k].cross_cov(times[a], times[b]);
            joint_factor.push_back(psd_factor(hermitize(joint)));
        }

        std::vector<double> mc_err(ens.n_users(), 0.0);
        std::vector<MatC> ortho(ens.n_users(), MatC::Zero(n, n));
        for (int trial = 0; trial < ctx.trials; ++trial) {
            Rng rng(derive_seed(ctx.seed, "estimate",
                                (static_cast<std::uint64_t>(slot) << 32) ^
                                    static_cast<std::uint64_t>(trial)));
            // Joint channel draw per user across pilot times and the slot.
            std::vector<std::vector<MatC>> h_pilot(np);  // [pilot][user]
            std::vector<VecC> h_slot(ens.n_users());
            for (int k = 0; k < ens.n_users(); ++k) {
                const VecC x = joint_factor[k] * rng.cgaussian_vec(
                                                     static_cast<int>((np + 1) * n));
                for (int a = 0; a < np; ++a)
                    h_pilot[a].push_back(
                        unvec(x.segment(a * n, n), sys.n_rx, ctx.cfg.n_tx));
                h_slot[k] = x.segment(static_cast<Eigen::Index>(np) * n, n);
            }
            // Pilot transmission, matched filtering, estimation.
            for (int k = 0; k < ens.n_users(); ++k) {
                VecC z(static_cast<Eigen::Index>(np) * n);
                for (int a = 0; a < np; ++a) {
                    // Received block is shared across users per pilot time, but
                    // each user's despreading only sees its own slice; generate
                    // once per (trial, pilot) deterministically.
                    Rng noise_rng(derive_seed(
                        ctx.seed, "estimate-noise",
                        (static_cast<std::uint64_t>(slot) << 40) ^
                            (static_cast<std::uint64_t>(trial) << 8) ^
                            static_cast<std::uint64_t>(a)));
                    const MatC y =
                        synthesize_pilot_rx(h_pilot[a], ens.gains, pilots, split.pilot,
                                            ens.pilot_noise_var, noise_rng);
                    z.segment(static_cast<Eigen::Index>(a) * n, n) =
                        despread_pilot(y, pilots[k], ens.gains[k], split.pilot);
                }
                const VecC hhat = est[k].estimate(z);
                const VecC err = h_slot[k] - hhat;
                mc_err[k] += err.squaredNorm();
                ortho[k] += err * hhat.adjoint();
            }
        }

        for (int k = 0; k < ens.n_users(); ++k) {
            const MatC est_cov = est[k].estimate_cov();
            const MatC q = error_cov(ens.stats[k], est[k], slot);
            const double cov_tr = ens.stats[k].cov(slot).real().trace();
            const double est_tr = est_cov.real().trace();
            const double err_tr = q.real().trace();
            const double mc_tr = mc_err[k] / ctx.trials;
            const double ortho_res =
                (ortho[k] / static_cast<double>(ctx.trials)).norm() /
                std::max(est_cov.norm(), 1e-300);
            require_finite(mc_tr, "estimation error trace");
            rows.push_back({format_int(slot), format_int(k), format_double(cov_tr),
                            format_double(est_tr), format_double(err_tr),
                            format_double(mc_tr), format_double(ortho_res)});
        }
    }
    write_csv(ctx.out_path("estimate.csv"),
              {"slot", "user", "cov_trace", "est_cov_trace", "err_cov_trace",
               "mc_err_trace", "ortho_res"},
              rows);
    ctx.outputs.push_back("estimate.csv");
}

// ---------------------------------------------------------------------------
// se-det / se-mc: per-slot deterministic rate expansion over the receive-array
// sweep, optionally validated by Monte Carlo.
// ---------------------------------------------------------------------------
void run_se(RunContext& ctx, bool with_mc) {
    if (!ctx.cfg.has_frame || !ctx.cfg.has_powers)
        throw ScenarioError(ctx.cfg.name + ": se commands need frame and powers sections");
    std::vector<int> sweep = ctx.cfg.evaluation.n_rx_sweep;
    if (sweep.empty()) sweep.push_back(ctx.cfg.n_rx);

    std::vector<std::vector<std::string>> rows;
    for (int n_rx : sweep) {
        const BuiltSystem sys = build_system(ctx.cfg, n_rx);
        const PowerSplit split =
            split_powers(ctx.cfg.pilot_budget, ctx.cfg.data_budget, sys.frame);
        const std::vector<SlotStats> stats =
            slot_statistics(sys.ensemble, sys.frame, split.pilot);
        for (const SlotStats& ss : stats) {
            log_line("se: n_rx " + std::to_string(n_rx) + " slot " +
                     std::to_string(ss.slot));
            std::vector<VecC> bf;
            const std::vector<VecC>* bf_ptr = nullptr;
            if (with_mc) {
                bf = mc_beamformers(sys, ss, split.data);
                bf_ptr = &bf;
            } else if (ctx.cfg.beamformer_mode == "optimal") {
                bf = slot_beamformers(sys.ensemble, ss, split.data);
                bf_ptr = &bf;
            }
            const std::vector<DetEquivUser> users =
                slot_users(sys.ensemble, ss, split.data, bf_ptr);
            const FixedPointResult fp = fixed_point(users, ctx.cfg.data_noise_var);
            if (!fp.converged)
                throw NumericalError("fixed point did not converge at slot " +
                                     std::to_string(ss.slot));
            const MatC* fluct = ctx.cfg.variance_from_true_cov ? &ss.cov[0] : nullptr;
            const SeDeterministic sd =
                se_deterministic(users, ctx.cfg.data_noise_var, fp, fluct);
            require_finite(sd.se, "deterministic spectral efficiency");

            std::string mc_val, mc_err;
            if (with_mc) {
                const std::uint64_t s = derive_seed(
                    ctx.seed, "se-mc",
                    (static_cast<std::uint64_t>(n_rx) << 32) ^
                        static_cast<std::uint64_t>(ss.slot));
                const std::vector<BoundEstimate> b = bounds_compare(
                    users, ctx.cfg.data_noise_var, ctx.trials, s, ctx.opts.threads);
                require_finite(b[0].value, "Monte-Carlo spectral efficiency");
                mc_val = format_double(b[0].value);
                mc_err = format_double(b[0].stderr_value);
            }
            rows.push_back({format_int(n_rx), format_int(ss.slot), format_double(sd.se),
                            mc_val, mc_err});
        }
    }
    const std::string base = with_mc ? "se_mc.csv" : "se_det.csv";
    write_csv(ctx.out_path(base), {"n_rx", "slot", "se_det", "se_mc", "stderr"}, rows);
    ctx.outputs.push_back(base);
}

// ---------------------------------------------------------------------------
// bounds: capacity-bound comparison at the evaluation slot over the sweep.
// ---------------------------------------------------------------------------
void run_bounds(RunContext& ctx) {
    if (!ctx.cfg.has_frame || !ctx.cfg.has_powers)
        throw ScenarioError(ctx.cfg.name + ": bounds needs frame and powers sections");
    std::vector<int> sweep = ctx.cfg.evaluation.n_rx_sweep;
    if (sweep.empty()) sweep.push_back(ctx.cfg.n_rx);

    std::vector<std::vector<std::string>> rows;
    for (int n_rx : sweep) {
        const BuiltSystem sys = build_system(ctx.cfg, n_rx);
        const PowerSplit split =
            split_powers(ctx.cfg.pilot_budget, ctx.cfg.data_budget, sys.frame);
        const int slot = evaluation_slot(sys);
        const std::vector<SlotStats> stats =
            slot_statistics(sys.ensemble, sys.frame, split.pilot);
        const SlotStats& ss = stats_at_slot(stats, slot);
        log_line("bounds: n_rx " + std::to_string(n_rx) + " slot " + std::to_string(slot));
        const std::vector<VecC> bf = mc_beamformers(sys, ss, split.data);
        const std::vector<DetEquivUser> users =
            slot_users(sys.ensemble, ss, split.data, &bf);
        const std::uint64_t s =
            derive_seed(ctx.seed, "bounds-sweep", static_cast<std::uint64_t>(n_rx));
        for (const BoundEstimate& b : bounds_compare(users, ctx.cfg.data_noise_var,
                                                     ctx.trials, s, ctx.opts.threads)) {
            require_finite(b.value, "bound '" + b.method + "'");
            rows.push_back({format_int(n_rx), b.method, format_double(b.value),
                            format_double(b.stderr_value)});
        }
    }
    write_csv(ctx.out_path("bounds.csv"), {"n_rx", "method", "value", "stderr"}, rows);
    ctx.outputs.push_back("bounds.csv");
}

// ---------------------------------------------------------------------------
// optimize: exhaustive frame search with alternating beamformer/power steps.
// ---------------------------------------------------------------------------
void run_optimize(RunContext& ctx) {
    if (!ctx.cfg.has_optimizer)
        throw ScenarioError(ctx.cfg.name + ": optimize needs an optimizer section");
    const BuiltSystem sys = build_system(ctx.cfg);

    OptimizerConfig ocfg;
    ocfg.q_max = ctx.cfg.optimizer.q_max;
    ocfg.m_max = ctx.cfg.optimizer.m_max;
    ocfg.total_power = ctx.cfg.optimizer.total_power;
    ocfg.ao_rounds = ctx.cfg.optimizer.ao_rounds;
    ocfg.beamformer_mode = ctx.cfg.beamformer_mode == "isotropic"
                               ? BeamformerMode::isotropic
                               : BeamformerMode::optimal;
    ocfg.variance_from_true_cov = ctx.cfg.variance_from_true_cov;

    const OptimizeResult res = opt_resource(sys.ensemble, ocfg);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < res.plans.size(); ++i) {
        const PlanResult& p = res.plans[i];
        require_finite(p.dase_value, "plan objective");
        std::string qlist;
        for (std::size_t b = 0; b < p.plan.sizes.size(); ++b) {
            if (b) qlist += ';';
            qlist += format_int(p.plan.sizes[b]);
        }
        log_line("optimize: plan " + std::to_string(i) + " dase " +
                 format_double(p.dase_value));
        rows.push_back({format_int(static_cast<long long>(i)), format_int(p.plan.m()),
                        qlist, format_double(p.dase_value),
                        format_double(p.pilot_budget), format_double(p.data_budget),
                        p.best ? "1" : "0"});
    }
    write_csv(ctx.out_path("optimize.csv"),
              {"plan_id", "m", "q_list", "dase", "pilot_max", "data_max", "is_best"},
              rows);
    ctx.outputs.push_back("optimize.csv");
}

// ---------------------------------------------------------------------------
// selftest: fast internal identities, no scenario required.
// ---------------------------------------------------------------------------
bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

int run_selftest() {
    int failures = 0;
    auto check = [&failures](const char* name, bool ok) {
        std::cout << "selftest: " << name << (ok ? " ok" : " FAILED") << "\n";
        if (!ok) ++failures;
    };

    {
        const FrameSchedule f = make_frame({2, 3});
        check("frame-layout", f.duration == 5 && f.pilot_slots == std::vector<int>{1, 3} &&
                                  f.data_slots == std::vector<int>{2, 4, 5} &&
                                  f.block_of(4) == 2);
    }
    {
        const std::vector<MatR> s = pilot_matrices(2, 2, 4);
        const MatR g01 = s[0].transpose() * s[1];
        const MatR g00 = s[0].transpose() * s[0];
        check("pilot-orthogonality",
              g01.norm() == 0.0 && (g00 - 4.0 * MatR::Identity(2, 2)).norm() == 0.0);
    }
    {
        Rng rng(7);
        const int n_rx = 3, n_tx = 2;
        const VecC h = rng.cgaussian_vec(n_rx * n_tx);
        const VecC w = rng.cgaussian_vec(n_tx).normalized();
        const MatC d = h * h.adjoint();
        const MatC lhs = apply_A(d, w * w.adjoint(), n_rx);
        const VecC u = unvec(h, n_rx, n_tx) * w;
        check("quadratic-contraction", (lhs - u * u.adjoint()).norm() < 1e-12);
    }
    {
        Rng rng(9);
        MatC x(3, 2);
        for (int i = 0; i < x.size(); ++i) x(i / 2, i % 2) = rng.cgaussian();
        const MatR p = commutation(3, 2);
        const VecC lhs = p.cast<cxd>() * vec(x);
        check("commutation", (lhs - vec(MatC(x.transpose()))).norm() == 0.0);
    }
    {
        VecR v(2);
        v << 0.8, 0.9;
        const VecR pr = project_power(v, 1.0);
        check("power-projection",
              close(pr.sum(), 1.0, 1e-12) && pr.minCoeff() >= 0.0 &&
                  close(pr[1] - pr[0], 0.1, 1e-12));
    }
    {
        const double x = 1.7;
        const cxd i0 = bessel_i0_scaled(cxd(0.0, x));  // purely imaginary: I0(jx) = J0(x)
        check("bessel-rotation", close(i0.real(), bessel_j0(x), 1e-12) &&
                                     std::abs(i0.imag()) < 1e-12);
    }
    {
        const QuadratureResult q =
            integrate([](double t) { return cxd(std::sin(t), 0.0); }, 0.0, pi, 1e-12);
        check("quadrature", q.converged && close(q.value.real(), 2.0, 1e-10));
    }
    return failures == 0 ? 0 : 3;
}

void dispatch(RunContext& ctx) {
    const std::string& cmd = ctx.opts.command;
    if (cmd == "correlate")
        run_correlate(ctx);
    else if (cmd == "estimate")
        run_estimate(ctx);
    else if (cmd == "se-det")
        run_se(ctx, false);
    else if (cmd == "se-mc")
        run_se(ctx, true);
    else if (cmd == "bounds")
        run_bounds(ctx);
    else if (cmd == "optimize")
        run_optimize(ctx);
    else
        throw ScenarioError("unknown command: " + cmd);
}

}  // namespace

int run_command(const RunnerOptions& opts) {
    if (opts.command == "selftest") return run_selftest();
    try {
        RunContext ctx;
        ctx.opts = opts;
        if (opts.scenario_path.empty())
            throw ScenarioError(opts.command + ": --scenario is required");
        const std::string raw = read_file(opts.scenario_path);
        ctx.scenario_hash = fnv1a64(raw);
        ctx.cfg = parse_scenario_json(raw, opts.scenario_path);
        ctx.seed = opts.seed_overridden ? opts.seed : ctx.cfg.seed;
        ctx.trials = opts.trials > 0 ? opts.trials : ctx.cfg.evaluation.trials;
        if (!opts.out_dir.empty()) {
            std::error_code ec;
            std::filesystem::create_directories(opts.out_dir, ec);
            if (ec)
                throw IoError("cannot create output directory: " + opts.out_dir +
                              " (" + ec.message() + ")");
        }
        log_line("scenario '" + ctx.cfg.name + "' hash " + hex_u64(ctx.scenario_hash) +
                 " seed " + std::to_string(ctx.seed));
        dispatch(ctx);
        write_manifest(ctx);
        return 0;
    } catch (const ScenarioError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 4;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 3;
    }
}

}  // namespace agingmimo
