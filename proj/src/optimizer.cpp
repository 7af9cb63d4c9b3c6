#include "agingmimo/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "agingmimo/estimation.hpp"
#include "agingmimo/linalg.hpp"

namespace agingmimo {

namespace {

constexpr double kPowerFloor = 1e-12;

}  // namespace

std::vector<DetEquivUser> slot_users(const UplinkEnsemble& ens, const SlotStats& ss,
                                     double data_power,
                                     const std::vector<VecC>* beamformers) {
    const int k = ens.n_users();
    std::vector<DetEquivUser> users(k);
    for (int j = 0; j < k; ++j) {
        users[j].gain = ens.gains[j];
        users[j].data_power = data_power;
        users[j].est_cov = ss.est_cov[j];
        users[j].err_cov = ss.err_cov[j];
        if (beamformers) {
            users[j].beamformer = (*beamformers)[j];
        } else {
            users[j].beamformer = VecC::Constant(ens.n_tx(), cxd(1.0, 0.0));
            users[j].beamformer.normalize();
            users[j].tx_shape =
                MatC::Identity(ens.n_tx(), ens.n_tx()) / static_cast<double>(ens.n_tx());
        }
    }
    return users;
}

std::vector<VecC> slot_beamformers(const UplinkEnsemble& ens, const SlotStats& ss,
                                   double data_power, const std::vector<VecC>* current) {
    const int k = ens.n_users();
    const std::vector<DetEquivUser> base = slot_users(ens, ss, data_power, current);
    std::vector<VecC> next(k);
    for (int j = 0; j < k; ++j) {
        std::vector<DetEquivUser> rotated;
        rotated.reserve(k);
        rotated.push_back(base[j]);
        for (int l = 0; l < k; ++l)
            if (l != j) rotated.push_back(base[l]);
        const FixedPointResult fp = fixed_point(rotated, ens.data_noise_var);
        const MatC g = g_operator(base[j].est_cov, fp.t);
        next[j] = optimal_beamformer(g);
    }
    return next;
}

std::vector<PlanSpec> enumerate_plans(int q_max, int m_max) {
    if (q_max < 2 || m_max < 1)
        throw std::invalid_argument("enumerate_plans: bounds too small for any frame");
    std::vector<PlanSpec> plans;
    for (int m = 1; m <= m_max; ++m) {
        const int q_hi = (q_max + m - 1) / m;
        if (q_hi < 2) continue;
        // Odometer over {2..q_hi}^m in lexicographic order.
        std::vector<int> sizes(m, 2);
        for (;;) {
            plans.push_back({sizes});
            int pos = m - 1;
            while (pos >= 0 && sizes[pos] == q_hi) sizes[pos--] = 2;
            if (pos < 0) break;
            ++sizes[pos];
        }
    }
    return plans;
}

VecR project_power(const VecR& v, double budget) {
    if (budget < 0) throw std::invalid_argument("project_power: negative budget");
    VecR clipped = v.cwiseMax(0.0);
    if (clipped.sum() <= budget) return clipped;
    // Projection onto the simplex { x >= 0, sum(x) = budget }.
    std::vector<double> u(v.data(), v.data() + v.size());
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, theta = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        css += u[j];
        const double cand = (css - budget) / static_cast<double>(j + 1);
        if (u[j] - cand > 0.0) theta = cand;
    }
    return (v.array() - theta).cwiseMax(0.0);
}

std::vector<SlotStats> slot_statistics(const UplinkEnsemble& ens, const FrameSchedule& frame,
                                       double pilot_power) {
    const double pp = std::max(pilot_power, kPowerFloor);
    std::vector<SlotStats> out;
    out.reserve(frame.data_slots.size());
    for (int slot : frame.data_slots) {
        SlotStats ss;
        ss.slot = slot;
        const std::vector<int> pilots = pilot_times_for_slot(frame, slot);
        for (int j = 0; j < ens.n_users(); ++j) {
            const double reg =
                pilot_regularizer(ens.pilot_noise_var, ens.gains[j], pp, ens.tau_p);
            const LmmseEstimator est = make_estimator(ens.stats[j], pilots, slot, reg);
            ss.est_cov.push_back(est.estimate_cov());
            ss.cov.push_back(ens.stats[j].cov(slot));
            ss.err_cov.push_back(hermitize(ss.cov.back() - ss.est_cov.back()));
        }
        out.push_back(std::move(ss));
    }
    return out;
}

double dase(const UplinkEnsemble& ens, const FrameSchedule& frame, double pilot_budget,
            double data_budget, const std::vector<std::vector<VecC>>& beamformers,
            bool variance_from_true_cov) {
    const PowerSplit split = split_powers(std::max(pilot_budget, kPowerFloor),
                                          std::max(data_budget, kPowerFloor), frame);
    const std::vector<SlotStats> stats = slot_statistics(ens, frame, split.pilot);
    double sum = 0.0;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const std::vector<VecC>* bf = beamformers.empty() ? nullptr : &beamformers[i];
        std::vector<DetEquivUser> users = slot_users(ens, stats[i], split.data, bf);
        const FixedPointResult fp = fixed_point(users, ens.data_noise_var);
        const MatC* fluct = variance_from_true_cov ? &stats[i].cov[0] : nullptr;
        const SeDeterministic sd = se_deterministic(users, ens.data_noise_var, fp, fluct);
        sum += sd.se;
    }
    return sum / static_cast<double>(frame.duration);
}

namespace {

std::vector<std::vector<VecC>> update_beamformers(
    const UplinkEnsemble& ens, const std::vector<SlotStats>& stats, double data_power,
    const std::vector<std::vector<VecC>>& current) {
    std::vector<std::vector<VecC>> next(stats.size());
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const std::vector<VecC>* bf = current.empty() ? nullptr : &current[i];
        next[i] = slot_beamformers(ens, stats[i], data_power, bf);
    }
    return next;
}

}  // namespace

PlanResult optimize_plan(const UplinkEnsemble& ens, const PlanSpec& plan,
                         const OptimizerConfig& cfg) {
    const FrameSchedule frame = make_frame(plan.block_sizes());
    VecR budgets(2);
    budgets << cfg.total_power / 2.0, cfg.total_power / 2.0;
    std::vector<std::vector<VecC>> bf;  // empty means isotropic shapes

    auto objective = [&](const VecR& b) {
        return dase(ens, frame, b[0], b[1], bf, cfg.variance_from_true_cov);
    };

    PlanResult r;
    r.plan = plan;
    r.pilot_budget = budgets[0];
    r.data_budget = budgets[1];
    r.dase_value = objective(budgets);
    auto record_best = [&](double value) {
        if (value > r.dase_value) {
            r.dase_value = value;
            r.pilot_budget = budgets[0];
            r.data_budget = budgets[1];
            r.beamformers = bf;
        }
    };

    for (int round = 0; round < cfg.ao_rounds; ++round) {
        if (cfg.beamformer_mode == BeamformerMode::optimal) {
            const PowerSplit split =
                split_powers(std::max(budgets[0], kPowerFloor),
                             std::max(budgets[1], kPowerFloor), frame);
            const std::vector<SlotStats> stats = slot_statistics(ens, frame, split.pilot);
            bf = update_beamformers(ens, stats, split.data, bf);
            if (round == 0) {
                // Baseline for best-seen bookkeeping now includes directions.
                r.dase_value = objective(budgets);
                r.beamformers = bf;
            }
        }

        // Projected gradient ascent on the two per-frame budgets.
        double value = objective(budgets);
        record_best(value);
        const double h = cfg.grad_rel_step * cfg.total_power;
        for (int step = 0; step < cfg.max_power_steps; ++step) {
            VecR grad(2);
            for (int d = 0; d < 2; ++d) {
                VecR hi = budgets, lo = budgets;
                hi[d] += h;
                lo[d] = std::max(lo[d] - h, kPowerFloor);
                grad[d] = (objective(hi) - objective(lo)) / (hi[d] - lo[d]);
            }
            const double gnorm = grad.norm();
            if (gnorm < 1e-14) break;
            const VecR dir = grad / gnorm;

            double mu = 0.1 * cfg.total_power;
            bool improved = false;
            for (int bt = 0; bt < cfg.max_backtracks; ++bt) {
                const VecR trial = project_power(budgets + mu * dir, cfg.total_power);
                const double tv = objective(trial);
                if (tv > value + 1e-14) {
                    budgets = trial;
                    value = tv;
                    improved = true;
                    break;
                }
                mu *= 0.5;
            }
            if (!improved) break;
            record_best(value);
        }
    }
    return r;
}

OptimizeResult opt_resource(const UplinkEnsemble& ens, const OptimizerConfig& cfg) {
    OptimizeResult out;
    for (const PlanSpec& plan : enumerate_plans(cfg.q_max, cfg.m_max))
        out.plans.push_back(optimize_plan(ens, plan, cfg));
    // First plan in (m, lexicographic sizes) order wins ties within 1e-9,
    // preferring fewer pilot blocks and smaller sizes at equal performance.
    for (std::size_t i = 0; i < out.plans.size(); ++i) {
        if (out.best_index < 0 ||
            out.plans[i].dase_value > out.plans[out.best_index].dase_value + 1e-9)
            out.best_index = static_cast<int>(i);
    }
    if (out.best_index >= 0) out.plans[out.best_index].best = true;
    return out;
}

}  // namespace agingmimo
