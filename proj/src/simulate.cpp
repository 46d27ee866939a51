#include "contract_lab/simulate.hpp"

#include "contract_lab/format.hpp"
#include "contract_lab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace contract_lab {

namespace {

constexpr double kMaxExponent = 709.0;

// Deterministic schedule values at the left end of each step.
struct StepTable {
    int n = 0;
    double h = 0.0;
    std::vector<double> z, effort, drift;
};

StepTable tabulate(const ModelParams& p, const IntensitySpec& intensity, const WagePolicy& policy,
                   int n_steps) {
    StepTable tab;
    tab.n = n_steps;
    tab.h = p.horizon / n_steps;
    tab.z.resize(n_steps);
    tab.effort.resize(n_steps);
    tab.drift.resize(n_steps);
    const double ga = p.gamma_a;
    for (int j = 0; j < n_steps; ++j) {
        const double t = j * tab.h;
        const double z = policy.z(t);
        const double k = policy.k(t);
        const double a = policy.effort(t);
        const double r = policy.recommended_effort(t);
        if (!std::isfinite(z) || !std::isfinite(k) || !std::isfinite(a) || !std::isfinite(r))
            throw std::invalid_argument("wage policy is not finite at t = " + format_number(t));
        if (std::abs(a) > p.effort_bound * (1.0 + 1e-12))
            throw std::invalid_argument("effort exceeds the admissible bound at t = " +
                                        format_number(t));
        tab.z[j] = z;
        tab.effort[j] = a;
        tab.drift[j] = 0.5 * ga * z * z + 0.5 * p.kappa * r * r - z * r +
                       intensity.rate(t) / ga * std::expm1(-ga * k);
    }
    return tab;
}

struct Engine {
    const ModelParams& p;
    const IntensitySpec& intensity;
    const WagePolicy& policy;
    const SimConfig& cfg;
    StepTable tab;

    struct Outcome {
        PathRecord record;
        double log_neg_up = 0.0; // log(-U_P)
        double log_neg_ua = 0.0; // log(-U_A)
    };

    Outcome run(std::uint64_t path_id, PathTrace* trace) const {
        RandomStream stream(cfg.master_seed, path_id);
        const auto tau = sample_default(intensity, p.horizon, stream);

        double x = p.x0, w = policy.y0, b = 0.0, cost = 0.0;
        auto record = [&](double t) {
            if (!trace) return;
            trace->t.push_back(t);
            trace->x.push_back(x);
            trace->w.push_back(w);
            trace->b.push_back(b);
        };
        auto advance = [&](int j, double dt, double g) {
            const double db = g * std::sqrt(dt);
            const double a = tab.effort[j];
            const double dx = a * dt + db;
            x += dx;
            b += db;
            w += tab.z[j] * dx + tab.drift[j] * dt;
            cost += 0.5 * p.kappa * a * a * dt;
        };

        record(0.0);
        bool defaulted = false;
        int j = 0;
        for (; j < tab.n; ++j) {
            const double t0 = j * tab.h;
            const double t1 = j + 1 == tab.n ? p.horizon : (j + 1) * tab.h;
            const double g = stream.normal();
            if (tau && *tau < t1) {
                advance(j, *tau - t0, g);
                defaulted = true;
                break;
            }
            advance(j, t1 - t0, g);
            record(t1);
        }
        if (tau && !defaulted) defaulted = true; // tau == T

        Outcome out;
        out.record.path_id = path_id;
        out.record.tau = tau;
        double principal_shift = 0.0;
        if (defaulted) {
            w += policy.k(*tau);
            record(*tau);
            const auto& mit = policy.mitigation;
            if (mit && decide_invest(*mit, *tau)) {
                out.record.invested = true;
                if (cfg.full_post_default) {
                    principal_shift = mit->invest_cost;
                    const double z1 = policy.post_default_sensitivity;
                    const double a1 = policy.post_default_effort;
                    const double drift = 0.5 * p.gamma_a * z1 * z1 + 0.5 * p.kappa * a1 * a1 -
                                         z1 * mit->theta * a1;
                    double t = *tau;
                    for (int k = j; k < tab.n; ++k) {
                        const double t1 = k + 1 == tab.n ? p.horizon : (k + 1) * tab.h;
                        const double dt = t1 - t;
                        const double db = stream.normal() * std::sqrt(dt);
                        const double dx = mit->theta * a1 * dt + db;
                        x += dx;
                        b += db;
                        w += z1 * dx + drift * dt;
                        cost += 0.5 * p.kappa * a1 * a1 * dt;
                        t = t1;
                        record(t1);
                    }
                } else {
                    // e^{gP i} Phi_1(tau) multiplies the principal's utility.
                    out.log_neg_up +=
                        p.gamma_p * mit->invest_cost - p.gamma_p * mit->c_inv * (p.horizon - *tau);
                }
            }
            if (trace) {
                // frozen after default
                for (int k = j + 1; k <= tab.n && trace->t.back() < p.horizon; ++k) {
                    const double tk = k == tab.n ? p.horizon : k * tab.h;
                    if (tk > trace->t.back()) record(tk);
                }
            }
        }

        out.log_neg_up += -p.gamma_p * (x - w - principal_shift);
        out.log_neg_ua = -p.gamma_a * (w - cost);
        out.record.x_end = x;
        out.record.w_end = w;
        out.record.b_end = b;
        out.record.agent_cost = cost;
        out.record.u_p = -std::exp(out.log_neg_up);
        out.record.u_a = -std::exp(out.log_neg_ua);
        return out;
    }
};

Estimate plain_estimate(const std::vector<double>& v) {
    const std::size_t n = v.size();
    Estimate e;
    e.estimate = pairwise_sum(v.data(), n) / static_cast<double>(n);
    if (n > 1) {
        std::vector<double> sq(n);
        for (std::size_t i = 0; i < n; ++i) sq[i] = (v[i] - e.estimate) * (v[i] - e.estimate);
        e.standard_error = std::sqrt(pairwise_sum(sq.data(), n) / static_cast<double>(n - 1) /
                                     static_cast<double>(n));
    }
    return e;
}

// Mean and SE of -exp(l_i), shifted by max l_i to delay overflow.
Estimate negative_exp_estimate(const std::vector<double>& logs, std::uint64_t seed,
                               const char* what) {
    const auto it = std::max_element(logs.begin(), logs.end());
    const double shift = *it;
    const auto worst = static_cast<std::uint64_t>(it - logs.begin());
    if (!std::isfinite(shift))
        throw OverflowError(std::string(what) + " utility is not finite", seed, worst);
    std::vector<double> v(logs.size());
    for (std::size_t i = 0; i < logs.size(); ++i) v[i] = std::exp(logs[i] - shift);
    const Estimate scaled = plain_estimate(v);
    if (shift > kMaxExponent - std::log(std::max(scaled.estimate, 1e-300)))
        throw OverflowError(std::string(what) + " utility overflows (log-magnitude " +
                                format_number(shift) + ")",
                            seed, worst);
    const double scale = std::exp(shift);
    return {-scale * scaled.estimate, scale * scaled.standard_error};
}

} // namespace

void validate(const SimConfig& cfg) {
    if (cfg.n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
    if (cfg.n_steps < 64) throw std::invalid_argument("n_steps must be >= 64");
}

WagePolicy optimal_policy(const ContractSolution& sol) {
    WagePolicy policy;
    const double z = sol.z_star;
    const double a = sol.a_star;
    policy.z = [z](double) { return z; };
    policy.k = sol.k_star;
    policy.effort = [a](double) { return a; };
    policy.recommended_effort = policy.effort;
    policy.y0 = sol.y0;
    return policy;
}

WagePolicy optimal_policy(const MitigationSolution& sol, bool use_hm_effort) {
    WagePolicy policy = optimal_policy(sol.contract);
    policy.mitigation = sol.policy;
    policy.post_default_sensitivity = sol.post_default_sensitivity;
    policy.post_default_effort =
        use_hm_effort ? sol.post_default_effort_hm : sol.post_default_effort_unadjusted;
    return policy;
}

WagePolicy with_effort(WagePolicy policy, TimeFunction effort) {
    policy.effort = std::move(effort);
    return policy;
}

std::optional<double> sample_default(const IntensitySpec& intensity, double horizon,
                                     RandomStream& stream) {
    const double target = stream.exponential();
    const double tau = intensity.inverse_cumulative(target);
    if (tau <= horizon) return tau;
    return std::nullopt;
}

SimReport simulate_paths(const ModelParams& params, const IntensitySpec& intensity,
                         const WagePolicy& policy, const SimConfig& cfg) {
    validate(cfg);
    const Engine engine{params, intensity, policy, cfg,
                        tabulate(params, intensity, policy, cfg.n_steps)};

    const std::size_t n = cfg.n_paths;
    std::vector<double> log_up(n), log_ua(n), defaults(n), wages(n);
    std::vector<PathRecord> records(cfg.keep_paths ? n : 0);
    parallel_for(n, cfg.threads, [&](std::size_t i) {
        const auto out = engine.run(i, nullptr);
        log_up[i] = out.log_neg_up;
        log_ua[i] = out.log_neg_ua;
        defaults[i] = out.record.tau ? 1.0 : 0.0;
        wages[i] = out.record.w_end;
        if (cfg.keep_paths) records[i] = out.record;
    });

    SimReport report;
    report.principal_utility = negative_exp_estimate(log_up, cfg.master_seed, "principal");
    report.agent_utility = negative_exp_estimate(log_ua, cfg.master_seed, "agent");
    report.default_frequency = plain_estimate(defaults);
    report.mean_wage = plain_estimate(wages);
    report.seeds_used = {cfg.master_seed, cfg.n_paths, cfg.n_steps,
                         "philox4x32-10, key=splitmix64(master_seed), counter=(block, path_id)"};
    report.paths = std::move(records);
    return report;
}

PathTrace trace_path(const ModelParams& params, const IntensitySpec& intensity,
                     const WagePolicy& policy, const SimConfig& cfg, std::uint64_t path_id) {
    validate(cfg);
    const Engine engine{params, intensity, policy, cfg,
                        tabulate(params, intensity, policy, cfg.n_steps)};
    PathTrace trace;
    trace.record = engine.run(path_id, &trace).record;
    return trace;
}

double wage_closed_form(const ContractSolution& sol, double b_end, std::optional<double> tau) {
    if (std::holds_alternative<Mitigation>(sol.variant))
        throw NotApplicable("wage_closed_form: mitigation contracts are not linear in tau");
    if (!sol.coef.c1_const || !sol.coef.c2_const)
        throw NotApplicable("wage_closed_form requires a constant intensity");
    const auto& p = sol.params;
    const double s = tau ? std::min(*tau, p.horizon) : p.horizon;
    const double slope = -(*sol.coef.c1_const + *sol.coef.c2_const) / (p.gamma_p + p.gamma_a);
    const double z = sol.z_star;
    const double a = sol.a_star;
    return sol.y0 + z * b_end + (0.5 * p.gamma_a * z * z + 0.5 * p.kappa * a * a) * s +
           sol.k_star(0.0) + slope * s;
}

double wage_closed_form_check(const ContractSolution& sol, const PathRecord& path) {
    return std::abs(path.w_end - wage_closed_form(sol, path.b_end, path.tau));
}

void write_paths_csv(std::ostream& out, const std::vector<PathRecord>& paths) {
    out << "path_id,tau,X_end,W_end,agent_cost_integral,U_P_realized,U_A_realized\n";
    for (const auto& r : paths) {
        out << r.path_id << ',' << (r.tau ? format_number(*r.tau) : "NA") << ','
            << format_number(r.x_end) << ',' << format_number(r.w_end) << ','
            << format_number(r.agent_cost) << ',' << format_number(r.u_p) << ','
            << format_number(r.u_a) << '\n';
    }
}

} // namespace contract_lab
