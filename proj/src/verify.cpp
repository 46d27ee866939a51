#include "contract_lab/verify.hpp"

#include "contract_lab/format.hpp"
#include "contract_lab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace contract_lab {

namespace {

double up(double gamma, double z) { return -std::exp(-gamma * z); }

double derivative(const TimeFunction& f, double t, double h, double horizon) {
    if (t - h >= 0.0 && t + h <= horizon) return (f(t + h) - f(t - h)) / (2.0 * h);
    if (t - h < 0.0) return (-3.0 * f(t) + 4.0 * f(t + h) - f(t + 2.0 * h)) / (2.0 * h);
    return (3.0 * f(t) - 4.0 * f(t - h) + f(t - 2.0 * h)) / (2.0 * h);
}

double linspace(double lo, double hi, int n, int i) {
    if (n == 1) return lo;
    return i == n - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

// Hamiltonian pieces in Phi-form; a-part is zero when effort is tied to Z.
struct Hamiltonian {
    double gp, ga, kappa, lambda, phi, m;
    bool first_best;

    double a_part(double a) const { return phi * (-gp * a + 0.5 * gp * kappa * a * a); }
    double z_part(double z) const {
        double v = 0.5 * gp * ga * z * z + 0.5 * gp * gp * z * z - gp * gp * z;
        if (!first_best) v += -gp * z / kappa + 0.5 * gp * z * z / kappa;
        return phi * v;
    }
    double k_part(double k) const {
        return phi * gp * lambda / ga * std::expm1(-ga * k) + lambda * m * std::exp(gp * k);
    }
    double constant() const { return 0.5 * phi * gp * gp; }
};

std::vector<double> axis(const ArgminGrid& g) {
    const auto n = static_cast<int>(std::llround((g.hi - g.lo) / g.cell));
    std::vector<double> v(n + 1);
    for (int j = 0; j <= n; ++j) v[j] = g.lo + g.cell * j;
    return v;
}

template <class F>
std::pair<std::size_t, double> argmin_1d(const std::vector<double>& xs, F f) {
    std::size_t best = 0;
    double best_v = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const double v = f(xs[j]);
        if (v < best_v) {
            best_v = v;
            best = j;
        }
    }
    return {best, best_v};
}

Estimate paired_estimate(const std::vector<PathRecord>& a, const std::vector<PathRecord>& b) {
    const std::size_t n = a.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = a[i].u_a - b[i].u_a;
    Estimate e;
    e.estimate = pairwise_sum(d.data(), n) / static_cast<double>(n);
    if (n > 1) {
        for (auto& v : d) v = (v - e.estimate) * (v - e.estimate);
        e.standard_error = std::sqrt(pairwise_sum(d.data(), n) / static_cast<double>(n - 1) /
                                     static_cast<double>(n));
    }
    return e;
}

MonteCarloCheck mc_check(const Estimate& est, double target, double allowance) {
    MonteCarloCheck c;
    c.target = target;
    c.estimate = est.estimate;
    c.standard_error = est.standard_error;
    c.gap = std::abs(est.estimate - target);
    c.allowance = allowance;
    c.passed = c.gap <= 3.0 * est.standard_error + allowance;
    return c;
}

} // namespace

Candidate make_candidate(const ModelParams& params, const IntensitySpec& intensity,
                         const ProblemVariant& variant) {
    Candidate c;
    c.params = params;
    c.intensity = intensity;
    c.variant = variant;
    if (const auto* mit = std::get_if<Mitigation>(&variant)) {
        const auto sol = solve_mitigation(params, intensity, mit->theta, mit->invest_cost);
        c.phi = sol.contract.phi0;
        c.k = sol.contract.k_star;
        const auto policy = sol.policy;
        c.continuation = [policy](double t) { return policy.continuation_factor(t); };
        c.z = sol.contract.z_star;
        c.a = sol.contract.a_star;
        c.policy = optimal_policy(sol);
        return c;
    }
    const auto sol = solve(params, intensity, variant);
    c.phi = sol.phi0;
    c.k = sol.k_star;
    c.continuation = [](double) { return 1.0; };
    c.z = sol.z_star;
    c.a = sol.a_star;
    c.policy = optimal_policy(sol);
    return c;
}

ResidualReport hjb_residual(const Candidate& cand, const HjbGrid& grid, double phi_perturbation) {
    const auto& p = cand.params;
    const double horizon = p.horizon;
    const double h = grid.fd_step * horizon;
    const double gp = p.gamma_p;
    const double ga = p.gamma_a;
    const TimeFunction phi = [&cand, phi_perturbation](double t) {
        return cand.phi(t) + phi_perturbation;
    };

    struct Slice {
        double max_rel = -1.0, max_abs = 0.0, max_scale = 0.0, x = 0.0, y = 0.0;
    };
    std::vector<Slice> slices(grid.nt);
    parallel_for(static_cast<std::size_t>(grid.nt), 0, [&](std::size_t i) {
        const double t = linspace(0.0, horizon, grid.nt, static_cast<int>(i));
        const double f = phi(t);
        const double df = derivative(phi, t, h, horizon);
        const double k = cand.k(t);
        const double m = cand.continuation(t);
        const double lambda = cand.intensity.rate(t);
        const double z = cand.z;
        const double a = cand.a;
        const double drift =
            0.5 * ga * z * z + 0.5 * p.kappa * a * a + lambda / ga * std::expm1(-ga * k);
        Slice s;
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double x = linspace(grid.x_lo, grid.x_hi, grid.nx, ix);
            for (int iy = 0; iy < grid.ny; ++iy) {
                const double y = linspace(grid.y_lo, grid.y_hi, grid.ny, iy);
                const double u = up(gp, x - y);
                const double v = u * f;
                // v_t, a v_x, drift v_y, v_xx/2, Z v_xy, Z^2 v_yy/2, jump to U_P(x-(y+K)) m
                const double terms[] = {u * df,
                                        a * (-gp * v),
                                        drift * (gp * v),
                                        0.5 * gp * gp * v,
                                        z * (-gp * gp * v),
                                        0.5 * z * z * gp * gp * v,
                                        lambda * (up(gp, x - (y + k)) * m - v)};
                double res = 0.0;
                double scale = 0.0;
                for (double term : terms) {
                    res += term;
                    scale += std::abs(term);
                }
                const double rel = scale > 0.0 ? std::abs(res) / scale : 0.0;
                s.max_abs = std::max(s.max_abs, std::abs(res));
                s.max_scale = std::max(s.max_scale, scale);
                if (rel > s.max_rel) {
                    s.max_rel = rel;
                    s.x = x;
                    s.y = y;
                }
            }
        }
        slices[i] = s;
    });

    ResidualReport r;
    std::ostringstream desc;
    desc << grid.nt << "x" << grid.nx << "x" << grid.ny << " on [0," << format_number(horizon)
         << "]x[" << format_number(grid.x_lo) << "," << format_number(grid.x_hi) << "]x["
         << format_number(grid.y_lo) << "," << format_number(grid.y_hi) << "]";
    r.grid_description = desc.str();
    r.dt = grid.nt > 1 ? horizon / (grid.nt - 1) : 0.0;
    r.dx = grid.nx > 1 ? (grid.x_hi - grid.x_lo) / (grid.nx - 1) : 0.0;
    r.dy = grid.ny > 1 ? (grid.y_hi - grid.y_lo) / (grid.ny - 1) : 0.0;
    r.fd_step = h;
    r.tolerance = grid.tolerance;
    r.max_relative_residual = -1.0;
    for (int i = 0; i < grid.nt; ++i) {
        const auto& s = slices[i];
        r.max_abs_residual = std::max(r.max_abs_residual, s.max_abs);
        r.max_scale = std::max(r.max_scale, s.max_scale);
        if (s.max_rel > r.max_relative_residual) {
            r.max_relative_residual = s.max_rel;
            r.arg_t = linspace(0.0, horizon, grid.nt, i);
            r.arg_x = s.x;
            r.arg_y = s.y;
        }
    }
    r.passed = r.max_relative_residual <= grid.tolerance;
    return r;
}

ResidualReport hjb_residual(const ModelParams& params, const IntensitySpec& intensity,
                            const ProblemVariant& variant, const HjbGrid& grid,
                            double phi_perturbation) {
    return hjb_residual(make_candidate(params, intensity, variant), grid, phi_perturbation);
}

ArgminReport hamiltonian_argmin(const Candidate& cand, double t, const ArgminGrid& grid) {
    const auto& p = cand.params;
    const bool fb = std::holds_alternative<FirstBest>(cand.variant);
    const Hamiltonian ham{p.gamma_p, p.gamma_a,          p.kappa, cand.intensity.rate(t),
                          cand.phi(t), cand.continuation(t), fb};

    ArgminReport r;
    r.t = t;
    r.cell = grid.cell;
    r.exact_z = cand.z;
    r.exact_a = cand.a;
    r.exact_k = cand.k(t);

    const auto xs = axis(grid);
    const std::size_t last = xs.size() - 1;
    std::vector<double> hz(xs.size()), hk(xs.size()), ha(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) {
        hz[j] = ham.z_part(xs[j]);
        hk[j] = ham.k_part(xs[j]);
        ha[j] = fb ? ham.a_part(xs[j]) : 0.0;
    }
    // K does not enter when lambda(t) = 0; pin it to the closed form.
    const bool k_free = ham.lambda == 0.0;
    const std::size_t na = fb ? xs.size() : 1;
    const std::size_t nk = k_free ? 1 : xs.size();

    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = 0, bz = 0, bk = 0;
    for (std::size_t ia = 0; ia < na; ++ia)
        for (std::size_t iz = 0; iz < xs.size(); ++iz) {
            const double az = ha[ia] + hz[iz];
            for (std::size_t ik = 0; ik < nk; ++ik) {
                const double v = az + (k_free ? 0.0 : hk[ik]);
                if (v < best) {
                    best = v;
                    ba = ia;
                    bz = iz;
                    bk = ik;
                }
            }
        }

    auto on_edge = [last](std::size_t j) { return j == 0 || j == last; };
    if ((fb && on_edge(ba)) || on_edge(bz) || (!k_free && on_edge(bk)))
        throw GridBoundaryError("Hamiltonian argmin on the grid boundary at t = " +
                                format_number(t) + "; enlarge the search box");

    r.grid_z = xs[bz];
    r.grid_a = fb ? xs[ba] : r.grid_z / p.kappa;
    r.grid_k = k_free ? r.exact_k : xs[bk];

    const double exact = (fb ? ham.a_part(r.exact_a) : 0.0) + ham.z_part(r.exact_z) +
                         (k_free ? 0.0 : ham.k_part(r.exact_k));
    r.gap = best - exact;

    const double gp = p.gamma_p;
    double curvature = ham.phi * (gp * p.gamma_a + gp * gp + (fb ? 0.0 : gp / p.kappa));
    if (fb) curvature += ham.phi * gp * p.kappa;
    if (!k_free)
        curvature += ham.phi * gp * p.gamma_a * ham.lambda * std::exp(-p.gamma_a * r.exact_k) +
                     ham.lambda * ham.m * gp * gp * std::exp(gp * r.exact_k);
    r.gap_bound = 0.5 * grid.cell * grid.cell * curvature;

    const double slack = grid.cell * (1.0 + 1e-9);
    r.within_one_cell = std::abs(r.grid_z - r.exact_z) <= slack &&
                        std::abs(r.grid_k - r.exact_k) <= slack &&
                        (!fb || std::abs(r.grid_a - r.exact_a) <= slack);
    const double floor = -1e-12 * (1.0 + std::abs(exact + ham.constant()));
    r.passed = r.within_one_cell && r.gap >= floor && r.gap <= r.gap_bound;
    return r;
}

std::vector<EffortAlternative> default_alternatives(const ModelParams& params, double a_star) {
    const double bound = params.effort_bound;
    const double twice = std::min(2.0 * a_star, bound);
    const double horizon = params.horizon;
    return {
        {"zero", [](double) { return 0.0; }},
        {"plus_bound", [bound](double) { return bound; }},
        {"minus_bound", [bound](double) { return -bound; }},
        {"half_optimal", [a_star](double) { return 0.5 * a_star; }},
        {"double_optimal_clamped", [twice](double) { return twice; }},
        {"ramp", [twice, horizon](double t) { return twice * t / horizon; }},
    };
}

std::string to_string(DeviationStatus status) {
    switch (status) {
    case DeviationStatus::OptimalWins: return "optimal_wins";
    case DeviationStatus::Tie: return "tie";
    case DeviationStatus::AlternativeWins: return "alternative_wins";
    }
    return "unknown";
}

DeviationReport deviation_test(const ModelParams& params, const IntensitySpec& intensity,
                               const WagePolicy& policy,
                               const std::vector<EffortAlternative>& alternatives,
                               const SimConfig& cfg) {
    SimConfig run = cfg;
    run.keep_paths = true;
    const auto base = simulate_paths(params, intensity, policy, run);

    DeviationReport report;
    report.optimal = base.agent_utility;
    report.all_optimal_win = true;
    report.passed = true;
    for (const auto& alt : alternatives) {
        const auto other = simulate_paths(params, intensity, with_effort(policy, alt.effort), run);
        DeviationResult r;
        r.name = alt.name;
        r.alternative = other.agent_utility;
        r.difference = base.agent_utility.estimate - other.agent_utility.estimate;
        r.combined_se = std::hypot(base.agent_utility.standard_error,
                                   other.agent_utility.standard_error);
        r.paired_se = paired_estimate(base.paths, other.paths).standard_error;
        if (r.difference > 3.0 * r.combined_se)
            r.status = DeviationStatus::OptimalWins;
        else if (r.difference < -3.0 * r.combined_se)
            r.status = DeviationStatus::AlternativeWins;
        else
            r.status = DeviationStatus::Tie;
        report.all_optimal_win = report.all_optimal_win && r.status == DeviationStatus::OptimalWins;
        report.passed = report.passed && r.status != DeviationStatus::AlternativeWins;
        report.results.push_back(std::move(r));
    }
    return report;
}

MonteCarloCheck participation_binding(const SimReport& report, const ModelParams& params,
                                      std::optional<double> certainty_equivalent) {
    const double ce = certainty_equivalent.value_or(params.y_pc);
    const double target = up(params.gamma_a, ce);
    const double dt = params.horizon / std::max(1, report.seeds_used.n_steps);
    return mc_check(report.agent_utility, target, 5.0 * dt * std::abs(target));
}

MonteCarloCheck principal_value_check(const SimReport& report, const Candidate& cand, double y0) {
    const auto& p = cand.params;
    const double target = up(p.gamma_p, p.x0 - y0) * cand.phi(0.0);
    const double dt = p.horizon / std::max(1, report.seeds_used.n_steps);
    return mc_check(report.principal_utility, target, 5.0 * dt * std::abs(target));
}

bool VerificationReport::passed() const {
    return std::none_of(checks.begin(), checks.end(),
                        [](const CheckResult& c) { return c.status == "fail"; });
}

VerificationReport run_verification(const ModelParams& params, const IntensitySpec& intensity,
                                    const ProblemVariant& variant, const VerifyOptions& options) {
    VerificationReport out;
    const auto cand = make_candidate(params, intensity, variant);
    const double horizon = params.horizon;
    auto add = [&out](std::string name, bool ok, double measured, double tol, std::string detail) {
        out.checks.push_back({std::move(name), ok ? "pass" : "fail", measured, tol,
                              std::move(detail)});
    };
    auto skip = [&out](std::string name, std::string why) {
        out.checks.push_back({std::move(name), "skipped", 0.0, 0.0, std::move(why)});
    };

    {
        const auto r = hjb_residual(cand, options.hjb, options.phi_perturbation);
        add("hjb_residual", r.passed, r.max_relative_residual, r.tolerance,
            r.grid_description + ", worst node t=" + format_number(r.arg_t) +
                " x=" + format_number(r.arg_x) + " y=" + format_number(r.arg_y));
    }

    for (double t : {0.0, 0.5 * horizon, horizon}) {
        const std::string name = "hamiltonian_argmin_t=" + format_number(t);
        try {
            const auto r = hamiltonian_argmin(cand, t, options.argmin);
            const double dev = std::max({std::abs(r.grid_a - r.exact_a),
                                         std::abs(r.grid_z - r.exact_z),
                                         std::abs(r.grid_k - r.exact_k)});
            add(name, r.passed, dev, r.cell,
                "gap " + format_number(r.gap) + " bound " + format_number(r.gap_bound));
        } catch (const GridBoundaryError& e) {
            add(name, false, 0.0, options.argmin.cell, e.what());
        }
    }

    const bool closed = !std::holds_alternative<Mitigation>(variant) && intensity.is_constant();
    if (closed) {
        const auto sol = solve(params, intensity, variant);
        double worst = 0.0;
        for (int j = 0; j < 100; ++j) {
            const double t = j == 99 ? horizon : horizon * j / 99.0;
            worst = std::max(worst, std::abs(k_star_expectation_form(params, intensity, variant, t) -
                                             sol.k_star(t)));
        }
        add("cross_representation", worst <= 1e-9, worst, 1e-9, "100 time points");
        try {
            const auto d = risk_share_decomposition(sol);
            add("affinity", true, d.max_chord_deviation, 1e-7, "chord deviation");
            const double slope_err = std::abs(d.measured_slope - d.slope);
            add("affine_slope", slope_err <= 1e-7, slope_err, 1e-7,
                "slope " + format_number(d.slope));
        } catch (const std::runtime_error& e) {
            add("affinity", false, 0.0, 1e-7, e.what());
        }
    } else {
        const char* why = "requires a constant intensity and no mitigation";
        skip("cross_representation", why);
        skip("affinity", why);
        skip("affine_slope", why);
    }

    {
        const auto dev = deviation_test(params, intensity, cand.policy,
                                        default_alternatives(params, cand.a), options.sim);
        double worst = std::numeric_limits<double>::infinity();
        std::string detail;
        for (const auto& r : dev.results) {
            worst = std::min(worst, r.combined_se > 0 ? r.difference / r.combined_se : 0.0);
            detail += r.name + ":" + to_string(r.status) + " ";
        }
        if (!detail.empty()) detail.pop_back();
        out.checks.push_back({"deviation_test",
                              !dev.passed ? "fail" : dev.all_optimal_win ? "pass" : "inconclusive",
                              worst, 3.0, detail});
    }

    {
        const auto sim = simulate_paths(params, intensity, cand.policy, options.sim);
        const auto part = participation_binding(sim, params);
        add("participation_binding", part.passed, part.gap,
            3.0 * part.standard_error + part.allowance,
            "agent utility " + format_number(part.estimate) + " target " +
                format_number(part.target));
        const auto val = principal_value_check(sim, cand, params.y_pc);
        add("principal_value", val.passed, val.gap, 3.0 * val.standard_error + val.allowance,
            "principal utility " + format_number(val.estimate) + " target " +
                format_number(val.target));
    }
    return out;
}

} // namespace contract_lab
