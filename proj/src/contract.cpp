#include "contract_lab/contract.hpp"

#include "contract_lab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace contract_lab {

namespace {

constexpr int kNumericStepsPerHorizon = 4096;
constexpr int kDecompositionPanels = 2048;

double exprel(double x) { return x == 0.0 ? 1.0 : std::expm1(x) / x; }

// lambda-free part of c1.
double base_c1(const ModelParams& p, const ProblemVariant& variant) {
    const double gp = p.gamma_p;
    const double ga = p.gamma_a;
    if (std::holds_alternative<FirstBest>(variant))
        return gp * gp * ga / (2.0 * (gp + ga)) - gp / (2.0 * p.kappa);
    const double ki = 1.0 / p.kappa;
    const double denom = 2.0 * (gp + ga + ki);
    return gp * gp * ga / denom - gp * ki * (gp + ki) / denom;
}

void require_fb_or_mh(const ProblemVariant& variant, const char* who) {
    if (std::holds_alternative<Mitigation>(variant))
        throw std::invalid_argument(std::string(who) +
                                    ": the mitigation variant is handled by solve_mitigation");
}

PhiFunction make_phi(const BernoulliCoefficients& coef) {
    if (coef.c1_const && coef.c2_const) return phi_closed_form(coef);
    return phi_numeric(coef, coef.horizon / kNumericStepsPerHorizon);
}

double require_constant_lambda(const IntensitySpec& intensity, const char* who) {
    if (!intensity.is_constant())
        throw NotApplicable(std::string(who) + " is only defined for a constant intensity");
    return intensity.constant_value();
}

} // namespace

BernoulliCoefficients coefficients(const ModelParams& params, const IntensitySpec& intensity,
                                   const ProblemVariant& variant) {
    require_fb_or_mh(variant, "coefficients");
    const double alpha = params.gamma_a / (params.gamma_p + params.gamma_a);
    const double base = base_c1(params, variant);
    const double jump = (params.gamma_p + params.gamma_a) / params.gamma_a;
    if (intensity.is_constant()) {
        const double lambda = intensity.constant_value();
        return BernoulliCoefficients::constant(base - lambda * jump, lambda * jump, alpha,
                                               params.horizon);
    }
    BernoulliCoefficients coef;
    coef.c1 = [intensity, base, jump](double t) { return base - intensity.rate(t) * jump; };
    coef.c2 = [intensity, jump](double t) { return intensity.rate(t) * jump; };
    coef.alpha = alpha;
    coef.horizon = params.horizon;
    for (double b : intensity.breakpoints())
        if (b > 0.0 && b < params.horizon) coef.breakpoints.push_back(b);
    return coef;
}

double optimal_sensitivity(const ModelParams& p, const ProblemVariant& variant) {
    if (std::holds_alternative<FirstBest>(variant)) return p.gamma_p / (p.gamma_p + p.gamma_a);
    const double ki = 1.0 / p.kappa;
    return (p.gamma_p + ki) / (p.gamma_p + p.gamma_a + ki);
}

double optimal_effort(const ModelParams& p, const ProblemVariant& variant) {
    if (std::holds_alternative<FirstBest>(variant)) return 1.0 / p.kappa;
    return optimal_sensitivity(p, variant) / p.kappa;
}

ContractSolution solve(const ModelParams& params, const IntensitySpec& intensity,
                       const ProblemVariant& variant) {
    require_fb_or_mh(variant, "solve");
    require_valid(params, intensity, variant);

    auto coef = coefficients(params, intensity, variant);
    auto phi = make_phi(coef);
    const double total = params.gamma_p + params.gamma_a;

    ContractSolution sol{variant,
                         params,
                         intensity,
                         params.y_pc,
                         optimal_sensitivity(params, variant),
                         optimal_effort(params, variant),
                         coef,
                         phi,
                         [phi, total](double t) { return std::log(phi(t)) / total; }};
    return sol;
}

double k_star_expectation_form(const ModelParams& params, const IntensitySpec& intensity,
                               const ProblemVariant& variant, double t) {
    require_fb_or_mh(variant, "k_star_expectation_form");
    const double lambda = require_constant_lambda(intensity, "k_star_expectation_form");
    if (!(t >= 0.0 && t <= params.horizon))
        throw std::out_of_range("k_star_expectation_form: t outside [0, T]");
    const auto coef = coefficients(params, intensity, variant);
    const double c_sum = *coef.c1_const + *coef.c2_const;
    const double beta = params.gamma_a / (params.gamma_p + params.gamma_a) * c_sum;
    const double s = params.horizon - t;
    // E[e^{beta (s ^ tau)}] = e^{beta s} P(tau > s) + int_0^s lambda e^{-lambda r} e^{beta r} dr
    const double survival = std::exp((beta - lambda) * s);
    const double density = lambda * s * exprel((beta - lambda) * s);
    return std::log(survival + density) / params.gamma_a;
}

std::string to_string(Sign sign) {
    switch (sign) {
    case Sign::Negative: return "negative";
    case Sign::Zero: return "zero";
    case Sign::Positive: return "positive";
    }
    return "unknown";
}

int to_int(Sign sign) {
    return sign == Sign::Negative ? -1 : sign == Sign::Positive ? 1 : 0;
}

Sign sign_of_k(const ModelParams& params, const IntensitySpec& intensity,
               const ProblemVariant& variant) {
    const auto coef = coefficients(params, intensity, variant);
    const double c1 = coef.c1(0.0);
    const double c2 = coef.c2(0.0);
    const double sum = c1 + c2;
    if (std::abs(sum) <= 1e-12 * (std::abs(c1) + std::abs(c2))) return Sign::Zero;
    return sum > 0.0 ? Sign::Positive : Sign::Negative;
}

Sign moral_hazard_sign_predicate(const ModelParams& p) {
    const double ki = 1.0 / p.kappa;
    const double a = p.gamma_p * p.gamma_a;
    const double b = p.gamma_p * ki + ki * ki;
    const double q = a - b;
    if (std::abs(q) <= 1e-12 * (a + b)) return Sign::Zero;
    return q > 0.0 ? Sign::Positive : Sign::Negative;
}

RiskShareDecomposition risk_share_decomposition(const ContractSolution& sol, double tolerance) {
    require_fb_or_mh(sol.variant, "risk_share_decomposition");
    const double lambda = require_constant_lambda(sol.intensity, "risk_share_decomposition");
    const double ga = sol.params.gamma_a;
    const double horizon = sol.params.horizon;
    const double c_sum = *sol.coef.c1_const + *sol.coef.c2_const;

    RiskShareDecomposition out;
    out.k0 = sol.k_star(0.0);
    out.slope = -c_sum / (sol.params.gamma_p + ga);

    const int n = kDecompositionPanels;
    const double h = horizon / n;
    std::vector<double> g(n + 1);
    for (int j = 0; j <= n; ++j)
        g[j] = lambda / ga * std::expm1(-ga * sol.k_star(h * j));

    // f on even nodes via cumulative Simpson.
    std::vector<double> f;
    std::vector<double> times;
    double integral = 0.0;
    for (int j = 0; j <= n; j += 2) {
        if (j > 0) integral += h / 3.0 * (g[j - 2] + 4.0 * g[j - 1] + g[j]);
        times.push_back(h * j);
        f.push_back(sol.k_star(h * j) + integral);
    }
    out.measured_slope = (f.back() - f.front()) / horizon;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double chord = f.front() + out.measured_slope * times[i];
        out.max_chord_deviation = std::max(out.max_chord_deviation, std::abs(f[i] - chord));
        out.max_model_deviation =
            std::max(out.max_model_deviation, std::abs(f[i] - (out.k0 + out.slope * times[i])));
    }
    if (out.max_chord_deviation > tolerance)
        throw std::runtime_error("risk-share component is not affine in time: deviation " +
                                 std::to_string(out.max_chord_deviation));
    return out;
}

ExpectedRiskShare expected_risk_share(const ContractSolution& sol, std::uint64_t draws,
                                      std::uint64_t seed) {
    require_fb_or_mh(sol.variant, "expected_risk_share");
    const double lambda = require_constant_lambda(sol.intensity, "expected_risk_share");
    const double horizon = sol.params.horizon;
    const double c_sum = *sol.coef.c1_const + *sol.coef.c2_const;
    const double rate = c_sum / (sol.params.gamma_p + sol.params.gamma_a);
    const double k0 = sol.k_star(0.0);

    ExpectedRiskShare out;
    out.draws = draws;
    out.per_horizon_value = k0 - rate * (-std::expm1(-lambda * horizon)) / horizon;
    const double mean_stop = horizon * exprel(-lambda * horizon); // E[T ^ tau]
    out.analytic_value = k0 - rate * mean_stop;

    if (draws == 0) return out;
    RandomStream stream(seed, 0);
    double mean = 0.0;
    double m2 = 0.0;
    for (std::uint64_t i = 0; i < draws; ++i) {
        const double tau = lambda > 0.0 ? stream.exponential() / lambda : horizon;
        const double value = k0 - rate * std::min(horizon, tau);
        const double delta = value - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (value - mean);
    }
    out.mc_value = mean;
    out.mc_standard_error =
        draws > 1 ? std::sqrt(m2 / static_cast<double>(draws - 1) / static_cast<double>(draws))
                  : 0.0;
    return out;
}

double value_ratio(const ModelParams& params, const IntensitySpec& intensity) {
    const auto mh = solve(params, intensity, MoralHazard{});
    const auto fb = solve(params, intensity, FirstBest{});
    return mh.phi0(0.0) / fb.phi0(0.0);
}

} // namespace contract_lab
