#include "contract_lab/mitigation.hpp"

#include <cmath>

namespace contract_lab {

double c_inv(const ModelParams& p, double theta) {
    if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("c_inv: theta must be in (0,1]");
    const double q = theta * theta / p.kappa;
    const double num = p.gamma_p + q;
    return num * num / (2.0 * (p.gamma_p + p.gamma_a + q)) - 0.5 * p.gamma_p;
}

double post_default_sensitivity(const ModelParams& p, double theta) {
    const double q = theta * theta / p.kappa;
    return (p.gamma_p + q) / (p.gamma_p + p.gamma_a + q);
}

double MitigationPolicy::phi1(double t) const {
    return std::exp(-gamma_p * c_inv * (horizon - t));
}

double MitigationPolicy::continuation_factor(double t) const {
    return std::min(1.0, std::exp(gamma_p * invest_cost) * phi1(t));
}

MitigationPolicy make_mitigation_policy(const ModelParams& params, double theta,
                                        double invest_cost) {
    MitigationPolicy policy;
    policy.c_inv = c_inv(params, theta);
    policy.theta = theta;
    policy.invest_cost = invest_cost;
    policy.horizon = params.horizon;
    policy.gamma_p = params.gamma_p;
    if (policy.c_inv > 0.0 && invest_cost < params.horizon * policy.c_inv)
        policy.t_max = params.horizon - invest_cost / policy.c_inv;
    return policy;
}

bool decide_invest(const MitigationPolicy& policy, double tau) {
    return policy.c_inv > 0.0 && policy.invest_cost < policy.c_inv * (policy.horizon - tau);
}

BernoulliCoefficients mitigation_coefficients(const ModelParams& params,
                                              const IntensitySpec& intensity,
                                              const MitigationPolicy& policy) {
    const auto plain = coefficients(params, intensity, MoralHazard{});
    if (!plain.c1_const || !plain.c2_const)
        throw NotApplicable("mitigation requires a constant intensity");
    const double c2_plain = *plain.c2_const;
    const double alpha = plain.alpha;

    BernoulliCoefficients coef;
    coef.c1 = plain.c1;
    coef.c1_const = plain.c1_const;
    coef.c2 = [policy, c2_plain, alpha](double t) {
        return c2_plain * std::pow(policy.continuation_factor(t), alpha);
    };
    coef.alpha = alpha;
    coef.horizon = params.horizon;
    if (policy.t_max && *policy.t_max > 0.0) coef.breakpoints.push_back(*policy.t_max);
    return coef;
}

MitigationSolution solve_mitigation(const ModelParams& params, const IntensitySpec& intensity,
                                    double theta, double invest_cost) {
    const Mitigation variant{theta, invest_cost};
    require_valid(params, intensity, variant);

    const auto policy = make_mitigation_policy(params, theta, invest_cost);
    auto coef = mitigation_coefficients(params, intensity, policy);
    auto phi = phi_integral_form(coef);
    const double total = params.gamma_p + params.gamma_a;
    const double z_star = optimal_sensitivity(params, variant);

    MitigationSolution out{
        ContractSolution{variant, params, intensity, params.y_pc, z_star,
                         optimal_effort(params, variant), coef, phi,
                         [phi, policy, total](double t) {
                             return (std::log(phi(t)) - std::log(policy.continuation_factor(t))) /
                                    total;
                         }},
        policy};
    out.post_default_sensitivity = post_default_sensitivity(params, theta);
    out.post_default_effort_unadjusted = theta * z_star / params.kappa;
    out.post_default_effort_hm = theta * out.post_default_sensitivity / params.kappa;
    return out;
}

} // namespace contract_lab
