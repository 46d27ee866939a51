#pragma once

#include "contract_lab/contract.hpp"

#include <optional>

namespace contract_lab {

/// Continuation-value rate of the post-default Holmstrom-Milgrom problem with output
/// degraded to theta: (gP + theta^2/k)^2 / (2 (gP + gA + theta^2/k)) - gP/2.
double c_inv(const ModelParams& params, double theta);

/// Post-default Holmstrom-Milgrom sensitivity (gP + theta^2/k) / (gP + gA + theta^2/k).
double post_default_sensitivity(const ModelParams& params, double theta);

struct MitigationPolicy {
    double c_inv = 0.0;
    double theta = 0.0;
    double invest_cost = 0.0;
    double horizon = 1.0;
    double gamma_p = 1.0;
    /// T - i / C_inv when investing is optimal for some default time.
    std::optional<double> t_max;

    /// Phi_1(t, theta) = exp(-gamma_P C_inv (T - t)).
    double phi1(double t) const;
    /// min{1, e^{gamma_P i} Phi_1(t, theta)}; below 1 exactly when investing pays.
    double continuation_factor(double t) const;
};

MitigationPolicy make_mitigation_policy(const ModelParams& params, double theta,
                                        double invest_cost);

/// Invest at default time tau iff C_inv > 0 and i < C_inv (T - tau). Ties do not invest.
bool decide_invest(const MitigationPolicy& policy, double tau);

/// Constant c1 (moral-hazard) and c2(t) = lambda (gP+gA)/gA * factor(t)^alpha, with t_max
/// registered as a breakpoint.
BernoulliCoefficients mitigation_coefficients(const ModelParams& params,
                                              const IntensitySpec& intensity,
                                              const MitigationPolicy& policy);

struct MitigationSolution {
    ContractSolution contract;
    MitigationPolicy policy;
    /// theta Z*/kappa, reusing the pre-default Z*.
    double post_default_effort_unadjusted = 0.0;
    /// theta Z1/kappa with the post-default Holmstrom-Milgrom sensitivity Z1.
    double post_default_effort_hm = 0.0;
    double post_default_sensitivity = 0.0;
};

MitigationSolution solve_mitigation(const ModelParams& params, const IntensitySpec& intensity,
                                    double theta, double invest_cost);

} // namespace contract_lab
