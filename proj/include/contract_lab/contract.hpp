#pragma once

#include "contract_lab/bernoulli.hpp"
#include "contract_lab/model.hpp"

#include <cstdint>
#include <stdexcept>

namespace contract_lab {

/// Raised by analytics that only exist for a constant intensity.
class NotApplicable : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Optimal contract for one problem variant. Controls are free of the state (x, y).
struct ContractSolution {
    ProblemVariant variant;
    ModelParams params;
    IntensitySpec intensity;
    double y0 = 0.0;
    double z_star = 0.0;
    double a_star = 0.0;
    BernoulliCoefficients coef;
    PhiFunction phi0;
    /// Default-compensation control K*(t).
    TimeFunction k_star;

    double k_star_at(double t) const { return k_star(t); }
};

/// c1, c2 for FirstBest / MoralHazard (time-dependent when lambda is a grid).
BernoulliCoefficients coefficients(const ModelParams& params, const IntensitySpec& intensity,
                                   const ProblemVariant& variant);

/// Sensitivity Z* and pre-default effort a* for FirstBest / MoralHazard / Mitigation.
double optimal_sensitivity(const ModelParams& params, const ProblemVariant& variant);
double optimal_effort(const ModelParams& params, const ProblemVariant& variant);

/// Closed-form optimum (numeric Phi for grid intensities). Validates its inputs.
/// variant must be FirstBest or MoralHazard; use solve_mitigation for Mitigation.
ContractSolution solve(const ModelParams& params, const IntensitySpec& intensity,
                       const ProblemVariant& variant);

/// K*(t) = (1/gamma_A) log E[exp(alpha (c1+c2) ((T-t) ^ tau))], tau ~ Exp(lambda),
/// with the expectation evaluated as survival term plus density integral.
double k_star_expectation_form(const ModelParams& params, const IntensitySpec& intensity,
                               const ProblemVariant& variant, double t);

enum class Sign { Negative, Zero, Positive };
std::string to_string(Sign sign);
int to_int(Sign sign);

/// sign(c1 + c2) with a relative zero band of 1e-12 (|c1| + |c2|).
Sign sign_of_k(const ModelParams& params, const IntensitySpec& intensity,
               const ProblemVariant& variant);

/// Moral-hazard predicate gamma_P gamma_A - gamma_P / kappa - 1 / kappa^2.
Sign moral_hazard_sign_predicate(const ModelParams& params);

struct RiskShareDecomposition {
    double k0 = 0.0;
    double slope = 0.0;
    double measured_slope = 0.0;       ///< (f(T) - f(0)) / T from quadrature
    double max_chord_deviation = 0.0;  ///< sup |f(t) - chord(t)|
    double max_model_deviation = 0.0;  ///< sup |f(t) - (k0 + slope t)|
};

/// f(t) = K*(t) + int_0^t (lambda/gamma_A)(e^{-gamma_A K*(s)} - 1) ds on a 2048-panel
/// Simpson grid. Throws std::runtime_error if f is not affine to within tolerance.
RiskShareDecomposition risk_share_decomposition(const ContractSolution& sol,
                                                double tolerance = 1e-7);

struct ExpectedRiskShare {
    double per_horizon_value = 0.0; ///< K0 - (c1+c2)/(gP+gA) (1 - e^{-lambda T}) / T
    double analytic_value = 0.0; ///< K0 + slope E[T ^ tau]
    double mc_value = 0.0;       ///< Monte-Carlo mean of f(T ^ tau)
    double mc_standard_error = 0.0;
    std::uint64_t draws = 0;
};

ExpectedRiskShare expected_risk_share(const ContractSolution& sol, std::uint64_t draws,
                                      std::uint64_t seed);

/// Phi_0^{MH}(0) / Phi_0^{FB}(0).
double value_ratio(const ModelParams& params, const IntensitySpec& intensity);

} // namespace contract_lab
