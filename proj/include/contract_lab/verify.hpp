#pragma once

#include "contract_lab/contract.hpp"
#include "contract_lab/mitigation.hpp"
#include "contract_lab/simulate.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace contract_lab {

/// Candidate value function U_P(x - y) Phi(t) with its controls, for any variant.
struct Candidate {
    ModelParams params;
    IntensitySpec intensity;
    ProblemVariant variant;
    TimeFunction phi;
    TimeFunction k;
    TimeFunction continuation; ///< post-default factor m(t); 1 without mitigation
    double z = 0.0;
    double a = 0.0;
    WagePolicy policy; ///< optimal wage and effort, for the Monte-Carlo checks
};

/// Solves the variant (FB, MH, or mitigation) and packages the candidate.
Candidate make_candidate(const ModelParams& params, const IntensitySpec& intensity,
                         const ProblemVariant& variant);

struct HjbGrid {
    int nt = 50;
    int nx = 20;
    int ny = 20;
    double x_lo = -2.0, x_hi = 2.0;
    double y_lo = -2.0, y_hi = 2.0;
    double fd_step = 1e-4; ///< Phi' finite-difference step, relative to T
    double tolerance = 1e-5;
};

struct ResidualReport {
    std::string grid_description;
    double dt = 0.0, dx = 0.0, dy = 0.0;
    double fd_step = 0.0;
    double max_abs_residual = 0.0;
    double max_scale = 0.0;           ///< largest node-wise scale sum |term|
    double max_relative_residual = 0.0; ///< max over nodes of |residual| / scale
    double arg_t = 0.0, arg_x = 0.0, arg_y = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

/// HJB residual of v = U_P(x - y) Phi(t) at the closed-form controls on a (t, x, y) grid.
/// Partial derivatives of U_P are analytic; Phi' uses central differences (3-point
/// one-sided at the ends). phi_perturbation is added to Phi as a negative control.
/// Passes when |residual| <= tolerance * scale at every node.
ResidualReport hjb_residual(const Candidate& candidate, const HjbGrid& grid = {},
                            double phi_perturbation = 0.0);
ResidualReport hjb_residual(const ModelParams& params, const IntensitySpec& intensity,
                            const ProblemVariant& variant, const HjbGrid& grid = {},
                            double phi_perturbation = 0.0);

/// Raised when a brute-force minimizer lands on the edge of its search grid.
class GridBoundaryError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ArgminGrid {
    double lo = -2.0;
    double hi = 2.0;
    double cell = 0.01;
};

struct ArgminReport {
    double t = 0.0;
    /// (a, Z, K); for effort-is-Z/kappa variants a is implied by Z.
    double grid_a = 0.0, grid_z = 0.0, grid_k = 0.0;
    double exact_a = 0.0, exact_z = 0.0, exact_k = 0.0;
    double cell = 0.0;
    bool within_one_cell = false;
    double gap = 0.0;       ///< H(grid argmin) - H(closed form)
    double gap_bound = 0.0; ///< second-order bound from the curvature at the optimum
    bool passed = false;
};

/// Brute-force minimizer of the Phi-form Hamiltonian
///   Phi [-gP a + gP (gA Z^2/2 + kappa a^2/2 + lambda/gA (e^{-gA K} - 1))
///        + gP^2 Z^2/2 - gP^2 Z + gP^2/2] + lambda m e^{gP K}
/// over (a, Z, K) for first-best and over (Z, K) with a = Z/kappa otherwise.
/// Throws GridBoundaryError if any coordinate of the argmin sits on the grid edge.
ArgminReport hamiltonian_argmin(const Candidate& candidate, double t, const ArgminGrid& grid = {});

struct EffortAlternative {
    std::string name;
    TimeFunction effort;
};

/// {0, +A, -A, a*/2, min(2a*, A), ramp from 0 to min(2a*, A)}.
std::vector<EffortAlternative> default_alternatives(const ModelParams& params, double a_star);

enum class DeviationStatus { OptimalWins, Tie, AlternativeWins };
std::string to_string(DeviationStatus status);

struct DeviationResult {
    std::string name;
    Estimate alternative;
    double difference = 0.0;   ///< U_A(optimal) - U_A(alternative)
    double combined_se = 0.0;  ///< sqrt(se_opt^2 + se_alt^2)
    double paired_se = 0.0;    ///< SE of the pathwise difference
    DeviationStatus status = DeviationStatus::Tie;
};

struct DeviationReport {
    Estimate optimal;
    std::vector<DeviationResult> results;
    bool all_optimal_win = false;
    bool passed = false; ///< no alternative beats the optimum; ties are reported only
};

/// Agent utility under the policy's effort versus each alternative, with the wage fixed
/// and common random numbers. Wins need a margin above 3 combined SEs.
DeviationReport deviation_test(const ModelParams& params, const IntensitySpec& intensity,
                               const WagePolicy& policy,
                               const std::vector<EffortAlternative>& alternatives,
                               const SimConfig& cfg);

struct MonteCarloCheck {
    double target = 0.0;
    double estimate = 0.0;
    double standard_error = 0.0;
    double gap = 0.0;
    double allowance = 0.0; ///< discretization allowance added to 3 SE
    bool passed = false;
};

/// |agent_utility - U_A(ce)| <= 3 SE + 5 dt |U_A(ce)|, ce defaulting to y_PC.
MonteCarloCheck participation_binding(const SimReport& report, const ModelParams& params,
                                      std::optional<double> certainty_equivalent = {});

/// |principal_utility - U_P(x0 - y0) Phi(0)| <= 3 SE + 5 dt |target|.
MonteCarloCheck principal_value_check(const SimReport& report, const Candidate& candidate,
                                      double y0);

struct CheckResult {
    std::string name;
    std::string status; ///< "pass", "fail", "inconclusive" or "skipped"
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct VerifyOptions {
    SimConfig sim{20000, 512, 42, 0, false, false};
    HjbGrid hjb{};
    ArgminGrid argmin{};
    double phi_perturbation = 0.0;
};

struct VerificationReport {
    std::vector<CheckResult> checks;
    bool passed() const;
};

/// Runs the HJB residual, Hamiltonian argmin, cross-representation, affinity, deviation and
/// participation checks. Checks that do not apply to the inputs are reported as skipped.
VerificationReport run_verification(const ModelParams& params, const IntensitySpec& intensity,
                                    const ProblemVariant& variant, const VerifyOptions& options);

} // namespace contract_lab
