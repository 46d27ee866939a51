#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace contract_lab {

/// Raised when inputs fail validation. The message lists every violation.
class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

  private:
    std::vector<std::string> violations_;
};

/// Exogenous constants of the contracting problem.
struct ModelParams {
    double gamma_p = 1.0;       ///< principal CARA risk aversion
    double gamma_a = 1.0;       ///< agent CARA risk aversion
    double kappa = 1.0;         ///< quadratic effort-cost coefficient
    double horizon = 1.0;       ///< contract maturity T
    double y_pc = 0.0;          ///< reservation certainty equivalent
    double x0 = 0.0;            ///< initial output
    double effort_bound = 10.0; ///< admissible effort bound A
};

enum class Interp { Step, Linear };

/// Default intensity lambda(t): either a constant or a tabulated grid.
///
/// Step interpolation holds the value of node i on [t_i, t_{i+1}); linear
/// interpolation joins the nodes. Beyond the last node the last value holds.
class IntensitySpec {
  public:
    IntensitySpec() = default;

    static IntensitySpec constant(double lambda);
    static IntensitySpec grid(std::vector<std::pair<double, double>> points,
                              Interp interp = Interp::Step);

    bool is_constant() const { return constant_; }
    /// Throws std::logic_error for grid intensities.
    double constant_value() const;

    double rate(double t) const;
    /// Lambda_t = int_0^t lambda(s) ds.
    double cumulative(double t) const;
    /// Smallest t with Lambda_t >= target; +inf if the target is never reached.
    double inverse_cumulative(double target) const;

    /// Grid times where lambda is not smooth (empty for constants).
    std::vector<double> breakpoints() const;

    const std::vector<std::pair<double, double>>& points() const { return points_; }
    Interp interp() const { return interp_; }

  private:
    bool constant_ = true;
    double lambda_ = 0.0;
    std::vector<std::pair<double, double>> points_;
    Interp interp_ = Interp::Step;
    std::vector<double> cum_; // Lambda at each node
};

struct FirstBest {};
struct MoralHazard {};
struct Mitigation {
    double theta = 0.9;
    double invest_cost = 0.1;
};

using ProblemVariant = std::variant<FirstBest, MoralHazard, Mitigation>;

std::string variant_name(const ProblemVariant& variant);
bool is_moral_hazard_family(const ProblemVariant& variant);

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Lower bound on A that keeps the agent's best response interior.
double effort_bound_threshold(const ModelParams& params);

ValidationReport validate(const ModelParams& params, const IntensitySpec& intensity,
                          const ProblemVariant& variant);

/// Throws ValidationError if validate() reports any violation.
void require_valid(const ModelParams& params, const IntensitySpec& intensity,
                   const ProblemVariant& variant);

/// P(tau <= t) = 1 - exp(-Lambda_t). Throws std::out_of_range outside [0, horizon].
double default_probability(const IntensitySpec& intensity, double t, double horizon);

} // namespace contract_lab
