#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace contract_lab {

/// Raised when a Bernoulli solution leaves its positive domain.
class DomainError : public std::runtime_error {
  public:
    DomainError(const std::string& what, double t) : std::runtime_error(what), t_(t) {}
    /// Time at which the bracket / substituted variable became nonpositive.
    double offending_time() const { return t_; }

  private:
    double t_;
};

using TimeFunction = std::function<double(double)>;

/// Coefficients of  Phi' + c1(t) Phi + c2(t) Phi^(1 - alpha) = 0,  Phi(T) = 1.
///
/// alpha = gamma_A / (gamma_P + gamma_A). When c1 or c2 is constant the value is
/// also kept in c1_const / c2_const so the closed forms can use it.
struct BernoulliCoefficients {
    TimeFunction c1;
    TimeFunction c2;
    double alpha = 0.5;
    double horizon = 1.0;
    std::optional<double> c1_const;
    std::optional<double> c2_const;
    /// Interior times where c1 or c2 is only piecewise smooth; used as mandatory nodes.
    std::vector<double> breakpoints;

    static BernoulliCoefficients constant(double c1, double c2, double alpha, double horizon);
};

enum class PhiMethod { ClosedForm, Numeric, IntegralForm };

std::string to_string(PhiMethod method);

/// Value multiplier Phi_0 on [0, T]. Cheap to copy; evaluation is pure and thread-safe.
class PhiFunction {
  public:
    PhiFunction(PhiMethod method, BernoulliCoefficients coef, TimeFunction eval);

    double operator()(double t) const { return eval_(t); }
    PhiMethod method() const { return method_; }
    const BernoulliCoefficients& coefficients() const { return *coef_; }
    double horizon() const { return coef_->horizon; }

  private:
    PhiMethod method_;
    std::shared_ptr<const BernoulliCoefficients> coef_;
    TimeFunction eval_;
};

/// Exact solution for constant c1, c2. c1 = 0 is handled as the linear limit.
PhiFunction phi_closed_form(const BernoulliCoefficients& coef);

/// Backward RK4 on u = Phi^alpha, which satisfies u' + alpha c1 u = -alpha c2.
/// Requires grid_step <= T/16; breakpoints are always grid nodes.
PhiFunction phi_numeric(const BernoulliCoefficients& coef, double grid_step);

/// u(t) = e^{alpha c1 (T-t)} + alpha int_t^T c2(s) e^{alpha c1 (s-t)} ds; the integral is
/// tabulated once by composite Simpson with breakpoints as cell edges. Requires constant c1.
PhiFunction phi_integral_form(const BernoulliCoefficients& coef);

/// Pointwise ODE residual with a central-difference derivative of step h.
double bernoulli_residual(const PhiFunction& phi, double t, double h);

} // namespace contract_lab
