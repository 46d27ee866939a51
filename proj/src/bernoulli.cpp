#include "contract_lab/bernoulli.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace contract_lab {

namespace {

constexpr int kSimpsonBasePanels = 2048; // table cells per horizon
constexpr int kCellPanels = 8;
constexpr double kSimpsonRelTol = 1e-10;
constexpr int kMaxDoublings = 12;

std::string fmt_time(double t) {
    std::ostringstream os;
    os.precision(12);
    os << t;
    return os.str();
}

void check_domain(double t, double horizon) {
    const double slack = 1e-12 * std::max(1.0, horizon);
    if (!(t >= -slack && t <= horizon + slack))
        throw std::out_of_range("Phi evaluated at t = " + fmt_time(t) + " outside [0, " +
                                fmt_time(horizon) + "]");
}

// expm1(x)/x with its limit 1 at x = 0.
double exprel(double x) { return x == 0.0 ? 1.0 : std::expm1(x) / x; }

double phi_from_u(double u, double alpha, double t) {
    if (!(u > 0.0))
        throw DomainError("Bernoulli bracket is nonpositive at t = " + fmt_time(t), t);
    return u == 1.0 ? 1.0 : std::exp(std::log(u) / alpha);
}

// Sorted interior nodes in (lo, hi) plus the two ends.
std::vector<double> segment_nodes(const std::vector<double>& breakpoints, double lo, double hi) {
    std::vector<double> nodes{lo};
    std::vector<double> bp = breakpoints;
    std::sort(bp.begin(), bp.end());
    const double eps = 1e-14 * std::max(1.0, std::abs(hi - lo));
    for (double b : bp)
        if (b > lo + eps && b < hi - eps) nodes.push_back(b);
    nodes.push_back(hi);
    return nodes;
}

void require_basic(const BernoulliCoefficients& coef) {
    if (!(coef.alpha > 0.0 && coef.alpha < 1.0))
        throw std::invalid_argument("Bernoulli exponent ratio alpha must lie in (0,1)");
    if (!(coef.horizon > 0.0) || !std::isfinite(coef.horizon))
        throw std::invalid_argument("Bernoulli horizon must be positive and finite");
    if (!coef.c1 || !coef.c2) throw std::invalid_argument("Bernoulli coefficients are unset");
}

} // namespace

BernoulliCoefficients BernoulliCoefficients::constant(double c1, double c2, double alpha,
                                                      double horizon) {
    BernoulliCoefficients coef;
    coef.c1 = [c1](double) { return c1; };
    coef.c2 = [c2](double) { return c2; };
    coef.alpha = alpha;
    coef.horizon = horizon;
    coef.c1_const = c1;
    coef.c2_const = c2;
    return coef;
}

std::string to_string(PhiMethod method) {
    switch (method) {
    case PhiMethod::ClosedForm: return "closed_form";
    case PhiMethod::Numeric: return "numeric";
    case PhiMethod::IntegralForm: return "integral_form";
    }
    return "unknown";
}

PhiFunction::PhiFunction(PhiMethod method, BernoulliCoefficients coef, TimeFunction eval)
    : method_(method), coef_(std::make_shared<const BernoulliCoefficients>(std::move(coef))),
      eval_(std::move(eval)) {}

PhiFunction phi_closed_form(const BernoulliCoefficients& coef) {
    require_basic(coef);
    if (!coef.c1_const || !coef.c2_const)
        throw std::invalid_argument("phi_closed_form needs constant c1 and c2");
    const double c1 = *coef.c1_const;
    const double c2 = *coef.c2_const;
    const double alpha = coef.alpha;
    const double horizon = coef.horizon;

    // ((c1+c2)/c1) e^{x} - c2/c1 rewritten as e^{x} + alpha c2 s expm1(x)/x, x = alpha c1 s,
    // which stays accurate as c1 -> 0 and reduces to 1 + alpha c2 s at c1 = 0.
    auto bracket = [=](double t) {
        const double s = horizon - t;
        const double x = alpha * c1 * s;
        return std::exp(x) + alpha * c2 * s * exprel(x);
    };
    constexpr int kScan = 1024;
    for (int i = 0; i <= kScan; ++i) {
        const double t = horizon * i / kScan;
        if (!(bracket(t) > 0.0))
            throw DomainError("closed-form Bernoulli bracket is nonpositive at t = " + fmt_time(t),
                              t);
    }
    return PhiFunction(PhiMethod::ClosedForm, coef, [=](double t) {
        check_domain(t, horizon);
        t = std::clamp(t, 0.0, horizon);
        return phi_from_u(bracket(t), alpha, t);
    });
}

namespace {

struct NumericTable {
    std::vector<double> t;       // node times, increasing, t.front() = 0, t.back() = T
    std::vector<double> u;       // u at nodes
    std::vector<double> du_left; // u' at the left end of interval j (from inside)
    std::vector<double> du_right;
    double alpha = 0.5;
    double horizon = 1.0;

    double eval_u(double x) const {
        if (x >= t.back()) return u.back();
        if (x <= t.front()) return u.front();
        auto it = std::upper_bound(t.begin(), t.end(), x);
        const std::size_t j = static_cast<std::size_t>(it - t.begin()) - 1;
        if (x == t[j]) return u[j];
        const double h = t[j + 1] - t[j];
        const double s = (x - t[j]) / h;
        const double s2 = s * s;
        const double s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1;
        const double h10 = s3 - 2 * s2 + s;
        const double h01 = -2 * s3 + 3 * s2;
        const double h11 = s3 - s2;
        return h00 * u[j] + h10 * h * du_left[j] + h01 * u[j + 1] + h11 * h * du_right[j];
    }
};

} // namespace

PhiFunction phi_numeric(const BernoulliCoefficients& coef, double grid_step) {
    require_basic(coef);
    const double horizon = coef.horizon;
    if (!(grid_step > 0.0) || grid_step > horizon / 16.0)
        throw std::invalid_argument("phi_numeric: grid_step must lie in (0, T/16]");

    const double alpha = coef.alpha;
    const auto& c1 = coef.c1;
    const auto& c2 = coef.c2;

    auto table = std::make_shared<NumericTable>();
    table->alpha = alpha;
    table->horizon = horizon;

    // Build node times: each smooth segment split into equal steps <= grid_step.
    const auto seg = segment_nodes(coef.breakpoints, 0.0, horizon);
    table->t.push_back(0.0);
    for (std::size_t k = 0; k + 1 < seg.size(); ++k) {
        const double a = seg[k];
        const double b = seg[k + 1];
        const auto n = static_cast<std::size_t>(std::ceil((b - a) / grid_step - 1e-9));
        for (std::size_t i = 1; i <= n; ++i) table->t.push_back(i == n ? b : a + (b - a) * i / n);
    }
    const std::size_t nodes = table->t.size();
    table->u.assign(nodes, 0.0);
    table->du_left.assign(nodes - 1, 0.0);
    table->du_right.assign(nodes - 1, 0.0);
    table->u.back() = 1.0;

    for (std::size_t j = nodes - 1; j > 0; --j) {
        const double a = table->t[j - 1];
        const double b = table->t[j];
        const double h = b - a;
        // Coefficients are sampled strictly inside (a, b) so jumps at nodes use the correct side.
        const double nudge = 1e-10 * h;
        auto rhs = [&](double s, double u) {
            const double si = std::clamp(s, a + nudge, b - nudge);
            return -alpha * c1(si) * u - alpha * c2(si);
        };
        const double ub = table->u[j];
        const double k1 = rhs(b, ub);
        const double k2 = rhs(b - 0.5 * h, ub - 0.5 * h * k1);
        const double k3 = rhs(b - 0.5 * h, ub - 0.5 * h * k2);
        const double k4 = rhs(a, ub - h * k3);
        const double ua = ub - h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        if (!(ua > 0.0) || !std::isfinite(ua))
            throw DomainError("substituted Bernoulli variable is nonpositive at t = " +
                                  fmt_time(a),
                              a);
        table->u[j - 1] = ua;
        table->du_right[j - 1] = k1;
        table->du_left[j - 1] = rhs(a, ua);
    }

    return PhiFunction(PhiMethod::Numeric, coef, [table](double t) {
        check_domain(t, table->horizon);
        return phi_from_u(table->eval_u(t), table->alpha, t);
    });
}

namespace {

// Composite Simpson on [a, b] with step <= base_step, doubled until converged.
double adaptive_simpson(const std::function<double(double)>& g, double a, double b,
                        double base_step) {
    if (b <= a) return 0.0;
    std::size_t n = static_cast<std::size_t>(std::ceil((b - a) / base_step - 1e-9));
    n = std::max<std::size_t>(2, n + (n % 2));
    double h = (b - a) / static_cast<double>(n);
    const double ends = g(a) + g(b);
    double odd = 0.0;
    double even = 0.0;
    for (std::size_t i = 1; i < n; ++i) (i % 2 ? odd : even) += g(a + h * static_cast<double>(i));
    double prev = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
    for (int level = 0; level < kMaxDoublings; ++level) {
        even += odd;
        odd = 0.0;
        h *= 0.5;
        n *= 2;
        for (std::size_t i = 1; i < n; i += 2) odd += g(a + h * static_cast<double>(i));
        const double next = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
        if (std::abs(next - prev) <= kSimpsonRelTol * std::abs(next)) return next;
        prev = next;
    }
    return prev;
}

} // namespace

PhiFunction phi_integral_form(const BernoulliCoefficients& coef) {
    require_basic(coef);
    if (!coef.c1_const) throw std::invalid_argument("phi_integral_form needs a constant c1");

    // u(t) = e^{a c1 (T-t)} (1 + a G(t)),  G(t) = int_t^T c2(s) e^{a c1 (s-T)} ds.
    // G is tabulated once on cells that never straddle a breakpoint; an evaluation adds
    // the partial cell [t, right node] by Simpson.
    struct Table {
        double c1, alpha, horizon;
        TimeFunction c2;
        std::vector<double> nodes;
        std::vector<double> tail; // G at each node

        double integrand(double s) const { return c2(s) * std::exp(alpha * c1 * (s - horizon)); }

        double eval_u(double t) const {
            const double s = horizon - t;
            if (s <= 0.0) return 1.0;
            auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
            if (it == nodes.end()) --it;
            const std::size_t j = static_cast<std::size_t>(it - nodes.begin());
            const double right = nodes[j];
            const double cell = j > 0 ? right - nodes[j - 1] : right;
            const auto g = [this](double r) { return integrand(r); };
            const double partial = adaptive_simpson(g, t, right, cell / kCellPanels);
            return std::exp(alpha * c1 * s) * (1.0 + alpha * (partial + tail[j]));
        }
    };
    auto table = std::make_shared<Table>();
    table->c1 = *coef.c1_const;
    table->alpha = coef.alpha;
    table->horizon = coef.horizon;
    table->c2 = coef.c2;

    const double max_cell = coef.horizon / kSimpsonBasePanels;
    const auto seg = segment_nodes(coef.breakpoints, 0.0, coef.horizon);
    table->nodes.push_back(0.0);
    for (std::size_t k = 0; k + 1 < seg.size(); ++k) {
        const double len = seg[k + 1] - seg[k];
        const auto cells = static_cast<std::size_t>(std::max(1.0, std::ceil(len / max_cell - 1e-9)));
        for (std::size_t c = 1; c <= cells; ++c)
            table->nodes.push_back(c == cells ? seg[k + 1]
                                              : seg[k] + len * static_cast<double>(c) /
                                                             static_cast<double>(cells));
    }
    const std::size_t n = table->nodes.size();
    table->tail.assign(n, 0.0);
    const auto g = [t = table.get()](double r) { return t->integrand(r); };
    for (std::size_t j = n - 1; j-- > 0;) {
        const double a = table->nodes[j];
        const double b = table->nodes[j + 1];
        table->tail[j] = table->tail[j + 1] + adaptive_simpson(g, a, b, (b - a) / kCellPanels);
    }

    return PhiFunction(PhiMethod::IntegralForm, coef, [table](double t) {
        check_domain(t, table->horizon);
        t = std::clamp(t, 0.0, table->horizon);
        return phi_from_u(table->eval_u(t), table->alpha, t);
    });
}

double bernoulli_residual(const PhiFunction& phi, double t, double h) {
    const auto& coef = phi.coefficients();
    const double horizon = coef.horizon;
    double derivative;
    if (t - h >= 0.0 && t + h <= horizon) {
        derivative = (phi(t + h) - phi(t - h)) / (2.0 * h);
    } else if (t - h < 0.0) {
        derivative = (-3.0 * phi(t) + 4.0 * phi(t + h) - phi(t + 2 * h)) / (2.0 * h);
    } else {
        derivative = (3.0 * phi(t) - 4.0 * phi(t - h) + phi(t - 2 * h)) / (2.0 * h);
    }
    const double value = phi(t);
    return derivative + coef.c1(t) * value + coef.c2(t) * std::pow(value, 1.0 - coef.alpha);
}

} // namespace contract_lab
