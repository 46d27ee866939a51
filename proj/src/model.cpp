#include "contract_lab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace contract_lab {

namespace {

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += "; ";
        out += s;
    }
    return out;
}

std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(9);
    os << v;
    return os.str();
}

} // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::runtime_error("invalid inputs: " + join(violations)), violations_(std::move(violations)) {}

IntensitySpec IntensitySpec::constant(double lambda) {
    IntensitySpec spec;
    spec.constant_ = true;
    spec.lambda_ = lambda;
    return spec;
}

IntensitySpec IntensitySpec::grid(std::vector<std::pair<double, double>> points, Interp interp) {
    if (points.empty()) throw std::invalid_argument("intensity grid needs at least one point");
    IntensitySpec spec;
    spec.constant_ = false;
    spec.points_ = std::move(points);
    spec.interp_ = interp;
    // Running integral from the first node; Lambda_t subtracts the value at 0.
    spec.cum_.assign(spec.points_.size(), 0.0);
    for (std::size_t i = 1; i < spec.points_.size(); ++i) {
        const auto [t0, l0] = spec.points_[i - 1];
        const auto [t1, l1] = spec.points_[i];
        const double seg = interp == Interp::Step ? l0 * (t1 - t0) : 0.5 * (l0 + l1) * (t1 - t0);
        spec.cum_[i] = spec.cum_[i - 1] + seg;
    }
    return spec;
}

double IntensitySpec::constant_value() const {
    if (!constant_) throw std::logic_error("intensity is not constant");
    return lambda_;
}

double IntensitySpec::rate(double t) const {
    if (constant_) return lambda_;
    if (t <= points_.front().first) return points_.front().second;
    if (t >= points_.back().first) return points_.back().second;
    auto it = std::upper_bound(points_.begin(), points_.end(), t,
                               [](double v, const auto& p) { return v < p.first; });
    const std::size_t i = static_cast<std::size_t>(it - points_.begin()) - 1;
    const auto [t0, l0] = points_[i];
    if (interp_ == Interp::Step) return l0;
    const auto [t1, l1] = points_[i + 1];
    return l0 + (l1 - l0) * (t - t0) / (t1 - t0);
}

namespace {

// Integral of lambda from the first node to t, for a grid intensity.
double grid_running_integral(const std::vector<std::pair<double, double>>& pts,
                             const std::vector<double>& cum, Interp interp, double t) {
    if (t <= pts.front().first) return (t - pts.front().first) * pts.front().second;
    if (t >= pts.back().first) return cum.back() + (t - pts.back().first) * pts.back().second;
    auto it = std::upper_bound(pts.begin(), pts.end(), t,
                               [](double v, const auto& p) { return v < p.first; });
    const std::size_t i = static_cast<std::size_t>(it - pts.begin()) - 1;
    const auto [t0, l0] = pts[i];
    const double d = t - t0;
    if (interp == Interp::Step) return cum[i] + l0 * d;
    const auto [t1, l1] = pts[i + 1];
    return cum[i] + l0 * d + 0.5 * (l1 - l0) * d * d / (t1 - t0);
}

} // namespace

double IntensitySpec::cumulative(double t) const {
    if (constant_) return lambda_ * t;
    return grid_running_integral(points_, cum_, interp_, t) -
           grid_running_integral(points_, cum_, interp_, 0.0);
}

double IntensitySpec::inverse_cumulative(double target) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (target <= 0.0) return 0.0;
    if (constant_) return lambda_ > 0.0 ? target / lambda_ : inf;

    const double goal = target + grid_running_integral(points_, cum_, interp_, 0.0);
    if (goal >= cum_.back()) {
        const double tail = points_.back().second;
        return tail > 0.0 ? points_.back().first + (goal - cum_.back()) / tail : inf;
    }
    // First node whose running integral reaches the goal.
    auto it = std::lower_bound(cum_.begin(), cum_.end(), goal);
    std::size_t i = static_cast<std::size_t>(it - cum_.begin());
    if (i == 0) return points_.front().first;
    --i;
    const auto [t0, l0] = points_[i];
    const auto [t1, l1] = points_[i + 1];
    const double need = goal - cum_[i];
    if (interp_ == Interp::Step) return l0 > 0.0 ? t0 + need / l0 : t1;
    // Solve l0 d + (l1 - l0) d^2 / (2 h) = need for d in [0, h].
    const double h = t1 - t0;
    const double q = 0.5 * (l1 - l0) / h;
    double d;
    if (std::abs(q) < 1e-14 * std::max(1.0, std::abs(l0))) {
        d = need / l0;
    } else {
        const double disc = std::max(0.0, l0 * l0 + 4.0 * q * need);
        d = 2.0 * need / (l0 + std::sqrt(disc));
    }
    return t0 + std::clamp(d, 0.0, h);
}

std::vector<double> IntensitySpec::breakpoints() const {
    std::vector<double> out;
    if (constant_) return out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.first);
    return out;
}

std::string variant_name(const ProblemVariant& variant) {
    struct Visitor {
        std::string operator()(const FirstBest&) const { return "first_best"; }
        std::string operator()(const MoralHazard&) const { return "moral_hazard"; }
        std::string operator()(const Mitigation&) const { return "mitigation"; }
    };
    return std::visit(Visitor{}, variant);
}

bool is_moral_hazard_family(const ProblemVariant& variant) {
    return !std::holds_alternative<FirstBest>(variant);
}

double effort_bound_threshold(const ModelParams& p) {
    return (p.gamma_p + 1.0 / p.kappa) / (p.kappa * (p.gamma_p + p.gamma_a) + 1.0);
}

ValidationReport validate(const ModelParams& p, const IntensitySpec& intensity,
                          const ProblemVariant& variant) {
    ValidationReport report;
    auto& v = report.violations;

    const std::pair<const char*, double> positive[] = {
        {"gamma_p", p.gamma_p}, {"gamma_a", p.gamma_a},           {"kappa", p.kappa},
        {"horizon", p.horizon}, {"effort_bound", p.effort_bound},
    };
    bool finite_ok = true;
    for (const auto& [name, value] : positive) {
        if (!std::isfinite(value)) {
            v.push_back(std::string(name) + " must be finite");
            finite_ok = false;
        } else if (!(value > 0.0)) {
            v.push_back(std::string(name) + " must be > 0 (got " + fmt_num(value) + ")");
            finite_ok = false;
        }
    }
    if (!std::isfinite(p.y_pc)) v.push_back("y_pc must be finite");
    if (!std::isfinite(p.x0)) v.push_back("x0 must be finite");

    if (intensity.is_constant()) {
        const double lambda = intensity.constant_value();
        if (!std::isfinite(lambda) || lambda < 0.0)
            v.push_back("lambda must be finite and >= 0 (got " + fmt_num(lambda) + ")");
    } else {
        const auto& pts = intensity.points();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (!std::isfinite(pts[i].first) || !std::isfinite(pts[i].second) || pts[i].second < 0.0)
                v.push_back("intensity grid point " + std::to_string(i) +
                            " must be finite with lambda >= 0");
            if (i > 0 && !(pts[i].first > pts[i - 1].first))
                v.push_back("intensity grid times must be strictly increasing (at index " +
                            std::to_string(i) + ")");
        }
        if (pts.front().first > 0.0) v.push_back("intensity grid must start at or before t = 0");
        if (finite_ok && pts.back().first < p.horizon)
            v.push_back("intensity grid must extend to the horizon T = " + fmt_num(p.horizon));
    }

    if (finite_ok) {
        if (is_moral_hazard_family(variant)) {
            const double bound = effort_bound_threshold(p);
            if (!(p.effort_bound > bound))
                v.push_back("effort_bound " + fmt_num(p.effort_bound) + " must exceed " +
                            fmt_num(bound) + " for the moral-hazard contract");
        } else if (p.effort_bound < 1.0 / p.kappa) {
            v.push_back("effort_bound " + fmt_num(p.effort_bound) +
                        " must be at least 1/kappa = " + fmt_num(1.0 / p.kappa));
        }
    }

    if (const auto* m = std::get_if<Mitigation>(&variant)) {
        if (!std::isfinite(m->theta) || !(m->theta > 0.0 && m->theta < 1.0))
            v.push_back("theta must lie strictly in (0,1) (got " + fmt_num(m->theta) + ")");
        if (!std::isfinite(m->invest_cost) || !(m->invest_cost > 0.0))
            v.push_back("invest_cost must be > 0 (got " + fmt_num(m->invest_cost) + ")");
        if (!intensity.is_constant()) v.push_back("mitigation requires a constant intensity");
    }
    return report;
}

void require_valid(const ModelParams& params, const IntensitySpec& intensity,
                   const ProblemVariant& variant) {
    auto report = validate(params, intensity, variant);
    if (!report.ok()) throw ValidationError(std::move(report.violations));
}

double default_probability(const IntensitySpec& intensity, double t, double horizon) {
    if (!(t >= 0.0 && t <= horizon))
        throw std::out_of_range("default_probability: t = " + fmt_num(t) + " outside [0, " +
                                fmt_num(horizon) + "]");
    return -std::expm1(-intensity.cumulative(t));
}

} // namespace contract_lab
