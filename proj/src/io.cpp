#include "contract_lab/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "contract_lab/format.hpp"

namespace contract_lab {

namespace {

double number(const Json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    return v.get<double>();
}

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const char* where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(std::string("unknown key '") + it.key() + "' in " + where);
}

std::string kind_of(const Json& j, const char* where) {
    if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
    if (!j.contains("kind") || !j.at("kind").is_string())
        throw ConfigError(std::string(where) + " needs a string 'kind'");
    return j.at("kind").get<std::string>();
}

IntensitySpec parse_intensity(const Json& j) {
    const auto kind = kind_of(j, "intensity");
    if (kind == "constant") {
        reject_unknown(j, {"kind", "lambda"}, "intensity");
        if (!j.contains("lambda")) throw ConfigError("constant intensity needs 'lambda'");
        return IntensitySpec::constant(number(j, "lambda"));
    }
    if (kind == "grid") {
        reject_unknown(j, {"kind", "points", "interp"}, "intensity");
        if (!j.contains("points") || !j.at("points").is_array())
            throw ConfigError("grid intensity needs an array 'points'");
        std::vector<std::pair<double, double>> points;
        for (const auto& p : j.at("points")) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                throw ConfigError("grid points must be [t, lambda] number pairs");
            points.emplace_back(p[0].get<double>(), p[1].get<double>());
        }
        Interp interp = Interp::Step;
        if (j.contains("interp")) {
            const auto& s = j.at("interp");
            if (s == "step")
                interp = Interp::Step;
            else if (s == "linear")
                interp = Interp::Linear;
            else
                throw ConfigError("interp must be \"step\" or \"linear\"");
        }
        if (points.empty()) throw ConfigError("grid intensity needs at least one point");
        return IntensitySpec::grid(std::move(points), interp);
    }
    throw ConfigError("unknown intensity kind '" + kind + "'");
}

ProblemVariant parse_variant(const Json& j) {
    const auto kind = kind_of(j, "variant");
    if (kind == "first_best") {
        reject_unknown(j, {"kind"}, "variant");
        return FirstBest{};
    }
    if (kind == "moral_hazard") {
        reject_unknown(j, {"kind"}, "variant");
        return MoralHazard{};
    }
    if (kind == "mitigation") {
        reject_unknown(j, {"kind", "theta", "invest_cost"}, "variant");
        if (!j.contains("theta") || !j.contains("invest_cost"))
            throw ConfigError("mitigation needs 'theta' and 'invest_cost'");
        return Mitigation{number(j, "theta"), number(j, "invest_cost")};
    }
    throw ConfigError("unknown variant kind '" + kind + "'");
}

Json grid_pairs(const TimeFunction& f, double horizon, int n) {
    Json out = Json::array();
    for (int i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : i == n - 1 ? horizon : horizon * i / (n - 1);
        out.push_back({t, f(t)});
    }
    return out;
}

Json estimate_json(const Estimate& e) {
    return {{"estimate", e.estimate}, {"standard_error", e.standard_error}};
}

} // namespace

ProblemConfig parse_config(const Json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(j,
                   {"gamma_p", "gamma_a", "kappa", "horizon", "y_pc", "x0", "effort_bound",
                    "intensity", "variant"},
                   "config");
    ProblemConfig c;
    auto& p = c.params;
    for (auto [key, field] : {std::pair{"gamma_p", &p.gamma_p}, std::pair{"gamma_a", &p.gamma_a},
                              std::pair{"kappa", &p.kappa}, std::pair{"horizon", &p.horizon},
                              std::pair{"y_pc", &p.y_pc}, std::pair{"x0", &p.x0},
                              std::pair{"effort_bound", &p.effort_bound}})
        if (j.contains(key)) *field = number(j, key);
    if (!j.contains("intensity")) throw ConfigError("config needs 'intensity'");
    if (!j.contains("variant")) throw ConfigError("config needs 'variant'");
    c.intensity = parse_intensity(j.at("intensity"));
    c.variant = parse_variant(j.at("variant"));
    return c;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("'" + path + "': " + e.what());
    }
}

ProblemConfig load_config(const std::string& path) { return parse_config(read_json_file(path)); }

Json to_json(const ProblemConfig& c) {
    const auto& p = c.params;
    Json j = {{"gamma_p", p.gamma_p}, {"gamma_a", p.gamma_a},           {"kappa", p.kappa},
              {"horizon", p.horizon}, {"y_pc", p.y_pc},                 {"x0", p.x0},
              {"effort_bound", p.effort_bound}};
    if (c.intensity.is_constant()) {
        j["intensity"] = {{"kind", "constant"}, {"lambda", c.intensity.constant_value()}};
    } else {
        Json pts = Json::array();
        for (const auto& [t, l] : c.intensity.points()) pts.push_back({t, l});
        j["intensity"] = {{"kind", "grid"},
                          {"points", pts},
                          {"interp", c.intensity.interp() == Interp::Step ? "step" : "linear"}};
    }
    if (const auto* m = std::get_if<Mitigation>(&c.variant))
        j["variant"] = {{"kind", "mitigation"}, {"theta", m->theta}, {"invest_cost", m->invest_cost}};
    else
        j["variant"] = {{"kind", variant_name(c.variant)}};
    return j;
}

Json solution_json(const ContractSolution& sol, int grid_points) {
    const double horizon = sol.params.horizon;
    Json j = {{"variant", variant_name(sol.variant)},
              {"y0", sol.y0},
              {"z_star", sol.z_star},
              {"a_star", sol.a_star},
              {"c1", sol.coef.c1(0.0)},
              {"c2", sol.coef.c2(0.0)},
              {"coefficients_constant", sol.coef.c1_const.has_value() && sol.coef.c2_const.has_value()},
              {"phi0_method", to_string(sol.phi0.method())},
              {"phi0_0", sol.phi0(0.0)},
              {"k_star_0", sol.k_star(0.0)}};
    j["k_star_grid"] = grid_pairs(sol.k_star, horizon, grid_points);
    j["phi0_grid"] = grid_pairs([&sol](double t) { return sol.phi0(t); }, horizon, grid_points);
    return j;
}

Json solution_json(const MitigationSolution& sol, int grid_points) {
    Json j = solution_json(sol.contract, grid_points);
    j["c_inv"] = sol.policy.c_inv;
    j["t_max"] = sol.policy.t_max ? Json(*sol.policy.t_max) : Json(nullptr);
    j["theta"] = sol.policy.theta;
    j["invest_cost"] = sol.policy.invest_cost;
    j["k_star_mitigation_grid"] = j["k_star_grid"];
    j["post_default_sensitivity"] = sol.post_default_sensitivity;
    j["post_default_effort_hm"] = sol.post_default_effort_hm;
    j["post_default_effort_unadjusted"] = sol.post_default_effort_unadjusted;
    return j;
}

void write_solution_csv(std::ostream& out, const ContractSolution& sol, int grid_points) {
    out << "t,phi0,k_star\n";
    const double horizon = sol.params.horizon;
    for (int i = 0; i < grid_points; ++i) {
        const double t = grid_points == 1      ? 0.0
                         : i == grid_points - 1 ? horizon
                                                : horizon * i / (grid_points - 1);
        out << format_number(t) << ',' << format_number(sol.phi0(t)) << ','
            << format_number(sol.k_star(t)) << '\n';
    }
}

Json to_json(const SimReport& r) {
    return {{"principal_utility", estimate_json(r.principal_utility)},
            {"agent_utility", estimate_json(r.agent_utility)},
            {"default_frequency", estimate_json(r.default_frequency)},
            {"mean_wage", estimate_json(r.mean_wage)},
            {"seeds_used",
             {{"master_seed", r.seeds_used.master_seed},
              {"n_paths", r.seeds_used.n_paths},
              {"n_steps", r.seeds_used.n_steps},
              {"scheme", r.seeds_used.scheme}}}};
}

Json to_json(const VerificationReport& r) {
    Json checks = Json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"status", c.status},
                          {"measured", c.measured},
                          {"tolerance", c.tolerance},
                          {"detail", c.detail}});
    return {{"passed", r.passed()}, {"checks", checks}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

} // namespace contract_lab
