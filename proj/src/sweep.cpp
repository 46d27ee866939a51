#include "contract_lab/sweep.hpp"

#include "contract_lab/format.hpp"
#include "contract_lab/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>

namespace contract_lab {

namespace {

const std::set<std::string>& sweep_params() {
    static const std::set<std::string> names{"gamma_p", "gamma_a",      "kappa",  "horizon",
                                             "y_pc",    "x0",           "effort_bound",
                                             "lambda",  "theta",        "invest_cost", "t"};
    return names;
}

void apply(const std::string& param, double value, ProblemConfig& c, double& t) {
    auto& p = c.params;
    if (param == "gamma_p") p.gamma_p = value;
    else if (param == "gamma_a") p.gamma_a = value;
    else if (param == "kappa") p.kappa = value;
    else if (param == "horizon") p.horizon = value;
    else if (param == "y_pc") p.y_pc = value;
    else if (param == "x0") p.x0 = value;
    else if (param == "effort_bound") p.effort_bound = value;
    else if (param == "lambda") c.intensity = IntensitySpec::constant(value);
    else if (param == "theta") std::get<Mitigation>(c.variant).theta = value;
    else if (param == "invest_cost") std::get<Mitigation>(c.variant).invest_cost = value;
    else if (param == "t") t = value;
}

std::string sanitize(std::string s) {
    for (auto& ch : s)
        if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ch == ',' ? ';' : ' ';
    return s;
}

// Lazily solved contracts for one node.
class Node {
  public:
    Node(ProblemConfig config, double t, const SweepSpec& spec)
        : c_(std::move(config)), t_(t), spec_(spec) {}

    std::string metric(const std::string& name) {
        if (name == "sign_k0") {
            if (std::holds_alternative<Mitigation>(c_.variant)) {
                const double k0 = mitigation().contract.k_star(0.0);
                return std::to_string(k0 > 0.0 ? 1 : k0 < 0.0 ? -1 : 0);
            }
            require_valid(c_.params, c_.intensity, c_.variant);
            return std::to_string(to_int(sign_of_k(c_.params, c_.intensity, c_.variant)));
        }
        if (name == "k0_fb") return format_number(plain(FirstBest{}).k_star(0.0));
        if (name == "k0_mh") return format_number(plain(MoralHazard{}).k_star(0.0));
        if (name == "expected_risk_share_per_horizon") return format_number(risk_share().per_horizon_value);
        if (name == "expected_risk_share_analytic")
            return format_number(risk_share().analytic_value);
        if (name == "expected_risk_share_mc") return format_number(risk_share().mc_value);
        if (name == "ratio_phi") return format_number(value_ratio(c_.params, c_.intensity));
        if (name == "c_inv") return format_number(mitigation().policy.c_inv);
        if (name == "t_max") {
            const auto& tm = mitigation().policy.t_max;
            if (!tm) throw std::runtime_error("investing is never optimal");
            return format_number(*tm);
        }
        if (name == "k_star_at") {
            if (std::holds_alternative<Mitigation>(c_.variant))
                return format_number(mitigation().contract.k_star(t_));
            return format_number(plain(c_.variant).k_star(t_));
        }
        if (name == "k_star_plain_at") return format_number(plain(MoralHazard{}).k_star(t_));
        throw std::invalid_argument("unknown metric");
    }

  private:
    const ContractSolution& plain(const ProblemVariant& v) {
        auto& slot = std::holds_alternative<FirstBest>(v) ? fb_ : mh_;
        if (!slot) slot.emplace(solve(c_.params, c_.intensity, v));
        return *slot;
    }
    const MitigationSolution& mitigation() {
        const auto* m = std::get_if<Mitigation>(&c_.variant);
        if (!m) throw NotApplicable("requires a mitigation config");
        if (!mit_) mit_.emplace(solve_mitigation(c_.params, c_.intensity, m->theta, m->invest_cost));
        return *mit_;
    }
    const ExpectedRiskShare& risk_share() {
        if (std::holds_alternative<Mitigation>(c_.variant))
            throw NotApplicable("expected risk share is defined without mitigation");
        if (!ers_) ers_ = expected_risk_share(plain(c_.variant), spec_.mc_draws, spec_.seed);
        return *ers_;
    }

    ProblemConfig c_;
    double t_;
    const SweepSpec& spec_;
    std::optional<ContractSolution> fb_, mh_;
    std::optional<MitigationSolution> mit_;
    std::optional<ExpectedRiskShare> ers_;
};

} // namespace

double SweepAxis::value(int i) const {
    return i == count - 1 ? max : min + (max - min) * i / (count - 1);
}

const std::vector<std::string>& sweep_metric_names() {
    static const std::vector<std::string> names{
        "sign_k0",   "k0_fb",     "k0_mh", "expected_risk_share_per_horizon",
        "expected_risk_share_analytic", "expected_risk_share_mc", "ratio_phi", "t_max",
        "c_inv",     "k_star_at", "k_star_plain_at"};
    return names;
}

SweepSpec parse_sweep(const Json& j) {
    if (!j.is_object()) throw ConfigError("sweep spec must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!std::set<std::string>{"base", "axes", "metrics", "t", "seed", "mc_draws"}.count(
                it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in sweep spec");
    if (!j.contains("base") || !j.contains("axes") || !j.contains("metrics"))
        throw ConfigError("sweep spec needs 'base', 'axes' and 'metrics'");
    SweepSpec s;
    s.base = parse_config(j.at("base"));
    if (!j.at("axes").is_array()) throw ConfigError("'axes' must be an array");
    for (const auto& a : j.at("axes")) {
        if (!a.is_object() || !a.contains("param") || !a.contains("min") || !a.contains("max") ||
            !a.contains("count") || !a.at("param").is_string() || !a.at("min").is_number() ||
            !a.at("max").is_number() || !a.at("count").is_number_integer())
            throw ConfigError("each axis needs string 'param', numbers 'min'/'max', integer 'count'");
        s.axes.push_back({a.at("param").get<std::string>(), a.at("min").get<double>(),
                          a.at("max").get<double>(), a.at("count").get<int>()});
    }
    if (!j.at("metrics").is_array()) throw ConfigError("'metrics' must be an array");
    for (const auto& m : j.at("metrics")) {
        if (!m.is_string()) throw ConfigError("metric names must be strings");
        s.metrics.push_back(m.get<std::string>());
    }
    if (j.contains("t")) {
        if (!j.at("t").is_number()) throw ConfigError("'t' must be a number");
        s.t = j.at("t").get<double>();
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw ConfigError("'seed' must be unsigned");
        s.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("mc_draws")) {
        if (!j.at("mc_draws").is_number_unsigned()) throw ConfigError("'mc_draws' must be unsigned");
        s.mc_draws = j.at("mc_draws").get<std::uint64_t>();
    }
    validate(s);
    return s;
}

void validate(const SweepSpec& s) {
    if (s.axes.empty() || s.axes.size() > 2) throw ConfigError("a sweep needs one or two axes");
    for (const auto& a : s.axes) {
        if (!sweep_params().count(a.param)) throw ConfigError("unknown sweep parameter '" + a.param + "'");
        if (a.count < 2) throw ConfigError("axis '" + a.param + "' needs count >= 2");
        if (!std::isfinite(a.min) || !std::isfinite(a.max))
            throw ConfigError("axis '" + a.param + "' has a non-finite range");
        if ((a.param == "theta" || a.param == "invest_cost") &&
            !std::holds_alternative<Mitigation>(s.base.variant))
            throw ConfigError("axis '" + a.param + "' needs a mitigation base config");
    }
    if (s.axes.size() == 2 && s.axes[0].param == s.axes[1].param)
        throw ConfigError("sweep axes must differ");
    if (s.metrics.empty()) throw ConfigError("a sweep needs at least one metric");
    const auto& known = sweep_metric_names();
    for (const auto& m : s.metrics)
        if (std::find(known.begin(), known.end(), m) == known.end())
            throw ConfigError("unknown metric '" + m + "'");
}

SweepTable run_sweep_table(const SweepSpec& spec, unsigned threads) {
    validate(spec);
    SweepTable table;
    for (const auto& a : spec.axes) table.header.push_back(a.param);
    for (const auto& m : spec.metrics) table.header.push_back(m);
    table.header.push_back("reason");

    const int outer = spec.axes[0].count;
    const int inner = spec.axes.size() == 2 ? spec.axes[1].count : 1;
    const auto n = static_cast<std::size_t>(outer) * static_cast<std::size_t>(inner);
    table.rows.resize(n);
    parallel_for(n, threads, [&](std::size_t idx) {
        const int i = static_cast<int>(idx / inner);
        const int k = static_cast<int>(idx % inner);
        std::vector<double> values{spec.axes[0].value(i)};
        if (spec.axes.size() == 2) values.push_back(spec.axes[1].value(k));

        ProblemConfig config = spec.base;
        double t = spec.t;
        for (std::size_t a = 0; a < values.size(); ++a) apply(spec.axes[a].param, values[a], config, t);

        auto& row = table.rows[idx];
        for (double v : values) row.push_back(format_number(v));
        std::vector<std::string> reasons;
        const auto report = validate(config.params, config.intensity, config.variant);
        if (!report.ok()) {
            for (std::size_t m = 0; m < spec.metrics.size(); ++m) row.push_back("NA");
            for (const auto& v : report.violations) reasons.push_back(v);
        } else {
            Node node(config, t, spec);
            for (const auto& m : spec.metrics) {
                try {
                    row.push_back(node.metric(m));
                } catch (const std::exception& e) {
                    row.push_back("NA");
                    reasons.push_back(m + ": " + e.what());
                }
            }
        }
        std::string reason;
        for (const auto& r : reasons) reason += (reason.empty() ? "" : " | ") + sanitize(r);
        row.push_back(reason);
    });
    return table;
}

void write_csv(std::ostream& out, const SweepTable& table) {
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << '\n';
    };
    line(table.header);
    for (const auto& r : table.rows) line(r);
}

Json to_json(const SweepTable& table) {
    Json rows = Json::array();
    const std::size_t reason_col = table.header.size() - 1;
    for (const auto& r : table.rows) {
        Json row = Json::array();
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i == reason_col) {
                row.push_back(r[i]);
            } else if (r[i] == "NA") {
                row.push_back(nullptr);
            } else {
                row.push_back(std::strtod(r[i].c_str(), nullptr));
            }
        }
        rows.push_back(std::move(row));
    }
    return {{"header", table.header}, {"rows", rows}};
}

void run_sweep(const SweepSpec& spec, std::ostream& out, unsigned threads) {
    write_csv(out, run_sweep_table(spec, threads));
}

std::vector<std::string> write_figure_bundle(const std::string& dir, std::uint64_t seed,
                                             unsigned threads) {
    std::filesystem::create_directories(dir);
    ProblemConfig base;
    base.params.effort_bound = 10.0;

    struct Preset {
        std::string file;
        SweepSpec spec;
    };
    std::vector<Preset> presets;
    auto make = [&](ProblemConfig cfg, std::vector<SweepAxis> axes, std::vector<std::string> metrics,
                    double t = 0.0) {
        SweepSpec s;
        s.base = std::move(cfg);
        s.axes = std::move(axes);
        s.metrics = std::move(metrics);
        s.t = t;
        s.seed = seed;
        return s;
    };
    auto with = [&](ProblemVariant v, double kappa = 1.0, double lambda = 1.0) {
        ProblemConfig c = base;
        c.variant = v;
        c.params.kappa = kappa;
        c.intensity = IntensitySpec::constant(lambda);
        return c;
    };
    const SweepAxis ga{"gamma_a", 0.1, 10.0, 100};
    const SweepAxis gp{"gamma_p", 0.1, 10.0, 100};

    for (double kappa : {1.0, 2.0}) {
        const std::string k = kappa == 1.0 ? "1" : "2";
        presets.push_back({"sign_k0_first_best_kappa" + k + ".csv",
                           make(with(FirstBest{}, kappa), {gp, ga}, {"sign_k0"})});
        presets.push_back({"sign_k0_moral_hazard_kappa" + k + ".csv",
                           make(with(MoralHazard{}, kappa), {gp, ga}, {"sign_k0"})});
    }
    const std::vector<std::string> k0{"k0_fb", "k0_mh"};
    presets.push_back({"k0_vs_gamma_p.csv", make(with(MoralHazard{}), {{"gamma_p", 0.1, 10.0, 100}}, k0)});
    presets.push_back({"k0_vs_gamma_a.csv", make(with(MoralHazard{}), {{"gamma_a", 0.1, 10.0, 100}}, k0)});
    presets.push_back({"k0_vs_lambda.csv", make(with(MoralHazard{}), {{"lambda", 0.1, 5.0, 100}}, k0)});
    presets.push_back({"k0_vs_kappa.csv", make(with(MoralHazard{}), {{"kappa", 0.5, 5.0, 100}}, k0)});
    presets.push_back({"k0_vs_horizon.csv", make(with(MoralHazard{}), {{"horizon", 0.1, 5.0, 100}}, k0)});

    const SweepAxis ga50{"gamma_a", 0.1, 10.0, 50};
    const SweepAxis gp50{"gamma_p", 0.1, 10.0, 50};
    const std::vector<std::string> ev{"expected_risk_share_per_horizon", "expected_risk_share_analytic",
                                      "expected_risk_share_mc"};
    for (double lambda : {0.5, 1.0, 5.0}) {
        const std::string l = format_number(lambda);
        presets.push_back({"expected_value_first_best_lambda" + l + ".csv",
                           make(with(FirstBest{}, 1.0, lambda), {gp50, ga50}, ev)});
        presets.push_back({"expected_value_moral_hazard_lambda" + l + ".csv",
                           make(with(MoralHazard{}, 1.0, lambda), {gp50, ga50}, ev)});
    }
    presets.push_back({"ratio_phi.csv", make(with(MoralHazard{}), {gp50, ga50}, {"ratio_phi"})});

    ProblemConfig mit = with(Mitigation{0.9, 0.1});
    mit.params.gamma_a = 0.5;
    presets.push_back({"mitigation_k_star.csv",
                       make(mit, {{"t", 0.0, 1.0, 101}}, {"k_star_at", "k_star_plain_at"})});
    presets.push_back({"mitigation_t_max_vs_invest_cost.csv",
                       make(mit, {{"invest_cost", 0.01, 0.3, 59}}, {"c_inv", "t_max"})});
    presets.push_back({"mitigation_t_max_vs_theta.csv",
                       make(mit, {{"theta", 0.5, 0.99, 50}}, {"c_inv", "t_max"})});

    std::vector<std::string> files;
    for (const auto& p : presets) {
        std::ofstream out(std::filesystem::path(dir) / p.file, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + p.file);
        run_sweep(p.spec, out, threads);
        files.push_back(p.file);
    }
    return files;
}

} // namespace contract_lab
