#pragma once

#include "contract_lab/contract.hpp"
#include "contract_lab/mitigation.hpp"
#include "contract_lab/simulate.hpp"
#include "contract_lab/verify.hpp"

#include "json.hpp"

#include <ostream>
#include <stdexcept>
#include <string>

namespace contract_lab {

using Json = nlohmann::json;

/// Malformed or ill-typed configuration input.
class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProblemConfig {
    ModelParams params;
    IntensitySpec intensity = IntensitySpec::constant(1.0);
    ProblemVariant variant = MoralHazard{};
};

/// Missing numeric fields keep their ModelParams defaults; intensity and variant are
/// required. Unknown keys are rejected.
ProblemConfig parse_config(const Json& j);
ProblemConfig load_config(const std::string& path);
Json to_json(const ProblemConfig& config);

/// Parses a whole file as JSON, raising ConfigError with the parser diagnostic.
Json read_json_file(const std::string& path);

/// {variant, y0, z_star, a_star, c1, c2, phi0_0, k_star_0, k_star_grid, phi0_grid}; c1 and
/// c2 are reported at t = 0 when they depend on time.
Json solution_json(const ContractSolution& sol, int grid_points = 101);
/// Adds {c_inv, t_max, theta, invest_cost, k_star_mitigation_grid, post-default fields}.
Json solution_json(const MitigationSolution& sol, int grid_points = 101);

/// CSV t,phi0,k_star on grid_points evenly spaced times.
void write_solution_csv(std::ostream& out, const ContractSolution& sol, int grid_points = 101);

Json to_json(const SimReport& report);
Json to_json(const VerificationReport& report);

/// Pretty JSON with a trailing newline.
std::string dump(const Json& j);

} // namespace contract_lab
