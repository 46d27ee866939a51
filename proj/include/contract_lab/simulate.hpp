#pragma once

#include "contract_lab/contract.hpp"
#include "contract_lab/mitigation.hpp"
#include "contract_lab/rng.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace contract_lab {

struct SimConfig {
    std::uint64_t n_paths = 10000;
    int n_steps = 2048;
    std::uint64_t master_seed = 42;
    unsigned threads = 0; ///< 0 = default_thread_count()
    bool keep_paths = false;
    /// Mitigation only: simulate the post-default Holmstrom-Milgrom contract after an
    /// investment instead of booking its value through the continuation factor.
    bool full_post_default = false;
};

/// Throws std::invalid_argument unless n_paths >= 1 and n_steps >= 64.
void validate(const SimConfig& cfg);

/// Wage contract plus the effort the agent actually exerts.
///
/// The wage is a functional of output:
///   dW = z dX + [gA z^2/2 + kappa r^2/2 - z r + (lambda/gA)(e^{-gA k} - 1)] dt,
/// plus k(tau-) at default, where r is the recommended effort. Under effort a the
/// output follows dX = a dt + dB, so a == r reproduces the optimal dynamics.
struct WagePolicy {
    TimeFunction z;
    TimeFunction k;
    TimeFunction effort;
    TimeFunction recommended_effort;
    double y0 = 0.0;

    std::optional<MitigationPolicy> mitigation;
    double post_default_sensitivity = 0.0;
    double post_default_effort = 0.0;
};

WagePolicy optimal_policy(const ContractSolution& sol);
/// use_hm_effort selects theta Z1/kappa (true) or theta Z*/kappa (false) after an investment.
WagePolicy optimal_policy(const MitigationSolution& sol, bool use_hm_effort = true);
WagePolicy with_effort(WagePolicy policy, TimeFunction effort);

/// Default time with P(tau <= t) = 1 - exp(-Lambda_t); empty if tau > horizon.
std::optional<double> sample_default(const IntensitySpec& intensity, double horizon,
                                     RandomStream& stream);

struct Estimate {
    double estimate = 0.0;
    double standard_error = 0.0;
};

struct PathRecord {
    std::uint64_t path_id = 0;
    std::optional<double> tau;
    bool invested = false;
    double x_end = 0.0;
    double w_end = 0.0;
    double b_end = 0.0;
    double agent_cost = 0.0; ///< int kappa a^2/2 over the active period
    double u_p = 0.0;
    double u_a = 0.0;
};

struct SeedRecord {
    std::uint64_t master_seed = 0;
    std::uint64_t n_paths = 0;
    int n_steps = 0;
    std::string scheme;
};

struct SimReport {
    Estimate principal_utility;
    Estimate agent_utility;
    Estimate default_frequency;
    Estimate mean_wage;
    SeedRecord seeds_used;
    std::vector<PathRecord> paths; ///< filled when SimConfig::keep_paths
};

/// Raised when an exponential utility leaves the double range.
class OverflowError : public std::runtime_error {
  public:
    OverflowError(const std::string& what, std::uint64_t master_seed, std::uint64_t path_id)
        : std::runtime_error(what), master_seed_(master_seed), path_id_(path_id) {}
    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t path_id() const { return path_id_; }

  private:
    std::uint64_t master_seed_;
    std::uint64_t path_id_;
};

SimReport simulate_paths(const ModelParams& params, const IntensitySpec& intensity,
                         const WagePolicy& policy, const SimConfig& cfg);

/// Full time series of one path (same stream as simulate_paths uses for path_id).
struct PathTrace {
    std::vector<double> t;
    std::vector<double> x;
    std::vector<double> w;
    std::vector<double> b;
    PathRecord record;
};

PathTrace trace_path(const ModelParams& params, const IntensitySpec& intensity,
                     const WagePolicy& policy, const SimConfig& cfg, std::uint64_t path_id);

/// Wage from the linear-in-default-time representation
///   W = y0 + Z B + (gA Z^2/2 + kappa a*^2/2) s + K0 + slope s,   s = T ^ tau.
double wage_closed_form(const ContractSolution& sol, double b_end, std::optional<double> tau);

/// |W_simulated - W_closed_form| for a path traced under the optimal policy.
double wage_closed_form_check(const ContractSolution& sol, const PathRecord& path);

/// CSV: path_id,tau,X_end,W_end,agent_cost_integral,U_P_realized,U_A_realized
void write_paths_csv(std::ostream& out, const std::vector<PathRecord>& paths);

} // namespace contract_lab
