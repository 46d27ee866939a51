#pragma once

#include "contract_lab/io.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace contract_lab {

struct SweepAxis {
    std::string param; ///< a ModelParams field, "lambda", "theta", "invest_cost" or "t"
    double min = 0.0;
    double max = 1.0;
    int count = 2;

    double value(int i) const;
};

/// Metric names accepted by a sweep, in documentation order.
const std::vector<std::string>& sweep_metric_names();

struct SweepSpec {
    ProblemConfig base;
    std::vector<SweepAxis> axes; ///< one or two; the first axis is the outer loop
    std::vector<std::string> metrics;
    double t = 0.0;                   ///< evaluation time for k_star_at / k_star_plain_at
    std::uint64_t seed = 42;          ///< Monte-Carlo metrics
    std::uint64_t mc_draws = 10000;
};

/// {"base": config, "axes": [{param,min,max,count}], "metrics": [...], "t", "seed", "mc_draws"}
SweepSpec parse_sweep(const Json& j);
/// Throws ConfigError for unknown parameters or metrics, count < 2, or 0 / >2 axes.
void validate(const SweepSpec& spec);

struct SweepTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows; ///< formatted cells, "NA" on failure
};

/// One row per node in grid order: axis values, metrics, reason. Failing metrics print NA
/// and append their reason. Nodes are evaluated in parallel; row order is fixed.
SweepTable run_sweep_table(const SweepSpec& spec, unsigned threads = 0);
void write_csv(std::ostream& out, const SweepTable& table);
/// {"header": [...], "rows": [[...]]}; numeric cells become numbers, NA becomes null.
Json to_json(const SweepTable& table);

void run_sweep(const SweepSpec& spec, std::ostream& out, unsigned threads = 0);

/// Writes the preset figure-data bundle into dir (created if needed); returns file names.
std::vector<std::string> write_figure_bundle(const std::string& dir, std::uint64_t seed,
                                             unsigned threads = 0);

} // namespace contract_lab
