#include "contract_lab/format.hpp"

#include <cmath>
#include <cstdio>

namespace contract_lab {

std::string format_number(double value) {
    if (std::isnan(value)) return "NA";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (value == 0.0) return "0"; // folds -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

} // namespace contract_lab
