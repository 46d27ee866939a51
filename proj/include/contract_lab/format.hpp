#pragma once

#include <string>

namespace contract_lab {

/// Fixed "%.9g" rendering with '.' as decimal separator; NaN prints as "NA".
std::string format_number(double value);

} // namespace contract_lab
