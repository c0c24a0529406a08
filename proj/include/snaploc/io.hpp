#pragma once

#include <string>

namespace snaploc {

/// Full-precision scientific notation used by every CSV writer.
std::string format_number(double value);

}  // namespace snaploc
