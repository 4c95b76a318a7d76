#pragma once

#include <string>

namespace eot {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace eot
