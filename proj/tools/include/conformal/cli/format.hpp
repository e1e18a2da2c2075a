#pragma once

#include <string>

namespace conformal::cli {

/// Shortest decimal form that parses back to the same double; infinities
/// are "inf" / "-inf".
std::string format_double(double value);

}  // namespace conformal::cli
