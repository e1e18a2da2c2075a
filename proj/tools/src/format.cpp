#include "conformal/cli/format.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace conformal::cli {

std::string format_double(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (std::isnan(value)) return "nan";
    char buffer[64];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    if (ec != std::errc{}) return "nan";
    return {buffer, end};
}

}  // namespace conformal::cli
