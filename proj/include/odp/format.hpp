#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace odp {

/// Shortest decimal text that parses back to exactly the same double.
inline std::string exact_number(double x) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, end);
}

}  // namespace odp
