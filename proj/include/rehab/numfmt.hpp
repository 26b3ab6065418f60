#pragma once

#include <charconv>
#include <string>

namespace rehab {

// Shortest round-trip decimal form, locale-independent. Shared by the rule
// formatter and the CSV writer so serialized numbers are byte-stable.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace rehab
