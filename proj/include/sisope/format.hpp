#pragma once

#include <charconv>
#include <string>
#include <vector>

namespace sisope {

/// Shortest decimal string that round-trips the exact double (std::to_chars).
/// Used for CSV/JSONL output so equal values always serialize to equal bytes.
inline std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec; // 32 chars always suffice for shortest round-trip form
    return std::string(buf, ptr);
}

/// Joins integers with a separator: {2, 4} with ';' gives "2;4".
inline std::string join_ints(const std::vector<int>& values, char sep) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out.push_back(sep);
        out += std::to_string(values[i]);
    }
    return out;
}

}  // namespace sisope
