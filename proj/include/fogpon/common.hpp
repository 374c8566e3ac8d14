#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fogpon {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Raised for malformed configuration, bad CLI input, or violated
/// preconditions on user-supplied data. The CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a numeric operation leaves its domain (e.g. an M/M/1 queue
/// evaluated at or beyond saturation).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Shortest round-trip decimal rendering of a double. Parsing the result
/// with parse_double() recovers the exact same bit pattern.
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError("not a number: '" + std::string(s) + "'");
    }
    return v;
}

/// FNV-1a 64-bit running hash; used for platform-stable model fingerprints.
struct Fnv1a {
    std::uint64_t state = 0xcbf29ce484222325ull;

    void feed(std::string_view s) {
        for (unsigned char c : s) {
            state ^= c;
            state *= 0x100000001b3ull;
        }
    }
    void feed(double v) { feed(format_double(v)); }
    void feed(std::int64_t v) { feed(std::to_string(v)); }

    std::string hex() const {
        char buf[17];
        auto res = std::to_chars(buf, buf + sizeof(buf), state, 16);
        std::string s(buf, res.ptr);
        return std::string(16 - s.size(), '0') + s;
    }
};

} // namespace fogpon
