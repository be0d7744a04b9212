#ifndef IDENTMINER_CORE_HPP
#define IDENTMINER_CORE_HPP

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

/**
 * @file core.hpp
 * @brief Shared vocabulary types: class labels, timestamps, seeded randomness and hashing.
 */

namespace identminer {

/**
 * The four mutually exclusive demographic classes.
 * The enumerator order is the fixed tie-break order used throughout (W, B, HL, A).
 */
enum class ClassLabel : std::uint8_t {
    White = 0,
    Black = 1,
    HispanicLatinx = 2,
    Asian = 3
};

inline constexpr std::size_t num_classes = 4;

inline constexpr std::array<ClassLabel, num_classes> all_classes{
    ClassLabel::White, ClassLabel::Black, ClassLabel::HispanicLatinx, ClassLabel::Asian
};

constexpr std::size_t class_index(ClassLabel label) {
    return static_cast<std::size_t>(label);
}

constexpr ClassLabel class_from_index(std::size_t i) {
    return all_classes.at(i);
}

inline std::string_view to_string(ClassLabel label) {
    switch (label) {
        case ClassLabel::White: return "White";
        case ClassLabel::Black: return "Black";
        case ClassLabel::HispanicLatinx: return "HispanicLatinx";
        case ClassLabel::Asian: return "Asian";
    }
    return "?";
}

inline std::string_view short_name(ClassLabel label) {
    switch (label) {
        case ClassLabel::White: return "W";
        case ClassLabel::Black: return "B";
        case ClassLabel::HispanicLatinx: return "H/L";
        case ClassLabel::Asian: return "A";
    }
    return "?";
}

/**
 * Accepts the long names used in dataset files as well as the short column names (W, B, HL, H/L, A).
 */
inline std::optional<ClassLabel> parse_class_label(std::string_view text) {
    if (text == "White" || text == "W") {
        return ClassLabel::White;
    }
    if (text == "Black" || text == "B") {
        return ClassLabel::Black;
    }
    if (text == "HispanicLatinx" || text == "HL" || text == "H/L") {
        return ClassLabel::HispanicLatinx;
    }
    if (text == "Asian" || text == "A") {
        return ClassLabel::Asian;
    }
    return std::nullopt;
}

using Timestamp = std::chrono::sys_seconds;

namespace internal {

inline bool read_digits(std::string_view s, std::size_t pos, std::size_t count, int& out) {
    if (pos + count > s.size()) {
        return false;
    }
    int value = 0;
    for (std::size_t i = 0; i < count; ++i) {
        char c = s[pos + i];
        if (c < '0' || c > '9') {
            return false;
        }
        value = value * 10 + (c - '0');
    }
    out = value;
    return true;
}

}

/**
 * Parse an RFC-3339 timestamp such as `2019-07-01T12:30:00Z` or `2019-07-01T12:30:00.250-05:00`.
 * Fractional seconds are truncated. Returns `std::nullopt` for anything that does not name a valid instant.
 */
inline std::optional<Timestamp> parse_rfc3339(std::string_view s) {
    int year, mon, mday, hour, min, sec;
    if (!internal::read_digits(s, 0, 4, year) || s.size() < 20 || s[4] != '-' ||
        !internal::read_digits(s, 5, 2, mon) || s[7] != '-' ||
        !internal::read_digits(s, 8, 2, mday)) {
        return std::nullopt;
    }
    char sep = s[10];
    if (sep != 'T' && sep != 't' && sep != ' ') {
        return std::nullopt;
    }
    if (!internal::read_digits(s, 11, 2, hour) || s[13] != ':' ||
        !internal::read_digits(s, 14, 2, min) || s[16] != ':' ||
        !internal::read_digits(s, 17, 2, sec)) {
        return std::nullopt;
    }

    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        std::size_t start = pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
            ++pos;
        }
        if (pos == start) {
            return std::nullopt;
        }
    }
    if (pos >= s.size()) {
        return std::nullopt;
    }

    int offset_minutes = 0;
    if (s[pos] == 'Z' || s[pos] == 'z') {
        ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
        int sign = (s[pos] == '+') ? 1 : -1;
        int oh, om;
        if (!internal::read_digits(s, pos + 1, 2, oh) || pos + 3 >= s.size() || s[pos + 3] != ':' ||
            !internal::read_digits(s, pos + 4, 2, om) || oh > 23 || om > 59) {
            return std::nullopt;
        }
        offset_minutes = sign * (oh * 60 + om);
        pos += 6;
    } else {
        return std::nullopt;
    }
    if (pos != s.size()) {
        return std::nullopt;
    }

    // Leap seconds (sec == 60) are folded into the following second.
    if (hour > 23 || min > 59 || sec > 60) {
        return std::nullopt;
    }
    std::chrono::year_month_day ymd{
        std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(mon)}, std::chrono::day{static_cast<unsigned>(mday)}
    };
    if (!ymd.ok()) {
        return std::nullopt;
    }

    auto days = std::chrono::sys_days{ymd};
    auto t = std::chrono::time_point_cast<std::chrono::seconds>(days) +
        std::chrono::hours{hour} + std::chrono::minutes{min} + std::chrono::seconds{sec} -
        std::chrono::minutes{offset_minutes};
    return t;
}

inline std::string format_rfc3339(Timestamp t) {
    auto days = std::chrono::floor<std::chrono::days>(t);
    std::chrono::year_month_day ymd{days};
    std::chrono::hh_mm_ss hms{t - days};
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%04d-%02u-%02uT%02d:%02d:%02dZ",
        static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
        static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()), static_cast<int>(hms.seconds().count()));
    return buffer;
}

/**
 * 64-bit FNV-1a. Used for config hashes and seed derivation, both of which must be stable across platforms.
 */
inline std::uint64_t fnv1a(std::string_view data, std::uint64_t hash = 14695981039346656037ull) {
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

inline std::string hex64(std::uint64_t value) {
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(value));
    return buffer;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/**
 * Derive an independent seed for a named pipeline stage from the root seed.
 */
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view stage) {
    return splitmix64(root ^ fnv1a(stage));
}

/**
 * Seeded generator with platform-independent derived distributions.
 * `std::uniform_int_distribution` and friends are implementation-defined, so they are avoided here.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : my_engine(seed) {}

    std::uint64_t next() {
        return my_engine();
    }

    /** Uniform integer in `[0, n)`, by rejection sampling. */
    std::size_t uniform_index(std::size_t n) {
        if (n <= 1) {
            return 0;
        }
        const std::uint64_t bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % bound);
        std::uint64_t draw;
        do {
            draw = my_engine();
        } while (draw >= limit);
        return static_cast<std::size_t>(draw % bound);
    }

    /** Uniform double in `[0, 1)` with 53 random bits. */
    double uniform01() {
        return static_cast<double>(my_engine() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /** Standard normal via Box-Muller; one draw is discarded to keep the state sequence simple. */
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) {
            u1 = uniform01();
        }
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    std::mt19937_64 my_engine;
};

/** Fisher-Yates shuffle driven by `Rng`. */
template<typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        std::size_t j = rng.uniform_index(i);
        std::swap(values[i - 1], values[j]);
    }
}

/** Shortest decimal text that parses back to exactly `value`. */
inline std::string format_double(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view text) {
    double value = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return value;
}

/** Thrown on malformed input data (files, records) as opposed to programming or usage errors. */
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}

#endif
