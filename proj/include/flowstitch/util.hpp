#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace flowstitch {

/// Input error carrying the 1-based line number and the field that failed.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line_no, std::string_view field, std::string_view reason)
        : std::runtime_error(build_message(line_no, field, reason)), line_no_(line_no) {}

    std::size_t line_no() const noexcept { return line_no_; }

private:
    static std::string build_message(std::size_t line_no, std::string_view field,
                                     std::string_view reason) {
        std::string msg;
        if (line_no > 0) {
            msg += "line " + std::to_string(line_no) + ": ";
        }
        if (!field.empty()) {
            msg += std::string(field) + ": ";
        }
        msg += std::string(reason);
        return msg;
    }

    std::size_t line_no_;
};

/// Splits on a delimiter without copying. "a,,b" yields {"a","","b"}.
inline std::vector<std::string_view> split_fields(std::string_view line, char delim = ',') {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    for (;;) {
        std::size_t next = line.find(delim, pos);
        if (next == std::string_view::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
}

namespace detail {

template <typename T>
T parse_number(std::string_view text, std::string_view field, std::size_t line_no,
               bool drop_fraction) {
    T value{};
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec == std::errc::result_out_of_range) {
        throw ParseError(line_no, field, "value out of range: '" + std::string(text) + "'");
    }
    if (ec != std::errc() || ptr == begin) {
        throw ParseError(line_no, field, "not a number: '" + std::string(text) + "'");
    }
    if (ptr != end) {
        // Timestamps may carry a fractional part; sub-second precision is dropped.
        if (drop_fraction && *ptr == '.') {
            for (++ptr; ptr != end; ++ptr) {
                if (*ptr < '0' || *ptr > '9') {
                    throw ParseError(line_no, field, "not a number: '" + std::string(text) + "'");
                }
            }
            return value;
        }
        throw ParseError(line_no, field, "trailing characters in '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace detail

inline std::int64_t parse_i64(std::string_view text, std::string_view field,
                              std::size_t line_no = 0, bool drop_fraction = false) {
    return detail::parse_number<std::int64_t>(text, field, line_no, drop_fraction);
}

inline std::uint64_t parse_u64(std::string_view text, std::string_view field,
                               std::size_t line_no = 0) {
    return detail::parse_number<std::uint64_t>(text, field, line_no, false);
}

/// Strict dotted-quad IPv4 check (no leading/trailing garbage).
inline bool is_ipv4_literal(std::string_view text) {
    int octets = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t dot = text.find('.', pos);
        std::string_view part =
            text.substr(pos, dot == std::string_view::npos ? dot : dot - pos);
        if (part.empty() || part.size() > 3) return false;
        int value = 0;
        for (char c : part) {
            if (c < '0' || c > '9') return false;
            value = value * 10 + (c - '0');
        }
        if (value > 255) return false;
        ++octets;
        if (dot == std::string_view::npos) break;
        pos = dot + 1;
        if (pos > text.size()) return false;
    }
    return octets == 4;
}

/// True for values that still look like raw addresses rather than names.
inline bool is_ip_literal(std::string_view text) {
    if (text.find(':') != std::string_view::npos) return true;  // IPv6-ish
    return is_ipv4_literal(text);
}

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// UTC day index of an epoch-seconds timestamp (floor division, negative-safe).
inline std::int64_t epoch_day(std::int64_t t) {
    std::int64_t d = t / 86400;
    if (t % 86400 < 0) --d;
    return d;
}

inline std::string zero_pad(std::uint64_t value, int width) {
    std::string digits = std::to_string(value);
    if (static_cast<int>(digits.size()) < width) {
        digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
    }
    return digits;
}

}  // namespace flowstitch
