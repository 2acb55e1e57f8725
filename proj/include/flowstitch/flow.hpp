#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <tuple>

namespace flowstitch {

/// One uni-directional flow record: the nine collector fields, in CSV order
/// StartTime,EndTime,SrcIP,DstIP,Protocol,SrcPort,DstPort,Packets,Bytes.
struct UniflowRecord {
    std::int64_t start_time = 0;  // epoch seconds
    std::int64_t end_time = 0;    // epoch seconds, >= start_time
    std::string src_ip;
    std::string dst_ip;
    int protocol = 0;  // 0..255; ports are meaningful for 6 and 17 only
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint64_t packets = 0;
    std::uint64_t bytes = 0;

    bool operator==(const UniflowRecord&) const = default;
};

/// Directed, aggregated flow. Devices and ports are identifier text so one
/// record type covers raw addresses, resolved names and pseudonyms.
struct BiflowRecord {
    std::int64_t time = 0;      // epoch seconds, segment start
    std::int64_t duration = 0;  // seconds, >= 0
    std::string src_device;
    std::string dst_device;
    int protocol = 0;
    std::string src_port;
    std::string dst_port;
    std::uint64_t src_packets = 0;
    std::uint64_t dst_packets = 0;
    std::uint64_t src_bytes = 0;
    std::uint64_t dst_bytes = 0;

    bool operator==(const BiflowRecord&) const = default;

    friend bool operator<(const BiflowRecord& a, const BiflowRecord& b) {
        return std::tie(a.time, a.duration, a.src_device, a.dst_device, a.protocol, a.src_port,
                        a.dst_port, a.src_packets, a.dst_packets, a.src_bytes, a.dst_bytes) <
               std::tie(b.time, b.duration, b.src_device, b.dst_device, b.protocol, b.src_port,
                        b.dst_port, b.src_packets, b.dst_packets, b.src_bytes, b.dst_bytes);
    }
};

/// Session lookup key; equality is exact field equality on post-orientation values.
struct FiveTuple {
    std::string src_ip;
    std::string dst_ip;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    int protocol = 0;

    bool operator==(const FiveTuple&) const = default;

    friend bool operator<(const FiveTuple& a, const FiveTuple& b) {
        return std::tie(a.src_ip, a.dst_ip, a.src_port, a.dst_port, a.protocol) <
               std::tie(b.src_ip, b.dst_ip, b.src_port, b.dst_port, b.protocol);
    }

    FiveTuple mirrored() const { return {dst_ip, src_ip, dst_port, src_port, protocol}; }

    static FiveTuple of(const UniflowRecord& f) {
        return {f.src_ip, f.dst_ip, f.src_port, f.dst_port, f.protocol};
    }
};

struct FiveTupleHash {
    std::size_t operator()(const FiveTuple& t) const {
        std::size_t h = std::hash<std::string>{}(t.src_ip);
        h = h * 1099511628211ULL ^ std::hash<std::string>{}(t.dst_ip);
        h = h * 1099511628211ULL ^
            (static_cast<std::size_t>(t.src_port) << 17 | static_cast<std::size_t>(t.dst_port));
        return h * 1099511628211ULL ^ static_cast<std::size_t>(t.protocol);
    }
};

extern const char* const kUniflowHeader;
extern const char* const kBiflowHeader;

/// Parses one 9-field uniflow CSV line. Throws ParseError naming the offending
/// field and the given line number. Fractional seconds in the time fields are
/// accepted and truncated.
UniflowRecord parse_uniflow(std::string_view line, std::size_t line_no = 0);
std::string serialize_uniflow(const UniflowRecord& record);

/// Parses one 11-field biflow CSV line (output table order).
BiflowRecord parse_biflow(std::string_view line, std::size_t line_no = 0);
std::string serialize_biflow(const BiflowRecord& record);

/// Swaps every Src*/Dst* field, reversing the record's direction.
BiflowRecord mirror(const BiflowRecord& record);

}  // namespace flowstitch
