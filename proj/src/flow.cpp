#include "flowstitch/flow.hpp"

#include <utility>

#include "flowstitch/util.hpp"

namespace flowstitch {

const char* const kUniflowHeader =
    "StartTime,EndTime,SrcIP,DstIP,Protocol,SrcPort,DstPort,Packets,Bytes";
const char* const kBiflowHeader =
    "Time,Duration,SrcDevice,DstDevice,Protocol,SrcPort,DstPort,SrcPackets,DstPackets,SrcBytes,"
    "DstBytes";

namespace {

int parse_protocol(std::string_view text, std::size_t line_no) {
    std::int64_t v = parse_i64(text, "Protocol", line_no);
    if (v < 0 || v > 255) {
        throw ParseError(line_no, "Protocol",
                         "value " + std::string(text) + " out of range 0..255");
    }
    return static_cast<int>(v);
}

std::uint16_t parse_port(std::string_view text, std::string_view field, std::size_t line_no) {
    std::int64_t v = parse_i64(text, field, line_no);
    if (v < 0 || v > 65535) {
        throw ParseError(line_no, field, "value " + std::string(text) + " out of range 0..65535");
    }
    return static_cast<std::uint16_t>(v);
}

void check_text_field(const std::string& value, std::string_view field) {
    if (value.find(',') != std::string::npos || value.find('\n') != std::string::npos) {
        throw std::invalid_argument(std::string(field) + " contains a delimiter: '" + value + "'");
    }
}

}  // namespace

UniflowRecord parse_uniflow(std::string_view line, std::size_t line_no) {
    auto fields = split_fields(line);
    if (fields.size() != 9) {
        throw ParseError(line_no, "",
                         "expected 9 fields, got " + std::to_string(fields.size()));
    }
    UniflowRecord r;
    r.start_time = parse_i64(fields[0], "StartTime", line_no, /*drop_fraction=*/true);
    r.end_time = parse_i64(fields[1], "EndTime", line_no, /*drop_fraction=*/true);
    r.src_ip = std::string(fields[2]);
    r.dst_ip = std::string(fields[3]);
    r.protocol = parse_protocol(fields[4], line_no);
    r.src_port = parse_port(fields[5], "SrcPort", line_no);
    r.dst_port = parse_port(fields[6], "DstPort", line_no);
    r.packets = parse_u64(fields[7], "Packets", line_no);
    r.bytes = parse_u64(fields[8], "Bytes", line_no);
    if (r.start_time > r.end_time) {
        throw ParseError(line_no, "StartTime", "start after end (" +
                                                   std::to_string(r.start_time) + " > " +
                                                   std::to_string(r.end_time) + ")");
    }
    if (r.src_ip.empty()) throw ParseError(line_no, "SrcIP", "empty value");
    if (r.dst_ip.empty()) throw ParseError(line_no, "DstIP", "empty value");
    return r;
}

std::string serialize_uniflow(const UniflowRecord& r) {
    check_text_field(r.src_ip, "SrcIP");
    check_text_field(r.dst_ip, "DstIP");
    std::string out;
    out.reserve(64);
    out += std::to_string(r.start_time);
    out += ',';
    out += std::to_string(r.end_time);
    out += ',';
    out += r.src_ip;
    out += ',';
    out += r.dst_ip;
    out += ',';
    out += std::to_string(r.protocol);
    out += ',';
    out += std::to_string(r.src_port);
    out += ',';
    out += std::to_string(r.dst_port);
    out += ',';
    out += std::to_string(r.packets);
    out += ',';
    out += std::to_string(r.bytes);
    return out;
}

BiflowRecord parse_biflow(std::string_view line, std::size_t line_no) {
    auto fields = split_fields(line);
    if (fields.size() != 11) {
        throw ParseError(line_no, "",
                         "expected 11 fields, got " + std::to_string(fields.size()));
    }
    BiflowRecord r;
    r.time = parse_i64(fields[0], "Time", line_no, /*drop_fraction=*/true);
    r.duration = parse_i64(fields[1], "Duration", line_no, /*drop_fraction=*/true);
    if (r.duration < 0) {
        throw ParseError(line_no, "Duration", "negative duration");
    }
    r.src_device = std::string(fields[2]);
    r.dst_device = std::string(fields[3]);
    r.protocol = parse_protocol(fields[4], line_no);
    r.src_port = std::string(fields[5]);
    r.dst_port = std::string(fields[6]);
    r.src_packets = parse_u64(fields[7], "SrcPackets", line_no);
    r.dst_packets = parse_u64(fields[8], "DstPackets", line_no);
    r.src_bytes = parse_u64(fields[9], "SrcBytes", line_no);
    r.dst_bytes = parse_u64(fields[10], "DstBytes", line_no);
    if (r.src_device.empty()) throw ParseError(line_no, "SrcDevice", "empty value");
    if (r.dst_device.empty()) throw ParseError(line_no, "DstDevice", "empty value");
    if (r.src_port.empty()) throw ParseError(line_no, "SrcPort", "empty value");
    if (r.dst_port.empty()) throw ParseError(line_no, "DstPort", "empty value");
    return r;
}

std::string serialize_biflow(const BiflowRecord& r) {
    check_text_field(r.src_device, "SrcDevice");
    check_text_field(r.dst_device, "DstDevice");
    check_text_field(r.src_port, "SrcPort");
    check_text_field(r.dst_port, "DstPort");
    std::string out;
    out.reserve(96);
    out += std::to_string(r.time);
    out += ',';
    out += std::to_string(r.duration);
    out += ',';
    out += r.src_device;
    out += ',';
    out += r.dst_device;
    out += ',';
    out += std::to_string(r.protocol);
    out += ',';
    out += r.src_port;
    out += ',';
    out += r.dst_port;
    out += ',';
    out += std::to_string(r.src_packets);
    out += ',';
    out += std::to_string(r.dst_packets);
    out += ',';
    out += std::to_string(r.src_bytes);
    out += ',';
    out += std::to_string(r.dst_bytes);
    return out;
}

BiflowRecord mirror(const BiflowRecord& r) {
    BiflowRecord m = r;
    std::swap(m.src_device, m.dst_device);
    std::swap(m.src_port, m.dst_port);
    std::swap(m.src_packets, m.dst_packets);
    std::swap(m.src_bytes, m.dst_bytes);
    return m;
}

}  // namespace flowstitch
