#include "flowstitch/fqdn_map.hpp"

#include <istream>

#include "flowstitch/util.hpp"

namespace flowstitch {

void TemporalIpMap::add(MappingInterval interval) {
    by_ip_[interval.ip].push_back(std::move(interval));
    ++intervals_;
}

std::optional<std::string> TemporalIpMap::resolve(const std::string& ip, std::int64_t t) const {
    auto it = by_ip_.find(ip);
    if (it == by_ip_.end()) return std::nullopt;
    const MappingInterval* best = nullptr;
    for (const MappingInterval& m : it->second) {
        if (t < m.valid_from || t > m.valid_to) continue;
        if (best == nullptr) {
            best = &m;
            continue;
        }
        if (m.rank != best->rank) {
            if (m.rank < best->rank) best = &m;
            continue;
        }
        std::int64_t len = m.valid_to - m.valid_from;
        std::int64_t best_len = best->valid_to - best->valid_from;
        if (len != best_len) {
            if (len > best_len) best = &m;
            continue;
        }
        if (m.fqdn < best->fqdn) best = &m;
    }
    if (best == nullptr) return std::nullopt;
    return best->fqdn;
}

TemporalIpMap load_mappings(std::istream& in) {
    TemporalIpMap map;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() != 5) {
            throw ParseError(line_no, "",
                             "expected 5 fields, got " + std::to_string(fields.size()));
        }
        MappingInterval m;
        m.ip = std::string(fields[0]);
        m.fqdn = std::string(fields[1]);
        m.valid_from = parse_i64(fields[2], "ValidFrom", line_no);
        m.valid_to = parse_i64(fields[3], "ValidTo", line_no);
        std::int64_t rank = parse_i64(fields[4], "Rank", line_no);
        if (m.ip.empty()) throw ParseError(line_no, "IP", "empty value");
        if (m.fqdn.empty()) throw ParseError(line_no, "FQDN", "empty value");
        if (m.valid_from > m.valid_to) {
            throw ParseError(line_no, "ValidFrom", "interval start after end");
        }
        if (rank < 0) throw ParseError(line_no, "Rank", "negative rank");
        m.rank = static_cast<int>(rank);
        map.add(std::move(m));
    }
    return map;
}

BiflowRecord apply_to_biflow(BiflowRecord biflow, const TemporalIpMap& map) {
    if (auto name = map.resolve(biflow.src_device, biflow.time)) {
        biflow.src_device = std::move(*name);
    }
    if (auto name = map.resolve(biflow.dst_device, biflow.time)) {
        biflow.dst_device = std::move(*name);
    }
    return biflow;
}

}  // namespace flowstitch
