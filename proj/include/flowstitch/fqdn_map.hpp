#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "flowstitch/flow.hpp"

namespace flowstitch {

/// One row of the address-to-name mapping: the name is valid for this address
/// over [valid_from, valid_to], both ends inclusive. Lower rank means less
/// ephemeral (e.g. static DNS rows rank 0, DHCP leases rank 1).
struct MappingInterval {
    std::string ip;
    std::string fqdn;
    std::int64_t valid_from = 0;
    std::int64_t valid_to = 0;
    int rank = 0;
};

/// Point-in-time address resolution with least-ephemeral preference.
/// Immutable after loading; concurrent lookups need no coordination.
class TemporalIpMap {
public:
    void add(MappingInterval interval);

    /// Among intervals containing t: lowest rank wins, ties go to the longest
    /// interval, then to the lexicographically smallest name.
    std::optional<std::string> resolve(const std::string& ip, std::int64_t t) const;

    std::size_t ip_count() const { return by_ip_.size(); }
    std::size_t interval_count() const { return intervals_; }

private:
    std::unordered_map<std::string, std::vector<MappingInterval>> by_ip_;
    std::size_t intervals_ = 0;
};

/// Loads mapping CSV rows: ip,fqdn,valid_from,valid_to,rank.
/// Malformed rows (from > to, bad numbers) raise ParseError with the line.
TemporalIpMap load_mappings(std::istream& in);

/// Replaces each device field with its resolved name at the biflow start
/// time; unresolved addresses are left as-is. No other field changes.
BiflowRecord apply_to_biflow(BiflowRecord biflow, const TemporalIpMap& map);

}  // namespace flowstitch
