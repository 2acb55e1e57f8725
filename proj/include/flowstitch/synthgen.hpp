#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "flowstitch/flow.hpp"
#include "flowstitch/fqdn_map.hpp"

namespace flowstitch {

/// Deterministic, seeded scenario generator. All randomness flows from one
/// master seed through named substreams (splitmix64 of seed ^ hash(tag)), so
/// the network and host streams are independently reproducible.
struct GenConfig {
    std::uint64_t seed = 1;
    int sessions = 1000;
    int devices = 60;
    int users = 25;

    double duplication = 0.0;    // probability a session's records export twice
    double reverse_drop = 0.0;   // probability the reverse direction is never exported
    double long_flow_prob = 0.0; // probability of a multi-hour session
    std::int64_t long_flow_secs = 4 * 3600;
    std::int64_t jitter = 0;     // collector arrival-order jitter bound, seconds
    double w_tcp = 0.70;
    double w_udp = 0.25;
    double w_icmp = 0.05;
    double scan_prob = 0.0;      // probability a session slot becomes a scan burst
    int scan_targets = 20;

    std::int64_t start_time = 0;
    int window_days = 90;

    double unresolved_fraction = 0.1;  // devices with no address mapping
    double multi_name_fraction = 0.1;  // addresses with an extra ephemeral name
    double nonwindows_fraction = 0.2;  // devices that never produce host logs

    int host_chains = 0;    // authentication scenarios
    int process_pairs = 0;  // 4688/4689 pairs
    int renewal_hosts = 0;  // machines emitting periodic credential renewals
    double renewal_period_hours = 10.0;
    double decorated_fraction = 0.0;     // usernames carrying DOMAIN\ or @domain
    double variant_name_fraction = 0.0;  // records using collector-variant attribute names
    double junk_attr_fraction = 0.0;     // records carrying out-of-matrix extras

    static GenConfig from_json(std::istream& in);
};

/// What one emitted session must aggregate back to. Totals describe the
/// exported uniflows (duplicates included, dropped reverse excluded).
struct GroundTruthSession {
    std::string initiator;  // client address
    std::string responder;  // server address
    FiveTuple tuple;        // client->server orientation
    std::uint64_t fwd_packets = 0;
    std::uint64_t fwd_bytes = 0;
    std::uint64_t rev_packets = 0;
    std::uint64_t rev_bytes = 0;
    std::int64_t start = 0;
    std::int64_t end = 0;
    int dup_factor = 1;
    bool reverse_dropped = false;
};

/// Expected parent resolution for one generated child process start.
struct HostTruth {
    std::string log_host;
    std::int64_t child_pid = 0;
    std::int64_t child_time = 0;
    std::string parent_name;  // with extension
};

struct NetworkData {
    std::vector<UniflowRecord> uniflows;  // collector arrival order
    std::vector<GroundTruthSession> truth;
    std::vector<MappingInterval> mappings;
};

struct HostData {
    std::vector<std::string> raw_json;  // WLS-style records, one per line
    std::vector<HostTruth> parent_truth;
};

NetworkData generate_network(const GenConfig& config);
HostData generate_host_events(const GenConfig& config);

std::string ground_truth_json(const NetworkData& network, const HostData& host);

}  // namespace flowstitch
