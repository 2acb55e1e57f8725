#pragma once

#include <cstdint>
#include <iosfwd>
#include <queue>
#include <unordered_map>
#include <vector>

#include "flowstitch/flow.hpp"

namespace flowstitch {

/// The top-K ports by observed frequency. Ranks are by descending count with
/// ascending-port tie-break; heuristic 2 only consults membership.
class PortFrequencyTable {
public:
    PortFrequencyTable() = default;
    explicit PortFrequencyTable(std::vector<std::uint16_t> ranked);

    bool contains(std::uint16_t port) const { return member_[port]; }
    const std::vector<std::uint16_t>& ranked() const { return ranked_; }
    bool empty() const { return ranked_.empty(); }

    /// File format: one port per line, rank order.
    static PortFrequencyTable load(std::istream& in);
    void save(std::ostream& out) const;

private:
    std::vector<std::uint16_t> ranked_;
    std::vector<bool> member_ = std::vector<bool>(65536, false);
};

/// Streaming frequency counter. Counts both ports of TCP and UDP records;
/// ICMP port values are carried data, not service ports.
class PortCounter {
public:
    void add(const UniflowRecord& flow);
    PortFrequencyTable top(std::size_t k) const;

private:
    std::vector<std::uint64_t> counts_ = std::vector<std::uint64_t>(65536, 0);
};

PortFrequencyTable build_port_frequency(const std::vector<UniflowRecord>& flows, std::size_t k);

/// A uniflow whose Src/Dst fields follow the decided session direction. When
/// `swapped` is set the packet and byte counters belong to the dst side.
struct OrientedUniflow {
    UniflowRecord flow;
    bool swapped = false;
};

/// Applies the port heuristics in precedence order; the first heuristic that
/// distinguishes the two ports decides orientation. Equal ports (and ICMP,
/// whose ports are treated as zero-valued) keep the input orientation.
OrientedUniflow decide_direction(const UniflowRecord& flow, const PortFrequencyTable& freq);

/// Keep only protocols 1 (ICMP), 6 (TCP) and 17 (UDP).
bool filter_protocol(const UniflowRecord& flow);

/// Packets/Bytes become SrcPackets/SrcBytes; the dst counters start at zero.
BiflowRecord uniflow_to_seed_biflow(const UniflowRecord& flow);

/// Seed honoring the orientation: a swapped flow's counters land on the dst
/// side, so counters always stay with the device that sent them.
BiflowRecord seed_biflow(const OrientedUniflow& oriented);

struct StitchConfig {
    std::int64_t inactivity_timeout = 1800;  // seconds; evict when idle strictly longer
    std::int64_t report_interval = 10800;    // seconds; interim segment for long-lived entries
    std::size_t top_k = 90;
    bool tcp_only = false;  // non-TCP flows bypass the table when set
};

/// Streaming 5-tuple session table. The logical clock is the maximum EndTime
/// observed so far; each ingest advances the clock, which drives eviction and
/// periodic reporting deterministically.
class StitchTable {
public:
    explicit StitchTable(StitchConfig config = {});

    /// Advances the clock with the flow's EndTime (evicting/reporting first),
    /// then merges or inserts. Returns every record emitted by this step.
    std::vector<BiflowRecord> ingest(const OrientedUniflow& oriented);

    /// Emits entries idle strictly longer than the timeout and interim
    /// segments for entries unreported for longer than the report interval.
    std::vector<BiflowRecord> advance_clock(std::int64_t now);

    /// Emits all remaining entries in 5-tuple-sorted order and empties the table.
    std::vector<BiflowRecord> flush();

    std::size_t size() const { return table_.size(); }
    std::int64_t clock() const { return clock_; }

private:
    struct Entry {
        BiflowRecord acc;            // time = current segment start; counters = segment totals
        std::int64_t last_activity;  // max constituent EndTime
        std::int64_t last_report;    // clock at creation / last interim report
        std::uint64_t merges_since_report;
    };

    enum DeadlineKind : int { kEvict = 0, kReport = 1 };

    struct Deadline {
        std::int64_t when;
        int kind;
        FiveTuple key;
    };

    struct DeadlineLater {
        bool operator()(const Deadline& a, const Deadline& b) const {
            if (a.when != b.when) return a.when > b.when;
            if (a.kind != b.kind) return a.kind > b.kind;
            return b.key < a.key;
        }
    };

    BiflowRecord snapshot(const Entry& entry) const;
    void process_deadlines(std::vector<BiflowRecord>& out);
    void maybe_compact();

    StitchConfig config_;
    std::int64_t clock_;
    bool clock_started_ = false;
    std::unordered_map<FiveTuple, Entry, FiveTupleHash> table_;
    std::priority_queue<Deadline, std::vector<Deadline>, DeadlineLater> deadlines_;
};

}  // namespace flowstitch
