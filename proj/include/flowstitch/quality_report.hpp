#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "flowstitch/flow.hpp"
#include "flowstitch/hostlog.hpp"

namespace flowstitch {

/// Streaming aggregation of every per-biflow statistic in the report suite.
/// Days are UTC day indexes of the flow end time (time + duration); daily
/// series are contiguous with absent days reported as zero.
class BiflowStats {
public:
    void add(const BiflowRecord& record);

    std::uint64_t total() const { return total_; }
    std::vector<std::int64_t> observed_days() const;

    struct DayCount {
        std::int64_t day;
        std::uint64_t count;
    };
    std::vector<DayCount> daily_counts() const;

    struct DayFractions {
        std::int64_t day;
        std::uint64_t total;
        double src_packets_zero;
        double dst_packets_zero;
        double src_unmapped;
        double dst_unmapped;
    };
    std::vector<DayFractions> zero_packet_fractions() const;

    struct DayProportions {
        std::int64_t day;
        std::uint64_t total;
        double icmp;  // protocol 1
        double tcp;   // protocol 6
        double udp;   // protocol 17
    };
    std::vector<DayProportions> protocol_proportions() const;

    struct PortCount {
        std::string port;
        std::uint64_t count;
    };
    /// Descending frequency; ties break on ascending numeric value, then
    /// ascending identifier text.
    std::vector<PortCount> top_src_ports(std::size_t k) const;
    std::vector<PortCount> top_dst_ports(std::size_t k) const;

    /// Log-spaced histogram rows per protocol and statistic: the zero bin is
    /// [0,1) and decade bins are [10^k, 10^(k+1)).
    struct HistRow {
        int protocol;
        std::string stat;  // Duration, SrcBytes, DstBytes
        std::uint64_t lo;
        std::uint64_t hi;  // exclusive
        std::uint64_t count;
    };
    std::vector<HistRow> distribution_summaries() const;

    struct DegreeRow {
        std::uint64_t degree;
        std::uint64_t devices;
    };
    struct DegreePair {
        std::vector<DegreeRow> out_degree;
        std::vector<DegreeRow> in_degree;
    };
    /// Out-degree of a device on a day = distinct destinations it reached.
    DegreePair degree_distribution(std::int64_t day) const;

private:
    struct DayAgg {
        std::uint64_t total = 0;
        std::uint64_t src_pkts_zero = 0;
        std::uint64_t dst_pkts_zero = 0;
        std::uint64_t src_unmapped = 0;
        std::uint64_t dst_unmapped = 0;
        std::map<int, std::uint64_t> protocols;
    };
    std::uint64_t total_ = 0;
    std::map<std::int64_t, DayAgg> days_;
    std::map<std::string, std::uint64_t> src_ports_;
    std::map<std::string, std::uint64_t> dst_ports_;
    // protocol -> stat index (0 dur, 1 src bytes, 2 dst bytes) -> bin -> count;
    // bin 0 holds zeros, bin k>=1 holds [10^(k-1), 10^k).
    std::map<int, std::array<std::vector<std::uint64_t>, 3>> hist_;
    std::map<std::int64_t, std::map<std::string, std::set<std::string>>> out_adj_;
    std::map<std::int64_t, std::map<std::string, std::set<std::string>>> in_adj_;

    std::vector<PortCount> top_ports(const std::map<std::string, std::uint64_t>& counts,
                                     std::size_t k) const;
};

/// True for device identifiers whose name resolution failed: raw address
/// literals before de-identification, "IP"-prefixed identifiers after.
bool is_unmapped_device(const std::string& device);

/// Streaming aggregation of the host-event statistics.
class HostEventStats {
public:
    void add(const HostEvent& event);

    std::uint64_t total() const { return total_; }

    struct EventHistRow {
        int event_id;
        std::int64_t logon_type;  // -1 when not applicable/absent
        std::uint64_t count;
        double percent;  // of all events
    };
    std::vector<EventHistRow> eventid_logontype_histogram() const;

    struct EntityTotals {
        std::uint64_t processes = 0;
        std::uint64_t users = 0;
        std::uint64_t log_hosts = 0;
        std::uint64_t source_hosts = 0;
        std::uint64_t computer_accounts = 0;
    };
    EntityTotals unique_entity_counts() const;

    struct DailyEntityRow {
        std::int64_t day;
        EntityTotals counts;
    };
    std::vector<DailyEntityRow> daily_entity_counts() const;

private:
    struct EntitySets {
        std::set<std::string> processes, users, log_hosts, source_hosts, computer_accounts;
        void add_event(const HostEvent& event);
        EntityTotals totals() const;
    };
    std::uint64_t total_ = 0;
    std::map<std::pair<int, std::int64_t>, std::uint64_t> event_counts_;
    EntitySets overall_;
    std::map<std::int64_t, EntitySets> daily_;
};

struct TimelineRow {
    std::string label;  // "4688" or "4624l2"
    std::int64_t time;
};

/// Event-time sequence for one user or device identifier, labelled by
/// EventID and, for logon events, LogonType.
class TimelineCollector {
public:
    explicit TimelineCollector(std::string entity_id) : entity_(std::move(entity_id)) {}
    void add(const HostEvent& event);
    const std::vector<TimelineRow>& rows() const { return rows_; }

private:
    std::string entity_;
    std::vector<TimelineRow> rows_;
};

std::string event_label(const HostEvent& event);

// Batch conveniences over in-memory records (tests, bindings).
std::vector<BiflowStats::DayCount> daily_biflow_counts(const std::vector<BiflowRecord>& biflows);
std::vector<BiflowStats::DayFractions> zero_packet_fractions(
    const std::vector<BiflowRecord>& biflows);
std::vector<BiflowStats::DayProportions> protocol_proportions_daily(
    const std::vector<BiflowRecord>& biflows);
BiflowStats::DegreePair degree_distributions(const std::vector<BiflowRecord>& biflows,
                                             std::int64_t day);
std::vector<TimelineRow> entity_timeline(const std::vector<HostEvent>& events,
                                         const std::string& entity_id);

// CSV emitters; each returns the number of data rows written.
std::size_t write_daily_counts_csv(std::ostream& out, const BiflowStats& stats);
std::size_t write_zero_fractions_csv(std::ostream& out, const BiflowStats& stats);
std::size_t write_protocol_daily_csv(std::ostream& out, const BiflowStats& stats);
std::size_t write_port_histogram_csv(std::ostream& out, const BiflowStats& stats, bool src,
                                     std::size_t k);
std::size_t write_distributions_csv(std::ostream& out, const BiflowStats& stats);
std::size_t write_degree_csv(std::ostream& out, const BiflowStats& stats,
                             const std::vector<std::int64_t>& days);
std::size_t write_event_histogram_csv(std::ostream& out, const HostEventStats& stats);
std::size_t write_entity_counts_csv(std::ostream& out, const HostEventStats& stats);
std::size_t write_entity_daily_csv(std::ostream& out, const HostEventStats& stats);
std::size_t write_timeline_csv(std::ostream& out, const TimelineCollector& timeline);

}  // namespace flowstitch
