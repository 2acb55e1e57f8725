#include "flowstitch/quality_report.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "flowstitch/util.hpp"

namespace flowstitch {

namespace {

std::string fixed9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9f", v);
    return buf;
}

// Bin 0 holds zeros; bin k>=1 holds [10^(k-1), 10^k).
std::size_t decade_bin(std::uint64_t value) {
    std::size_t bin = 0;
    while (value > 0) {
        ++bin;
        value /= 10;
    }
    return bin;
}

std::uint64_t pow10_u64(std::size_t e) {
    std::uint64_t v = 1;
    while (e-- > 0) v *= 10;
    return v;
}

bool numeric_port(const std::string& s, std::uint64_t& value) {
    if (s.empty() || s.size() > 10) return false;
    value = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
        value = value * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return true;
}

}  // namespace

bool is_unmapped_device(const std::string& device) {
    if (is_ip_literal(device)) return true;
    if (device.size() > 2 && device[0] == 'I' && device[1] == 'P') {
        return std::all_of(device.begin() + 2, device.end(),
                           [](unsigned char c) { return c >= '0' && c <= '9'; });
    }
    return false;
}

void BiflowStats::add(const BiflowRecord& r) {
    ++total_;
    std::int64_t day = epoch_day(r.time + r.duration);
    DayAgg& agg = days_[day];
    ++agg.total;
    if (r.src_packets == 0) ++agg.src_pkts_zero;
    if (r.dst_packets == 0) ++agg.dst_pkts_zero;
    if (is_unmapped_device(r.src_device)) ++agg.src_unmapped;
    if (is_unmapped_device(r.dst_device)) ++agg.dst_unmapped;
    ++agg.protocols[r.protocol];

    ++src_ports_[r.src_port];
    ++dst_ports_[r.dst_port];

    auto& bins = hist_[r.protocol];
    const std::uint64_t values[3] = {static_cast<std::uint64_t>(r.duration), r.src_bytes,
                                     r.dst_bytes};
    for (int s = 0; s < 3; ++s) {
        std::size_t bin = decade_bin(values[s]);
        if (bins[s].size() <= bin) bins[s].resize(bin + 1, 0);
        ++bins[s][bin];
    }

    out_adj_[day][r.src_device].insert(r.dst_device);
    in_adj_[day][r.dst_device].insert(r.src_device);
}

std::vector<std::int64_t> BiflowStats::observed_days() const {
    std::vector<std::int64_t> days;
    days.reserve(days_.size());
    for (const auto& [day, agg] : days_) days.push_back(day);
    return days;
}

std::vector<BiflowStats::DayCount> BiflowStats::daily_counts() const {
    std::vector<DayCount> out;
    if (days_.empty()) return out;
    std::int64_t first = days_.begin()->first;
    std::int64_t last = days_.rbegin()->first;
    for (std::int64_t day = first; day <= last; ++day) {
        auto it = days_.find(day);
        out.push_back({day, it == days_.end() ? 0 : it->second.total});
    }
    return out;
}

std::vector<BiflowStats::DayFractions> BiflowStats::zero_packet_fractions() const {
    std::vector<DayFractions> out;
    if (days_.empty()) return out;
    std::int64_t first = days_.begin()->first;
    std::int64_t last = days_.rbegin()->first;
    for (std::int64_t day = first; day <= last; ++day) {
        auto it = days_.find(day);
        if (it == days_.end() || it->second.total == 0) {
            out.push_back({day, 0, 0.0, 0.0, 0.0, 0.0});
            continue;
        }
        const DayAgg& a = it->second;
        double n = static_cast<double>(a.total);
        out.push_back({day, a.total, a.src_pkts_zero / n, a.dst_pkts_zero / n, a.src_unmapped / n,
                       a.dst_unmapped / n});
    }
    return out;
}

std::vector<BiflowStats::DayProportions> BiflowStats::protocol_proportions() const {
    std::vector<DayProportions> out;
    if (days_.empty()) return out;
    std::int64_t first = days_.begin()->first;
    std::int64_t last = days_.rbegin()->first;
    for (std::int64_t day = first; day <= last; ++day) {
        auto it = days_.find(day);
        if (it == days_.end() || it->second.total == 0) {
            out.push_back({day, 0, 0.0, 0.0, 0.0});
            continue;
        }
        const DayAgg& a = it->second;
        auto count = [&](int proto) {
            auto pit = a.protocols.find(proto);
            return pit == a.protocols.end() ? 0.0 : static_cast<double>(pit->second);
        };
        double n = static_cast<double>(a.total);
        out.push_back({day, a.total, count(1) / n, count(6) / n, count(17) / n});
    }
    return out;
}

std::vector<BiflowStats::PortCount> BiflowStats::top_ports(
    const std::map<std::string, std::uint64_t>& counts, std::size_t k) const {
    std::vector<PortCount> rows;
    rows.reserve(counts.size());
    for (const auto& [port, count] : counts) rows.push_back({port, count});
    std::sort(rows.begin(), rows.end(), [](const PortCount& a, const PortCount& b) {
        if (a.count != b.count) return a.count > b.count;
        std::uint64_t na = 0, nb = 0;
        bool a_num = numeric_port(a.port, na);
        bool b_num = numeric_port(b.port, nb);
        if (a_num != b_num) return a_num;  // numeric ports before identifiers
        if (a_num) return na < nb;
        return a.port < b.port;
    });
    if (rows.size() > k) rows.resize(k);
    return rows;
}

std::vector<BiflowStats::PortCount> BiflowStats::top_src_ports(std::size_t k) const {
    return top_ports(src_ports_, k);
}

std::vector<BiflowStats::PortCount> BiflowStats::top_dst_ports(std::size_t k) const {
    return top_ports(dst_ports_, k);
}

std::vector<BiflowStats::HistRow> BiflowStats::distribution_summaries() const {
    static const char* stat_names[3] = {"Duration", "SrcBytes", "DstBytes"};
    std::vector<HistRow> out;
    for (const auto& [protocol, bins] : hist_) {
        for (int s = 0; s < 3; ++s) {
            for (std::size_t bin = 0; bin < bins[s].size(); ++bin) {
                if (bins[s][bin] == 0) continue;
                std::uint64_t lo = bin == 0 ? 0 : pow10_u64(bin - 1);
                std::uint64_t hi = bin == 0 ? 1 : pow10_u64(bin);
                out.push_back({protocol, stat_names[s], lo, hi, bins[s][bin]});
            }
        }
    }
    return out;
}

BiflowStats::DegreePair BiflowStats::degree_distribution(std::int64_t day) const {
    DegreePair pair;
    auto build = [](const std::map<std::int64_t,
                                   std::map<std::string, std::set<std::string>>>& adj,
                    std::int64_t d) {
        std::vector<DegreeRow> rows;
        auto it = adj.find(d);
        if (it == adj.end()) return rows;
        std::map<std::uint64_t, std::uint64_t> histogram;
        for (const auto& [device, peers] : it->second) ++histogram[peers.size()];
        rows.reserve(histogram.size());
        for (const auto& [degree, devices] : histogram) rows.push_back({degree, devices});
        return rows;
    };
    pair.out_degree = build(out_adj_, day);
    pair.in_degree = build(in_adj_, day);
    return pair;
}

void HostEventStats::EntitySets::add_event(const HostEvent& event) {
    log_hosts.insert(event.log_host);
    if (auto name = event.text_attr(Attr::ProcessName)) processes.insert(*name);
    if (auto src = event.text_attr(Attr::Source)) source_hosts.insert(*src);
    if (auto user = event.text_attr(Attr::UserName)) {
        if (!user->empty() && user->back() == '$') {
            computer_accounts.insert(*user);
        } else {
            users.insert(*user);
        }
    }
}

HostEventStats::EntityTotals HostEventStats::EntitySets::totals() const {
    return {processes.size(), users.size(), log_hosts.size(), source_hosts.size(),
            computer_accounts.size()};
}

void HostEventStats::add(const HostEvent& event) {
    ++total_;
    std::int64_t logon_type = -1;
    if (event.event_id == 4624 || event.event_id == 4625 || event.event_id == 4634) {
        if (auto lt = event.int_attr(Attr::LogonType)) logon_type = *lt;
    }
    ++event_counts_[{event.event_id, logon_type}];
    overall_.add_event(event);
    daily_[epoch_day(event.time)].add_event(event);
}

std::vector<HostEventStats::EventHistRow> HostEventStats::eventid_logontype_histogram() const {
    std::vector<EventHistRow> out;
    out.reserve(event_counts_.size());
    for (const auto& [key, count] : event_counts_) {
        double pct = total_ == 0 ? 0.0 : 100.0 * static_cast<double>(count) / total_;
        out.push_back({key.first, key.second, count, pct});
    }
    return out;
}

HostEventStats::EntityTotals HostEventStats::unique_entity_counts() const {
    return overall_.totals();
}

std::vector<HostEventStats::DailyEntityRow> HostEventStats::daily_entity_counts() const {
    std::vector<DailyEntityRow> out;
    if (daily_.empty()) return out;
    std::int64_t first = daily_.begin()->first;
    std::int64_t last = daily_.rbegin()->first;
    for (std::int64_t day = first; day <= last; ++day) {
        auto it = daily_.find(day);
        out.push_back({day, it == daily_.end() ? EntityTotals{} : it->second.totals()});
    }
    return out;
}

std::string event_label(const HostEvent& event) {
    std::string label = std::to_string(event.event_id);
    if (event.event_id == 4624 || event.event_id == 4625 || event.event_id == 4634) {
        if (auto lt = event.int_attr(Attr::LogonType)) {
            label += "l" + std::to_string(*lt);
        }
    }
    return label;
}

void TimelineCollector::add(const HostEvent& event) {
    bool matches = event.log_host == entity_;
    if (!matches) {
        if (auto user = event.text_attr(Attr::UserName)) matches = *user == entity_;
    }
    if (!matches) return;
    rows_.push_back({event_label(event), event.time});
}

std::vector<BiflowStats::DayCount> daily_biflow_counts(const std::vector<BiflowRecord>& biflows) {
    BiflowStats stats;
    for (const auto& b : biflows) stats.add(b);
    return stats.daily_counts();
}

std::vector<BiflowStats::DayFractions> zero_packet_fractions(
    const std::vector<BiflowRecord>& biflows) {
    BiflowStats stats;
    for (const auto& b : biflows) stats.add(b);
    return stats.zero_packet_fractions();
}

std::vector<BiflowStats::DayProportions> protocol_proportions_daily(
    const std::vector<BiflowRecord>& biflows) {
    BiflowStats stats;
    for (const auto& b : biflows) stats.add(b);
    return stats.protocol_proportions();
}

BiflowStats::DegreePair degree_distributions(const std::vector<BiflowRecord>& biflows,
                                             std::int64_t day) {
    BiflowStats stats;
    for (const auto& b : biflows) stats.add(b);
    return stats.degree_distribution(day);
}

std::vector<TimelineRow> entity_timeline(const std::vector<HostEvent>& events,
                                         const std::string& entity_id) {
    TimelineCollector collector(entity_id);
    for (const auto& e : events) collector.add(e);
    return collector.rows();
}

std::size_t write_daily_counts_csv(std::ostream& out, const BiflowStats& stats) {
    out << "day,count\n";
    auto rows = stats.daily_counts();
    for (const auto& r : rows) out << r.day << ',' << r.count << '\n';
    return rows.size();
}

std::size_t write_zero_fractions_csv(std::ostream& out, const BiflowStats& stats) {
    out << "day,total,src_packets_zero,dst_packets_zero,src_unmapped,dst_unmapped\n";
    auto rows = stats.zero_packet_fractions();
    for (const auto& r : rows) {
        out << r.day << ',' << r.total << ',' << fixed9(r.src_packets_zero) << ','
            << fixed9(r.dst_packets_zero) << ',' << fixed9(r.src_unmapped) << ','
            << fixed9(r.dst_unmapped) << '\n';
    }
    return rows.size();
}

std::size_t write_protocol_daily_csv(std::ostream& out, const BiflowStats& stats) {
    out << "day,total,icmp,tcp,udp\n";
    auto rows = stats.protocol_proportions();
    for (const auto& r : rows) {
        out << r.day << ',' << r.total << ',' << fixed9(r.icmp) << ',' << fixed9(r.tcp) << ','
            << fixed9(r.udp) << '\n';
    }
    return rows.size();
}

std::size_t write_port_histogram_csv(std::ostream& out, const BiflowStats& stats, bool src,
                                     std::size_t k) {
    out << "rank,port,count\n";
    auto rows = src ? stats.top_src_ports(k) : stats.top_dst_ports(k);
    std::size_t rank = 0;
    for (const auto& r : rows) out << ++rank << ',' << r.port << ',' << r.count << '\n';
    return rows.size();
}

std::size_t write_distributions_csv(std::ostream& out, const BiflowStats& stats) {
    out << "protocol,stat,bin_lo,bin_hi,count\n";
    auto rows = stats.distribution_summaries();
    for (const auto& r : rows) {
        out << r.protocol << ',' << r.stat << ',' << r.lo << ',' << r.hi << ',' << r.count << '\n';
    }
    return rows.size();
}

std::size_t write_degree_csv(std::ostream& out, const BiflowStats& stats,
                             const std::vector<std::int64_t>& days) {
    out << "day,side,degree,devices\n";
    std::size_t rows = 0;
    for (std::int64_t day : days) {
        auto pair = stats.degree_distribution(day);
        for (const auto& r : pair.out_degree) {
            out << day << ",out," << r.degree << ',' << r.devices << '\n';
            ++rows;
        }
        for (const auto& r : pair.in_degree) {
            out << day << ",in," << r.degree << ',' << r.devices << '\n';
            ++rows;
        }
    }
    return rows;
}

std::size_t write_event_histogram_csv(std::ostream& out, const HostEventStats& stats) {
    out << "event_id,logon_type,count,percent\n";
    auto rows = stats.eventid_logontype_histogram();
    for (const auto& r : rows) {
        out << r.event_id << ',';
        if (r.logon_type >= 0) out << r.logon_type;
        out << ',' << r.count << ',' << fixed9(r.percent) << '\n';
    }
    return rows.size();
}

std::size_t write_entity_counts_csv(std::ostream& out, const HostEventStats& stats) {
    auto t = stats.unique_entity_counts();
    out << "measure,total\n";
    out << "processes," << t.processes << '\n';
    out << "users," << t.users << '\n';
    out << "log_hosts," << t.log_hosts << '\n';
    out << "source_hosts," << t.source_hosts << '\n';
    out << "computer_accounts," << t.computer_accounts << '\n';
    return 5;
}

std::size_t write_entity_daily_csv(std::ostream& out, const HostEventStats& stats) {
    out << "day,processes,users,log_hosts,source_hosts,computer_accounts\n";
    auto rows = stats.daily_entity_counts();
    for (const auto& r : rows) {
        out << r.day << ',' << r.counts.processes << ',' << r.counts.users << ','
            << r.counts.log_hosts << ',' << r.counts.source_hosts << ','
            << r.counts.computer_accounts << '\n';
    }
    return rows.size();
}

std::size_t write_timeline_csv(std::ostream& out, const TimelineCollector& timeline) {
    out << "label,time\n";
    for (const auto& r : timeline.rows()) out << r.label << ',' << r.time << '\n';
    return timeline.rows().size();
}

}  // namespace flowstitch
