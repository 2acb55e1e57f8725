#include "flowstitch/stitcher.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <utility>

#include "flowstitch/util.hpp"

namespace flowstitch {

PortFrequencyTable::PortFrequencyTable(std::vector<std::uint16_t> ranked)
    : ranked_(std::move(ranked)) {
    for (std::uint16_t p : ranked_) member_[p] = true;
}

PortFrequencyTable PortFrequencyTable::load(std::istream& in) {
    std::vector<std::uint16_t> ranked;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::int64_t v = parse_i64(line, "Port", line_no);
        if (v < 0 || v > 65535) {
            throw ParseError(line_no, "Port", "value out of range 0..65535");
        }
        ranked.push_back(static_cast<std::uint16_t>(v));
    }
    return PortFrequencyTable(std::move(ranked));
}

void PortFrequencyTable::save(std::ostream& out) const {
    for (std::uint16_t p : ranked_) out << p << '\n';
}

void PortCounter::add(const UniflowRecord& flow) {
    if (flow.protocol != 6 && flow.protocol != 17) return;
    ++counts_[flow.src_port];
    ++counts_[flow.dst_port];
}

PortFrequencyTable PortCounter::top(std::size_t k) const {
    std::vector<std::uint16_t> seen;
    for (std::size_t p = 0; p < counts_.size(); ++p) {
        if (counts_[p] > 0) seen.push_back(static_cast<std::uint16_t>(p));
    }
    // descending count, ascending port on ties
    std::stable_sort(seen.begin(), seen.end(), [&](std::uint16_t a, std::uint16_t b) {
        if (counts_[a] != counts_[b]) return counts_[a] > counts_[b];
        return a < b;
    });
    if (seen.size() > k) seen.resize(k);
    return PortFrequencyTable(std::move(seen));
}

PortFrequencyTable build_port_frequency(const std::vector<UniflowRecord>& flows, std::size_t k) {
    PortCounter counter;
    for (const auto& f : flows) counter.add(f);
    return counter.top(k);
}

OrientedUniflow decide_direction(const UniflowRecord& flow, const PortFrequencyTable& freq) {
    // Ports of ICMP records are carried but treated as zero-valued, so no
    // heuristic can distinguish them.
    if (flow.protocol == 1 || flow.src_port == flow.dst_port) {
        return {flow, false};
    }
    auto keep = [&] { return OrientedUniflow{flow, false}; };
    auto swap = [&] {
        UniflowRecord s = flow;
        std::swap(s.src_ip, s.dst_ip);
        std::swap(s.src_port, s.dst_port);
        return OrientedUniflow{s, true};
    };
    // 1: destination ports are less than 1024 and source ports are not.
    bool src_low = flow.src_port < 1024;
    bool dst_low = flow.dst_port < 1024;
    if (src_low != dst_low) return dst_low ? keep() : swap();
    // 2: the top-K most frequently observed ports are destination ports.
    bool src_member = freq.contains(flow.src_port);
    bool dst_member = freq.contains(flow.dst_port);
    if (src_member != dst_member) return dst_member ? keep() : swap();
    // 3: the smaller of the two ports is the destination port.
    return flow.dst_port < flow.src_port ? keep() : swap();
}

bool filter_protocol(const UniflowRecord& flow) {
    return flow.protocol == 1 || flow.protocol == 6 || flow.protocol == 17;
}

BiflowRecord uniflow_to_seed_biflow(const UniflowRecord& flow) {
    return seed_biflow({flow, false});
}

BiflowRecord seed_biflow(const OrientedUniflow& oriented) {
    const UniflowRecord& f = oriented.flow;
    BiflowRecord b;
    b.time = f.start_time;
    b.duration = f.end_time - f.start_time;
    b.src_device = f.src_ip;
    b.dst_device = f.dst_ip;
    b.protocol = f.protocol;
    b.src_port = std::to_string(f.src_port);
    b.dst_port = std::to_string(f.dst_port);
    if (oriented.swapped) {
        b.dst_packets = f.packets;
        b.dst_bytes = f.bytes;
    } else {
        b.src_packets = f.packets;
        b.src_bytes = f.bytes;
    }
    return b;
}

StitchTable::StitchTable(StitchConfig config)
    : config_(config), clock_(std::numeric_limits<std::int64_t>::min()) {}

BiflowRecord StitchTable::snapshot(const Entry& entry) const {
    BiflowRecord r = entry.acc;
    r.duration = entry.last_activity - entry.acc.time;
    return r;
}

void StitchTable::process_deadlines(std::vector<BiflowRecord>& out) {
    while (!deadlines_.empty() && deadlines_.top().when < clock_) {
        Deadline d = deadlines_.top();
        deadlines_.pop();
        auto it = table_.find(d.key);
        if (it == table_.end()) continue;
        Entry& e = it->second;
        if (d.kind == kEvict) {
            // Inactivity is measured from the latest constituent EndTime; a
            // fresher deadline supersedes this node unless the entry is
            // genuinely stale now.
            if (clock_ - e.last_activity <= config_.inactivity_timeout) continue;
            if (e.merges_since_report > 0) out.push_back(snapshot(e));
            table_.erase(it);
        } else {
            if (clock_ - e.last_report <= config_.report_interval) continue;
            if (e.merges_since_report > 0) {
                out.push_back(snapshot(e));
                // Counters reset; the next segment starts at the coverage end
                // so sums over emitted records never double-count.
                e.acc.src_packets = 0;
                e.acc.dst_packets = 0;
                e.acc.src_bytes = 0;
                e.acc.dst_bytes = 0;
                e.acc.time = e.last_activity;
                e.merges_since_report = 0;
            }
            e.last_report = clock_;
            deadlines_.push({e.last_report + config_.report_interval, kReport, d.key});
        }
    }
}

std::vector<BiflowRecord> StitchTable::advance_clock(std::int64_t now) {
    if (!clock_started_ || now > clock_) {
        clock_ = clock_started_ ? std::max(clock_, now) : now;
        clock_started_ = true;
    }
    std::vector<BiflowRecord> out;
    process_deadlines(out);
    maybe_compact();
    return out;
}

std::vector<BiflowRecord> StitchTable::ingest(const OrientedUniflow& oriented) {
    const UniflowRecord& f = oriented.flow;
    std::vector<BiflowRecord> out =
        advance_clock(clock_started_ ? std::max(clock_, f.end_time) : f.end_time);

    if (config_.tcp_only && f.protocol != 6) {
        out.push_back(seed_biflow(oriented));
        return out;
    }

    FiveTuple key = FiveTuple::of(f);
    bool opposite = false;
    auto it = table_.find(key);
    if (it == table_.end()) {
        auto mirror_it = table_.find(key.mirrored());
        if (mirror_it != table_.end()) {
            it = mirror_it;
            opposite = true;
        }
    }

    if (it == table_.end()) {
        Entry e;
        e.acc = seed_biflow(oriented);
        e.last_activity = f.end_time;
        e.last_report = clock_;
        e.merges_since_report = 1;
        deadlines_.push({f.end_time + config_.inactivity_timeout, kEvict, key});
        deadlines_.push({clock_ + config_.report_interval, kReport, key});
        table_.emplace(std::move(key), std::move(e));
        return out;
    }

    Entry& e = it->second;
    BiflowRecord add = seed_biflow(oriented);
    if (opposite) add = mirror(add);
    e.acc.time = std::min(e.acc.time, add.time);
    e.acc.src_packets += add.src_packets;
    e.acc.dst_packets += add.dst_packets;
    e.acc.src_bytes += add.src_bytes;
    e.acc.dst_bytes += add.dst_bytes;
    ++e.merges_since_report;
    if (f.end_time > e.last_activity) {
        e.last_activity = f.end_time;
        deadlines_.push({e.last_activity + config_.inactivity_timeout, kEvict, it->first});
    }
    return out;
}

std::vector<BiflowRecord> StitchTable::flush() {
    std::vector<std::pair<FiveTuple, const Entry*>> remaining;
    remaining.reserve(table_.size());
    for (const auto& [key, entry] : table_) remaining.emplace_back(key, &entry);
    std::sort(remaining.begin(), remaining.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<BiflowRecord> out;
    out.reserve(remaining.size());
    for (const auto& [key, entry] : remaining) {
        if (entry->merges_since_report > 0) out.push_back(snapshot(*entry));
    }
    table_.clear();
    deadlines_ = {};
    return out;
}

void StitchTable::maybe_compact() {
    if (deadlines_.size() <= 4 * table_.size() + 64) return;
    decltype(deadlines_) fresh;
    for (const auto& [key, entry] : table_) {
        fresh.push({entry.last_activity + config_.inactivity_timeout, kEvict, key});
        fresh.push({entry.last_report + config_.report_interval, kReport, key});
    }
    deadlines_ = std::move(fresh);
}

}  // namespace flowstitch
