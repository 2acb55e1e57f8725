#pragma once

// Batch re-derivation of the stitching semantics, kept independent of the
// streaming implementation it checks. Oriented flows are grouped by unordered
// 5-tuple and each group replays eviction and interim-report deadlines against
// the global prefix-max clock of the arrival stream.

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "flowstitch/flow.hpp"
#include "flowstitch/stitcher.hpp"

namespace stitch_oracle {

using flowstitch::BiflowRecord;
using flowstitch::PortFrequencyTable;
using flowstitch::StitchConfig;
using flowstitch::UniflowRecord;

struct Oriented {
    UniflowRecord flow;
    bool swapped;
};

inline Oriented orient(const UniflowRecord& f, const PortFrequencyTable& freq) {
    auto swapped = [&] {
        UniflowRecord s = f;
        std::swap(s.src_ip, s.dst_ip);
        std::swap(s.src_port, s.dst_port);
        return Oriented{s, true};
    };
    if (f.protocol == 1 || f.src_port == f.dst_port) return {f, false};
    bool sl = f.src_port < 1024, dl = f.dst_port < 1024;
    if (sl != dl) return dl ? Oriented{f, false} : swapped();
    bool sm = freq.contains(f.src_port), dm = freq.contains(f.dst_port);
    if (sm != dm) return dm ? Oriented{f, false} : swapped();
    return f.dst_port < f.src_port ? Oriented{f, false} : swapped();
}

using Key = std::tuple<std::string, std::string, std::uint16_t, std::uint16_t, int>;

inline Key key_of(const UniflowRecord& f) {
    return {f.src_ip, f.dst_ip, f.src_port, f.dst_port, f.protocol};
}

inline Key mirror_key(const Key& k) {
    return {std::get<1>(k), std::get<0>(k), std::get<3>(k), std::get<2>(k), std::get<4>(k)};
}

inline std::vector<BiflowRecord> stitch(const std::vector<UniflowRecord>& arrivals,
                                        const PortFrequencyTable& freq,
                                        const StitchConfig& cfg) {
    const std::size_t n = arrivals.size();
    std::vector<std::int64_t> clocks(n);
    std::int64_t running = 0;
    for (std::size_t i = 0; i < n; ++i) {
        running = i == 0 ? arrivals[i].end_time : std::max(running, arrivals[i].end_time);
        clocks[i] = running;
    }

    std::vector<BiflowRecord> out;
    struct Item {
        std::size_t idx;
        Oriented oriented;
    };
    std::map<Key, std::vector<Item>> groups;
    for (std::size_t i = 0; i < n; ++i) {
        Oriented o = orient(arrivals[i], freq);
        if (cfg.tcp_only && o.flow.protocol != 6) {
            BiflowRecord b;
            b.time = o.flow.start_time;
            b.duration = o.flow.end_time - o.flow.start_time;
            b.src_device = o.flow.src_ip;
            b.dst_device = o.flow.dst_ip;
            b.protocol = o.flow.protocol;
            b.src_port = std::to_string(o.flow.src_port);
            b.dst_port = std::to_string(o.flow.dst_port);
            (o.swapped ? b.dst_packets : b.src_packets) = o.flow.packets;
            (o.swapped ? b.dst_bytes : b.src_bytes) = o.flow.bytes;
            out.push_back(std::move(b));
            continue;
        }
        Key k = key_of(o.flow);
        Key m = mirror_key(k);
        groups[std::min(k, m)].push_back({i, std::move(o)});
    }

    for (auto& [unordered_key, items] : groups) {
        bool open = false;
        Key seg_key;
        std::int64_t seg_time = 0, last_activity = 0, last_report = 0;
        std::uint64_t sp = 0, dp = 0, sb = 0, db = 0, merges = 0;
        std::size_t prev_idx = 0;

        auto emit = [&] {
            if (!open || merges == 0) return;
            BiflowRecord b;
            b.time = seg_time;
            b.duration = last_activity - seg_time;
            b.src_device = std::get<0>(seg_key);
            b.dst_device = std::get<1>(seg_key);
            b.src_port = std::to_string(std::get<2>(seg_key));
            b.dst_port = std::to_string(std::get<3>(seg_key));
            b.protocol = std::get<4>(seg_key);
            b.src_packets = sp;
            b.dst_packets = dp;
            b.src_bytes = sb;
            b.dst_bytes = db;
            out.push_back(std::move(b));
        };

        for (const Item& item : items) {
            std::int64_t c = clocks[item.idx];
            while (open) {
                std::int64_t evict_when = last_activity + cfg.inactivity_timeout;
                std::int64_t report_when = last_report + cfg.report_interval;
                bool evict_due = c > evict_when;
                bool report_due = c > report_when;
                if (evict_due && (evict_when <= report_when || !report_due)) {
                    emit();
                    open = false;
                    break;
                }
                if (report_due) {
                    // The report fires at the first global advance past the
                    // deadline, which fixes the next report anchor.
                    auto begin = clocks.begin() + static_cast<std::ptrdiff_t>(prev_idx) + 1;
                    auto end = clocks.begin() + static_cast<std::ptrdiff_t>(item.idx) + 1;
                    auto fire = std::upper_bound(begin, end, report_when);
                    emit();
                    sp = dp = sb = db = 0;
                    merges = 0;
                    seg_time = last_activity;
                    last_report = *fire;
                    continue;
                }
                break;
            }

            const Oriented& o = item.oriented;
            std::uint64_t fsp = o.swapped ? 0 : o.flow.packets;
            std::uint64_t fdp = o.swapped ? o.flow.packets : 0;
            std::uint64_t fsb = o.swapped ? 0 : o.flow.bytes;
            std::uint64_t fdb = o.swapped ? o.flow.bytes : 0;
            if (!open) {
                open = true;
                seg_key = key_of(o.flow);
                seg_time = o.flow.start_time;
                last_activity = o.flow.end_time;
                last_report = c;
                sp = fsp;
                dp = fdp;
                sb = fsb;
                db = fdb;
                merges = 1;
            } else {
                bool same_direction = key_of(o.flow) == seg_key;
                sp += same_direction ? fsp : fdp;
                dp += same_direction ? fdp : fsp;
                sb += same_direction ? fsb : fdb;
                db += same_direction ? fdb : fsb;
                seg_time = std::min(seg_time, o.flow.start_time);
                last_activity = std::max(last_activity, o.flow.end_time);
                ++merges;
            }
            prev_idx = item.idx;
        }
        emit();
    }
    return out;
}

inline std::vector<BiflowRecord> sorted(std::vector<BiflowRecord> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace stitch_oracle
