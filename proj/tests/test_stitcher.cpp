#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "flowstitch/stitcher.hpp"
#include "stitch_oracle.hpp"

using namespace flowstitch;

namespace {

UniflowRecord uf(std::int64_t start, std::int64_t end, std::string src, std::string dst,
                 int proto, std::uint16_t sport, std::uint16_t dport, std::uint64_t pkts,
                 std::uint64_t bytes) {
    return {start, end, std::move(src), std::move(dst), proto, sport, dport, pkts, bytes};
}

std::vector<BiflowRecord> run_all(const std::vector<UniflowRecord>& flows,
                                  const StitchConfig& cfg, const PortFrequencyTable& freq) {
    StitchTable table(cfg);
    std::vector<BiflowRecord> out;
    for (const auto& f : flows) {
        if (!filter_protocol(f)) continue;
        for (auto& r : table.ingest(decide_direction(f, freq))) out.push_back(std::move(r));
    }
    for (auto& r : table.flush()) out.push_back(std::move(r));
    return out;
}

}  // namespace

TEST_CASE("port frequency counts both ports and ranks by count") {
    std::vector<UniflowRecord> flows;
    for (int i = 0; i < 50; ++i) flows.push_back(uf(0, 1, "a", "b", 6, 50000, 443, 1, 1));
    for (int i = 0; i < 30; ++i) flows.push_back(uf(0, 1, "a", "b", 6, 80, 51000, 1, 1));
    for (int i = 0; i < 2; ++i) flows.push_back(uf(0, 1, "a", "b", 6, 8080, 9090, 1, 1));

    // independent counting oracle
    std::map<std::uint16_t, int> expected;
    for (const auto& f : flows) {
        ++expected[f.src_port];
        ++expected[f.dst_port];
    }
    CHECK(expected[443] == 50);
    CHECK(expected[80] == 30);

    PortFrequencyTable top2 = build_port_frequency(flows, 2);
    REQUIRE(top2.ranked().size() == 2);
    CHECK(top2.ranked()[0] == 443);  // 50 observations
    CHECK(top2.ranked()[1] == 80);   // tie at 50 broken below; here plain counts
    CHECK(top2.contains(443));
    CHECK(top2.contains(80));
    CHECK_FALSE(top2.contains(8080));
}

TEST_CASE("port frequency tie-break is ascending port") {
    std::vector<UniflowRecord> flows;
    for (int i = 0; i < 5; ++i) {
        flows.push_back(uf(0, 1, "a", "b", 17, 123, 50000, 1, 1));
        flows.push_back(uf(0, 1, "a", "b", 17, 53, 50001, 1, 1));
    }
    PortFrequencyTable top1 = build_port_frequency(flows, 1);
    REQUIRE(top1.ranked().size() == 1);
    CHECK(top1.ranked()[0] == 53);
}

TEST_CASE("empty stream yields an empty table") {
    PortFrequencyTable table = build_port_frequency({}, 90);
    CHECK(table.empty());
    CHECK_FALSE(table.contains(443));
}

TEST_CASE("icmp ports are not counted") {
    std::vector<UniflowRecord> flows(10, uf(0, 1, "a", "b", 1, 0, 0, 1, 1));
    CHECK(build_port_frequency(flows, 5).empty());
}

TEST_CASE("direction heuristic 1: low port is the destination") {
    PortFrequencyTable none;
    auto kept = decide_direction(uf(0, 1, "a", "b", 6, 49152, 443, 5, 500), none);
    CHECK_FALSE(kept.swapped);
    CHECK(kept.flow.src_ip == "a");

    auto swapped = decide_direction(uf(0, 1, "a", "b", 6, 80, 50000, 5, 500), none);
    CHECK(swapped.swapped);
    CHECK(swapped.flow.src_ip == "b");
    CHECK(swapped.flow.src_port == 50000);
    CHECK(swapped.flow.dst_port == 80);
}

TEST_CASE("direction heuristic 2: the frequent port is the destination") {
    PortFrequencyTable freq({8080});
    auto kept = decide_direction(uf(0, 1, "a", "b", 6, 50000, 8080, 1, 1), freq);
    CHECK_FALSE(kept.swapped);
    auto swapped = decide_direction(uf(0, 1, "a", "b", 6, 8080, 50000, 1, 1), freq);
    CHECK(swapped.swapped);
    // both members: ambiguous, falls through to heuristic 3
    PortFrequencyTable both({8080, 50000});
    auto h3 = decide_direction(uf(0, 1, "a", "b", 6, 8080, 50000, 1, 1), both);
    CHECK_FALSE(h3.swapped);
}

TEST_CASE("direction heuristic 3: the smaller port is the destination") {
    PortFrequencyTable none;
    auto kept = decide_direction(uf(0, 1, "a", "b", 6, 8080, 5000, 1, 1), none);
    CHECK_FALSE(kept.swapped);
    auto swapped = decide_direction(uf(0, 1, "a", "b", 6, 5000, 8080, 1, 1), none);
    CHECK(swapped.swapped);
}

TEST_CASE("equal ports and icmp keep the input orientation") {
    PortFrequencyTable none;
    CHECK_FALSE(decide_direction(uf(0, 1, "a", "b", 17, 123, 123, 1, 1), none).swapped);
    CHECK_FALSE(decide_direction(uf(0, 1, "a", "b", 1, 8, 0, 1, 1), none).swapped);
}

TEST_CASE("direction idempotence and swap involution") {
    std::mt19937_64 rng(11);
    PortFrequencyTable freq({443, 8080, 3389});
    for (int i = 0; i < 5000; ++i) {
        UniflowRecord f = uf(0, 1, "a", "b", rng() % 2 ? 6 : 17,
                             static_cast<std::uint16_t>(rng()),
                             static_cast<std::uint16_t>(rng()), 1, 1);
        OrientedUniflow once = decide_direction(f, freq);
        OrientedUniflow twice = decide_direction(once.flow, freq);
        CHECK_FALSE(twice.swapped);  // applying again never swaps
        CHECK(twice.flow == once.flow);

        if (f.src_port != f.dst_port) {
            UniflowRecord swapped = f;
            std::swap(swapped.src_ip, swapped.dst_ip);
            std::swap(swapped.src_port, swapped.dst_port);
            OrientedUniflow other = decide_direction(swapped, freq);
            // both orientations of the same flow agree on the session direction
            CHECK(other.flow.src_ip == once.flow.src_ip);
            CHECK(other.flow.src_port == once.flow.src_port);
            CHECK(other.flow.dst_port == once.flow.dst_port);
        }
    }
}

TEST_CASE("seed biflow renames the counters, dst side starts at zero") {
    UniflowRecord f = uf(10, 25, "a", "b", 6, 49152, 443, 5, 500);
    BiflowRecord b = uniflow_to_seed_biflow(f);
    CHECK(b.time == 10);
    CHECK(b.duration == 15);
    CHECK(b.src_packets == 5);
    CHECK(b.src_bytes == 500);
    CHECK(b.dst_packets == 0);
    CHECK(b.dst_bytes == 0);

    // zero-packet uniflow seeds with all four counters zero
    BiflowRecord z = uniflow_to_seed_biflow(uf(10, 10, "a", "b", 6, 1, 2, 0, 0));
    CHECK(z.src_packets + z.dst_packets + z.src_bytes + z.dst_bytes == 0);
    CHECK(z.duration == 0);
}

TEST_CASE("a swapped flow's counters stay with their sender") {
    PortFrequencyTable none;
    // b answered from port 443; the record arrives reversed
    OrientedUniflow o = decide_direction(uf(0, 1, "b", "a", 6, 443, 49152, 4, 400), none);
    REQUIRE(o.swapped);
    BiflowRecord seed = seed_biflow(o);
    CHECK(seed.src_device == "a");
    CHECK(seed.dst_device == "b");
    CHECK(seed.src_packets == 0);
    CHECK(seed.dst_packets == 4);
    CHECK(seed.dst_bytes == 400);
}

TEST_CASE("protocol filter keeps 1, 6, 17 only") {
    CHECK(filter_protocol(uf(0, 1, "a", "b", 6, 1, 2, 1, 1)));
    CHECK(filter_protocol(uf(0, 1, "a", "b", 17, 1, 2, 1, 1)));
    CHECK(filter_protocol(uf(0, 1, "a", "b", 1, 1, 2, 1, 1)));
    CHECK_FALSE(filter_protocol(uf(0, 1, "a", "b", 47, 1, 2, 1, 1)));
    CHECK_FALSE(filter_protocol(uf(0, 1, "a", "b", 0, 1, 2, 1, 1)));
}

TEST_CASE("opposing uniflows merge into one directed biflow") {
    PortFrequencyTable none;
    StitchTable table({});
    auto out1 = table.ingest(decide_direction(uf(0, 10, "a", "b", 6, 49152, 443, 5, 500), none));
    CHECK(out1.empty());
    auto out2 = table.ingest(decide_direction(uf(1, 9, "b", "a", 6, 443, 49152, 4, 400), none));
    CHECK(out2.empty());
    CHECK(table.size() == 1);
    auto final = table.flush();
    REQUIRE(final.size() == 1);
    CHECK(final[0].src_device == "a");
    CHECK(final[0].dst_device == "b");
    CHECK(final[0].src_packets == 5);
    CHECK(final[0].dst_packets == 4);
    CHECK(final[0].src_bytes == 500);
    CHECK(final[0].dst_bytes == 400);
}

TEST_CASE("equal-port opposing flows merge through the mirrored key") {
    PortFrequencyTable none;
    StitchTable table({});
    table.ingest(decide_direction(uf(0, 10, "a", "b", 17, 123, 123, 5, 500), none));
    table.ingest(decide_direction(uf(2, 8, "b", "a", 17, 123, 123, 4, 400), none));
    auto final = table.flush();
    REQUIRE(final.size() == 1);
    CHECK(final[0].src_device == "a");
    CHECK(final[0].src_packets == 5);
    CHECK(final[0].dst_packets == 4);
}

TEST_CASE("duplicates aggregate with min start, max end, summed counters") {
    PortFrequencyTable none;
    StitchTable table({});
    table.ingest(decide_direction(uf(0, 10, "a", "b", 6, 49152, 443, 5, 500), none));
    table.ingest(decide_direction(uf(5, 30, "a", "b", 6, 49152, 443, 5, 500), none));
    auto final = table.flush();
    REQUIRE(final.size() == 1);
    CHECK(final[0].time == 0);
    CHECK(final[0].duration == 30);
    CHECK(final[0].src_packets == 10);
    CHECK(final[0].src_bytes == 1000);
}

TEST_CASE("inactivity eviction is strict and splits sessions") {
    PortFrequencyTable none;
    StitchTable table({});
    table.ingest(decide_direction(uf(90, 100, "a", "b", 6, 49152, 443, 1, 10), none));

    SUBCASE("exactly at the threshold is retained") {
        auto out = table.advance_clock(1900);
        CHECK(out.empty());
        CHECK(table.size() == 1);
    }
    SUBCASE("strictly past the threshold evicts") {
        auto out = table.advance_clock(1901);
        REQUIRE(out.size() == 1);
        CHECK(out[0].time == 90);
        CHECK(out[0].duration == 10);
        CHECK(table.size() == 0);
    }
    SUBCASE("a same-key flow arriving past the timeout starts a new entry") {
        auto out = table.ingest(
            decide_direction(uf(1895, 1901, "a", "b", 6, 49152, 443, 2, 20), none));
        REQUIRE(out.size() == 1);  // the stale entry is emitted by the clock advance
        CHECK(out[0].src_packets == 1);
        CHECK(table.size() == 1);
        auto final = table.flush();
        REQUIRE(final.size() == 1);
        CHECK(final[0].src_packets == 2);
    }
}

TEST_CASE("advance_clock example values") {
    PortFrequencyTable none;
    StitchTable table({});
    table.ingest(decide_direction(uf(900, 1000, "a", "b", 6, 49152, 443, 1, 1), none));
    CHECK(table.advance_clock(2800).empty());   // 1800 s idle: not "after"
    CHECK(table.advance_clock(2801).size() == 1);  // 1801 s idle: after
}

TEST_CASE("a continuously active entry reports one interim segment near 3 h") {
    PortFrequencyTable none;
    StitchTable table({});
    std::vector<BiflowRecord> emitted;
    // one merge every 10 minutes for 4 hours
    for (std::int64_t t = 0; t <= 4 * 3600; t += 600) {
        auto out = table.ingest(decide_direction(uf(t, t + 60, "a", "b", 6, 49152, 443, 2, 100),
                                                 none));
        for (auto& r : out) emitted.push_back(std::move(r));
    }
    REQUIRE(emitted.size() == 1);  // the interim segment
    CHECK(table.size() == 1);      // entry retained
    CHECK(emitted[0].time == 0);
    auto final = table.flush();
    REQUIRE(final.size() == 1);
    // the second segment starts where the first ended
    CHECK(final[0].time == emitted[0].time + emitted[0].duration);
    // conservation across the two segments
    std::uint64_t pkts = emitted[0].src_packets + final[0].src_packets;
    CHECK(pkts == 2 * 25);
}

TEST_CASE("flush emits in 5-tuple-sorted order, empties the table, is idempotent") {
    PortFrequencyTable none;
    StitchTable table({});
    table.ingest(decide_direction(uf(0, 1, "c", "d", 6, 50000, 443, 1, 1), none));
    table.ingest(decide_direction(uf(0, 1, "a", "b", 6, 50000, 443, 1, 1), none));
    table.ingest(decide_direction(uf(0, 1, "b", "c", 6, 50000, 443, 1, 1), none));
    auto out = table.flush();
    REQUIRE(out.size() == 3);
    CHECK(out[0].src_device == "a");
    CHECK(out[1].src_device == "b");
    CHECK(out[2].src_device == "c");
    CHECK(table.size() == 0);
    CHECK(table.flush().empty());
}

TEST_CASE("tcp-only mode bypasses the table for other protocols") {
    PortFrequencyTable none;
    StitchConfig cfg;
    cfg.tcp_only = true;
    StitchTable table(cfg);
    auto out1 = table.ingest(decide_direction(uf(0, 1, "a", "b", 17, 123, 123, 5, 50), none));
    REQUIRE(out1.size() == 1);  // emitted immediately, unstitched
    CHECK(out1[0].src_packets == 5);
    auto out2 = table.ingest(decide_direction(uf(0, 1, "a", "b", 6, 50000, 443, 1, 1), none));
    CHECK(out2.empty());
    CHECK(table.size() == 1);
    table.flush();
}

TEST_CASE("conservation holds for random streams") {
    std::mt19937_64 rng(41);
    PortFrequencyTable freq({443, 53});
    for (int round = 0; round < 20; ++round) {
        std::vector<UniflowRecord> flows;
        std::uint64_t pkts_in = 0, bytes_in = 0;
        for (int i = 0; i < 500; ++i) {
            UniflowRecord f;
            f.start_time = static_cast<std::int64_t>(rng() % 20000);
            f.end_time = f.start_time + static_cast<std::int64_t>(rng() % 500);
            f.src_ip = "d" + std::to_string(rng() % 6);
            f.dst_ip = "d" + std::to_string(rng() % 6);
            int pick = static_cast<int>(rng() % 4);
            f.protocol = pick == 0 ? 1 : (pick == 1 ? 17 : 6);
            f.src_port = static_cast<std::uint16_t>(rng() % 4 == 0 ? 443 : rng() % 65536);
            f.dst_port = static_cast<std::uint16_t>(rng() % 4 == 0 ? 443 : rng() % 65536);
            f.packets = rng() % 50;
            f.bytes = rng() % 5000;
            pkts_in += f.packets;
            bytes_in += f.bytes;
            flows.push_back(std::move(f));
        }
        auto out = run_all(flows, {}, freq);
        std::uint64_t pkts_out = 0, bytes_out = 0;
        for (const auto& b : out) {
            pkts_out += b.src_packets + b.dst_packets;
            bytes_out += b.src_bytes + b.dst_bytes;
        }
        CHECK(pkts_out == pkts_in);
        CHECK(bytes_out == bytes_in);
        CHECK(out.size() <= flows.size());
    }
}

TEST_CASE("streaming output equals the batch oracle on adversarial streams") {
    std::mt19937_64 rng(1234);
    PortFrequencyTable freq({443, 8080});
    for (int round = 0; round < 30; ++round) {
        StitchConfig cfg;
        cfg.inactivity_timeout = 300 + static_cast<std::int64_t>(rng() % 1500);
        cfg.report_interval = 1200 + static_cast<std::int64_t>(rng() % 9600);
        std::vector<UniflowRecord> flows;
        std::int64_t t = 0;
        for (int i = 0; i < 800; ++i) {
            UniflowRecord f;
            // mostly forward-moving with jitter, occasional large gaps
            t += static_cast<std::int64_t>(rng() % 50);
            if (rng() % 97 == 0) t += 4000;
            f.start_time = std::max<std::int64_t>(0, t - static_cast<std::int64_t>(rng() % 400));
            f.end_time = t;
            f.src_ip = "d" + std::to_string(rng() % 4);
            f.dst_ip = "d" + std::to_string(rng() % 4);
            f.protocol = rng() % 5 == 0 ? 17 : 6;
            f.src_port = static_cast<std::uint16_t>(49152 + rng() % 8);
            f.dst_port = static_cast<std::uint16_t>(rng() % 3 == 0 ? 443 : 5000 + rng() % 4);
            f.packets = rng() % 20;
            f.bytes = rng() % 2000;
            flows.push_back(std::move(f));
        }
        auto streaming = stitch_oracle::sorted(run_all(flows, cfg, freq));
        auto batch = stitch_oracle::sorted(stitch_oracle::stitch(flows, freq, cfg));
        REQUIRE(streaming.size() == batch.size());
        CHECK(streaming == batch);
    }
}

TEST_CASE("oracle equivalence with long-lived sessions and interim reports") {
    PortFrequencyTable none;
    StitchConfig cfg;
    std::vector<UniflowRecord> flows;
    // a 7-hour session reporting twice, interleaved with unrelated traffic
    for (std::int64_t t = 0; t <= 7 * 3600; t += 600) {
        flows.push_back(uf(t, t + 120, "a", "b", 6, 49152, 443, 3, 300));
        flows.push_back(uf(t + 5, t + 50, "c", "d", 6, 50001, 443, 1, 10));
    }
    auto streaming = stitch_oracle::sorted(run_all(flows, cfg, none));
    auto batch = stitch_oracle::sorted(stitch_oracle::stitch(flows, none, cfg));
    CHECK(streaming == batch);
    // the long session must have produced at least two interim segments
    int segments = 0;
    for (const auto& b : streaming) {
        if (b.src_device == "a") ++segments;
    }
    CHECK(segments >= 2);
}

TEST_CASE("per-entry time bounds cover the constituents") {
    PortFrequencyTable none;
    StitchTable table({});
    table.ingest(decide_direction(uf(50, 80, "a", "b", 6, 50000, 443, 1, 1), none));
    table.ingest(decide_direction(uf(20, 60, "a", "b", 6, 50000, 443, 1, 1), none));
    table.ingest(decide_direction(uf(30, 95, "b", "a", 6, 443, 50000, 1, 1), none));
    auto out = table.flush();
    REQUIRE(out.size() == 1);
    CHECK(out[0].time == 20);                       // min start
    CHECK(out[0].time + out[0].duration == 95);     // max end
}
