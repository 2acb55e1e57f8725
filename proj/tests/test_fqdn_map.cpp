#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "flowstitch/fqdn_map.hpp"
#include "flowstitch/util.hpp"

using namespace flowstitch;

TEST_CASE("containment lookup over one interval") {
    TemporalIpMap map;
    map.add({"10.0.0.1", "h", 0, 100, 0});
    CHECK(map.resolve("10.0.0.1", 50) == "h");
    CHECK(map.resolve("10.0.0.1", 0) == "h");    // inclusive start
    CHECK(map.resolve("10.0.0.1", 100) == "h");  // inclusive end
    CHECK_FALSE(map.resolve("10.0.0.1", 101).has_value());
    CHECK_FALSE(map.resolve("10.0.0.2", 50).has_value());
}

TEST_CASE("overlapping intervals are both retained as candidates") {
    TemporalIpMap map;
    map.add({"a", "h1", 0, 100, 0});
    map.add({"a", "h2", 0, 100, 1});
    CHECK(map.interval_count() == 2);
    CHECK(map.resolve("a", 50) == "h1");  // least-ephemeral preference
    map.add({"a", "h3", 200, 300, 1});
    CHECK(map.resolve("a", 250) == "h3");  // rank 0 name out of range by then
}

TEST_CASE("empty map resolves nothing") {
    TemporalIpMap map;
    CHECK_FALSE(map.resolve("a", 0).has_value());
    CHECK(map.ip_count() == 0);
}

TEST_CASE("rank ties break on interval length then name") {
    TemporalIpMap map;
    map.add({"a", "h2", 0, 10, 0});
    map.add({"a", "h1", 0, 100, 0});
    CHECK(map.resolve("a", 5) == "h1");  // longer interval wins

    TemporalIpMap tie;
    tie.add({"a", "zeta", 0, 100, 0});
    tie.add({"a", "alpha", 0, 100, 0});
    CHECK(tie.resolve("a", 5) == "alpha");  // lexicographic last
}

TEST_CASE("tie-break matches an enumeration oracle") {
    std::mt19937_64 rng(99);
    for (int round = 0; round < 200; ++round) {
        std::vector<MappingInterval> candidates;
        int count = 1 + static_cast<int>(rng() % 6);
        for (int i = 0; i < count; ++i) {
            std::int64_t from = static_cast<std::int64_t>(rng() % 50);
            candidates.push_back({"a", "h" + std::to_string(rng() % 8), from,
                                  from + static_cast<std::int64_t>(rng() % 100),
                                  static_cast<int>(rng() % 3)});
        }
        std::int64_t t = static_cast<std::int64_t>(rng() % 120);
        TemporalIpMap map;
        for (const auto& c : candidates) map.add(c);

        // brute force over the candidate set
        const MappingInterval* best = nullptr;
        for (const auto& c : candidates) {
            if (t < c.valid_from || t > c.valid_to) continue;
            if (!best) {
                best = &c;
                continue;
            }
            auto better = [&](const MappingInterval& x, const MappingInterval& y) {
                if (x.rank != y.rank) return x.rank < y.rank;
                auto xlen = x.valid_to - x.valid_from;
                auto ylen = y.valid_to - y.valid_from;
                if (xlen != ylen) return xlen > ylen;
                return x.fqdn < y.fqdn;
            };
            if (better(c, *best)) best = &c;
        }
        auto got = map.resolve("a", t);
        if (best == nullptr) {
            CHECK_FALSE(got.has_value());
        } else {
            CHECK(got == best->fqdn);
        }
    }
}

TEST_CASE("load_mappings validates rows with line diagnostics") {
    std::istringstream good("10.0.0.1,h1,0,100,0\n10.0.0.2,h2,50,60,1\n");
    TemporalIpMap map = load_mappings(good);
    CHECK(map.ip_count() == 2);

    std::istringstream inverted("10.0.0.1,h1,100,0,0\n");
    CHECK_THROWS_AS(load_mappings(inverted), ParseError);

    std::istringstream short_row("10.0.0.1,h1,0,100\n");
    CHECK_THROWS_AS(load_mappings(short_row), ParseError);

    std::istringstream bad_rank("10.0.0.1,h1,0,100,-2\n");
    CHECK_THROWS_AS(load_mappings(bad_rank), ParseError);

    try {
        std::istringstream bad("10.0.0.1,h1,0,100,0\nx,y,a,b,c\n");
        load_mappings(bad);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line_no() == 2);
    }
}

TEST_CASE("apply_to_biflow resolves at the flow start time and nothing else") {
    TemporalIpMap map;
    map.add({"10.0.0.1", "alpha", 0, 100, 0});
    map.add({"10.0.0.2", "beta", 0, 100, 0});
    map.add({"10.0.0.2", "gamma", 101, 200, 0});

    BiflowRecord b{90, 50, "10.0.0.1", "10.0.0.2", 6, "50000", "443", 1, 2, 3, 4};
    BiflowRecord r = apply_to_biflow(b, map);
    CHECK(r.src_device == "alpha");
    CHECK(r.dst_device == "beta");  // start time 90, not end time 140
    CHECK(r.time == b.time);
    CHECK(r.duration == b.duration);
    CHECK(r.src_port == b.src_port);
    CHECK(r.dst_port == b.dst_port);
    CHECK(r.src_packets == b.src_packets);

    // a failing side stays as the address literal
    BiflowRecord half{90, 0, "10.0.0.1", "10.9.9.9", 6, "1", "2", 1, 1, 1, 1};
    BiflowRecord hr = apply_to_biflow(half, map);
    CHECK(hr.src_device == "alpha");
    CHECK(hr.dst_device == "10.9.9.9");
}

TEST_CASE("resolution is deterministic") {
    TemporalIpMap map;
    map.add({"a", "h1", 0, 100, 1});
    map.add({"a", "h2", 0, 100, 1});
    auto first = map.resolve("a", 10);
    for (int i = 0; i < 100; ++i) CHECK(map.resolve("a", 10) == first);
}
