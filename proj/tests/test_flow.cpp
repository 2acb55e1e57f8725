#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "flowstitch/flow.hpp"
#include "flowstitch/util.hpp"

using namespace flowstitch;

TEST_CASE("parse_uniflow maps the nine fields in order") {
    UniflowRecord r = parse_uniflow("10,20,a,b,6,49152,443,5,500");
    CHECK(r.start_time == 10);
    CHECK(r.end_time == 20);
    CHECK(r.src_ip == "a");
    CHECK(r.dst_ip == "b");
    CHECK(r.protocol == 6);
    CHECK(r.src_port == 49152);
    CHECK(r.dst_port == 443);
    CHECK(r.packets == 5);
    CHECK(r.bytes == 500);
}

TEST_CASE("parse_uniflow rejects start after end") {
    CHECK_THROWS_WITH_AS(parse_uniflow("10,9,a,b,6,1,2,1,1", 3),
                         "line 3: StartTime: start after end (10 > 9)", ParseError);
}

TEST_CASE("parse_uniflow rejects protocol out of range") {
    CHECK_THROWS_AS(parse_uniflow("10,20,a,b,300,1,2,1,1"), ParseError);
    CHECK_THROWS_AS(parse_uniflow("10,20,a,b,-1,1,2,1,1"), ParseError);
}

TEST_CASE("parse_uniflow rejects bad field counts and non-numeric fields") {
    CHECK_THROWS_AS(parse_uniflow("10,20,a,b,6,1,2,1"), ParseError);
    CHECK_THROWS_AS(parse_uniflow("10,20,a,b,6,1,2,1,1,9"), ParseError);
    CHECK_THROWS_AS(parse_uniflow("x,20,a,b,6,1,2,1,1"), ParseError);
    CHECK_THROWS_AS(parse_uniflow("10,20,a,b,6,1,2,-1,1"), ParseError);
    CHECK_THROWS_AS(parse_uniflow("10,20,a,b,6,70000,2,1,1"), ParseError);
    CHECK_THROWS_AS(parse_uniflow("10,20,,b,6,1,2,1,1"), ParseError);
}

TEST_CASE("parse errors carry the line number and field name") {
    try {
        parse_uniflow("10,20,a,b,6,1,2,zz,1", 41);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line_no() == 41);
        CHECK(std::string(e.what()).find("line 41") != std::string::npos);
        CHECK(std::string(e.what()).find("Packets") != std::string::npos);
    }
}

TEST_CASE("sub-second precision is dropped on input") {
    UniflowRecord r = parse_uniflow("10.75,20.2,a,b,6,1,2,1,1");
    CHECK(r.start_time == 10);
    CHECK(r.end_time == 20);
    CHECK_THROWS_AS(parse_uniflow("10.x,20,a,b,6,1,2,1,1"), ParseError);
    // counts have no fractional form
    CHECK_THROWS_AS(parse_uniflow("10,20,a,b,6,1,2,1.5,1"), ParseError);
}

TEST_CASE("serialize_biflow writes the output table order") {
    BiflowRecord b{10, 10, "Comp000001", "Comp000002", 6, "Port12345", "443", 5, 4, 500, 400};
    CHECK(serialize_biflow(b) == "10,10,Comp000001,Comp000002,6,Port12345,443,5,4,500,400");
}

TEST_CASE("zero-duration biflow serializes duration as 0") {
    BiflowRecord b{10, 0, "a", "b", 6, "1", "2", 1, 0, 1, 0};
    CHECK(serialize_biflow(b).substr(0, 5) == "10,0,");
    CHECK(parse_biflow(serialize_biflow(b)) == b);
}

TEST_CASE("biflow codec rejects malformed rows") {
    CHECK_THROWS_AS(parse_biflow("10,10,a,b,6,1,2,1,1,1"), ParseError);        // 10 fields
    CHECK_THROWS_AS(parse_biflow("10,-1,a,b,6,1,2,1,1,1,1"), ParseError);      // negative duration
    CHECK_THROWS_AS(parse_biflow("10,1,a,b,600,1,2,1,1,1,1"), ParseError);     // protocol range
    CHECK_THROWS_AS(parse_biflow("10,1,a,b,6,1,2,x,1,1,1"), ParseError);       // non-numeric
}

TEST_CASE("round trips are the identity on random valid records") {
    std::mt19937_64 rng(7);
    auto name = [&](int n) { return "dev" + std::to_string(n); };
    for (int i = 0; i < 2000; ++i) {
        UniflowRecord u;
        u.start_time = static_cast<std::int64_t>(rng() % 1000000);
        u.end_time = u.start_time + static_cast<std::int64_t>(rng() % 10000);
        u.src_ip = name(static_cast<int>(rng() % 50));
        u.dst_ip = name(static_cast<int>(rng() % 50));
        u.protocol = static_cast<int>(rng() % 256);
        u.src_port = static_cast<std::uint16_t>(rng());
        u.dst_port = static_cast<std::uint16_t>(rng());
        u.packets = rng() % 100000;
        u.bytes = rng() % 10000000;
        CHECK(parse_uniflow(serialize_uniflow(u)) == u);

        BiflowRecord b;
        b.time = static_cast<std::int64_t>(rng() % 1000000);
        b.duration = static_cast<std::int64_t>(rng() % 100000);
        b.src_device = name(static_cast<int>(rng() % 50));
        b.dst_device = name(static_cast<int>(rng() % 50));
        b.protocol = static_cast<int>(rng() % 256);
        b.src_port = rng() % 2 ? std::to_string(rng() % 65536)
                               : "Port" + zero_pad(rng() % 100000, 5);
        b.dst_port = std::to_string(rng() % 65536);
        b.src_packets = rng() % 100000;
        b.dst_packets = rng() % 100000;
        b.src_bytes = rng() % 10000000;
        b.dst_bytes = rng() % 10000000;
        CHECK(parse_biflow(serialize_biflow(b)) == b);
    }
}

TEST_CASE("mirror swaps every directional field and is an involution") {
    BiflowRecord b{1, 2, "a", "b", 6, "10", "20", 3, 4, 5, 6};
    BiflowRecord m = mirror(b);
    CHECK(m.src_device == "b");
    CHECK(m.dst_device == "a");
    CHECK(m.src_port == "20");
    CHECK(m.dst_port == "10");
    CHECK(m.src_packets == 4);
    CHECK(m.dst_packets == 3);
    CHECK(m.src_bytes == 6);
    CHECK(m.dst_bytes == 5);
    CHECK(m.time == 1);
    CHECK(m.duration == 2);
    CHECK(mirror(m) == b);
}

TEST_CASE("ip literal detection") {
    CHECK(is_ip_literal("10.1.2.3"));
    CHECK(is_ip_literal("255.255.255.255"));
    CHECK(is_ip_literal("fe80::1"));
    CHECK_FALSE(is_ip_literal("256.1.1.1"));
    CHECK_FALSE(is_ip_literal("host0001"));
    CHECK_FALSE(is_ip_literal("10.1.2"));
    CHECK_FALSE(is_ip_literal("10.1.2.3.4"));
    CHECK_FALSE(is_ip_literal("a.b.c.d"));
    CHECK_FALSE(is_ip_literal(""));
}

TEST_CASE("epoch day floor division") {
    CHECK(epoch_day(0) == 0);
    CHECK(epoch_day(86399) == 0);
    CHECK(epoch_day(86400) == 1);
    CHECK(epoch_day(86401) == 1);
    CHECK(epoch_day(-1) == -1);
}
