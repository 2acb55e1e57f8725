#include "flowstitch/synthgen.hpp"

#include <algorithm>
#include <istream>
#include <random>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "flowstitch/hostlog.hpp"
#include "flowstitch/util.hpp"

namespace flowstitch {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// One named substream of the master seed. Draw order is part of the
/// determinism contract; never reorder draws.
class SplitRng {
public:
    SplitRng(std::uint64_t seed, std::string_view tag)
        : engine_(splitmix64(seed ^ fnv1a64(tag))) {}

    std::uint64_t next() { return engine_(); }
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }
    // [0, 1)
    double frac() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

struct Device {
    std::string ip;
    std::string name;
    bool resolved = true;
    bool windows = true;
};

std::vector<Device> build_devices(const GenConfig& cfg) {
    SplitRng rng(cfg.seed, "devices");
    std::vector<Device> devices;
    devices.reserve(static_cast<std::size_t>(cfg.devices));
    for (int i = 0; i < cfg.devices; ++i) {
        Device d;
        d.ip = "10." + std::to_string(i / 256 % 256) + "." + std::to_string(i % 256) + ".5";
        if (i == 0) {
            d.name = "ActiveDirectory";  // core enterprise host, released as-is
            d.resolved = true;
            d.windows = true;
        } else {
            d.name = "host" + zero_pad(static_cast<std::uint64_t>(i), 4);
            d.resolved = rng.frac() >= cfg.unresolved_fraction;
            d.windows = rng.frac() >= cfg.nonwindows_fraction;
        }
        devices.push_back(std::move(d));
    }
    return devices;
}

const std::vector<std::uint16_t>& tcp_service_ports() {
    static const std::vector<std::uint16_t> ports = {22,  25,  80,   88,   135, 389, 443,
                                                     445, 636, 3268, 3389, 5985, 8080};
    return ports;
}

const std::vector<std::uint16_t>& udp_service_ports() {
    static const std::vector<std::uint16_t> ports = {53, 88, 123, 137, 161, 389, 514};
    return ports;
}

struct SubflowPlan {
    std::int64_t start;
    std::int64_t end;
    std::uint64_t packets;
    std::uint64_t bytes;
};

// Long sessions export periodic partial records (< timeout apart) so the
// stitched entry stays active; counters split exactly.
std::vector<SubflowPlan> plan_subflows(std::int64_t start, std::int64_t duration,
                                       std::uint64_t packets, std::uint64_t bytes) {
    std::vector<SubflowPlan> plan;
    std::int64_t segments = duration >= 1500 ? duration / 900 + 1 : 1;
    std::uint64_t useg = static_cast<std::uint64_t>(segments);
    for (std::int64_t k = 0; k < segments; ++k) {
        SubflowPlan p;
        p.start = start + k * duration / segments;
        p.end = start + (k + 1) * duration / segments;
        std::uint64_t uk = static_cast<std::uint64_t>(k);
        p.packets = packets / useg + (uk < packets % useg ? 1 : 0);
        p.bytes = bytes / useg + (uk < bytes % useg ? 1 : 0);
        plan.push_back(p);
    }
    return plan;
}

struct ArrivalRecord {
    std::int64_t arrival;
    std::size_t order;
    UniflowRecord record;
};

}  // namespace

GenConfig GenConfig::from_json(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(0, "", std::string("profile: ") + e.what());
    }
    GenConfig cfg;
    auto get = [&](const char* key, auto& field) {
        if (doc.contains(key)) field = doc[key].get<std::decay_t<decltype(field)>>();
    };
    get("seed", cfg.seed);
    get("sessions", cfg.sessions);
    get("devices", cfg.devices);
    get("users", cfg.users);
    get("duplication", cfg.duplication);
    get("reverse_drop", cfg.reverse_drop);
    get("long_flow_prob", cfg.long_flow_prob);
    get("long_flow_secs", cfg.long_flow_secs);
    get("jitter", cfg.jitter);
    get("w_tcp", cfg.w_tcp);
    get("w_udp", cfg.w_udp);
    get("w_icmp", cfg.w_icmp);
    get("scan_prob", cfg.scan_prob);
    get("scan_targets", cfg.scan_targets);
    get("start_time", cfg.start_time);
    get("window_days", cfg.window_days);
    get("unresolved_fraction", cfg.unresolved_fraction);
    get("multi_name_fraction", cfg.multi_name_fraction);
    get("nonwindows_fraction", cfg.nonwindows_fraction);
    get("host_chains", cfg.host_chains);
    get("process_pairs", cfg.process_pairs);
    get("renewal_hosts", cfg.renewal_hosts);
    get("renewal_period_hours", cfg.renewal_period_hours);
    get("decorated_fraction", cfg.decorated_fraction);
    get("variant_name_fraction", cfg.variant_name_fraction);
    get("junk_attr_fraction", cfg.junk_attr_fraction);
    return cfg;
}

NetworkData generate_network(const GenConfig& cfg) {
    NetworkData data;
    std::vector<Device> devices = build_devices(cfg);
    const std::int64_t window = static_cast<std::int64_t>(cfg.window_days) * 86400;

    SplitRng map_rng(cfg.seed, "mappings");
    for (const Device& d : devices) {
        if (!d.resolved) continue;
        data.mappings.push_back(
            {d.ip, d.name, cfg.start_time - 86400, cfg.start_time + window + 86400, 0});
        if (map_rng.frac() < cfg.multi_name_fraction) {
            std::string lease = "dhcp-" + d.name;
            std::int64_t lease_start = cfg.start_time + static_cast<std::int64_t>(
                                                            map_rng.below(86400));
            data.mappings.push_back({d.ip, lease, lease_start, lease_start + 7 * 86400, 1});
        }
    }

    SplitRng rng(cfg.seed, "network");
    std::vector<ArrivalRecord> arrivals;
    std::size_t order = 0;

    auto emit = [&](const UniflowRecord& r) {
        std::int64_t arrival =
            r.end_time + (cfg.jitter > 0
                              ? static_cast<std::int64_t>(rng.below(
                                    static_cast<std::uint64_t>(cfg.jitter) + 1))
                              : 0);
        arrivals.push_back({arrival, order++, r});
    };

    auto emit_session = [&](std::size_t client, std::size_t server, int protocol,
                            std::uint16_t client_port, std::uint16_t server_port,
                            std::int64_t start, std::int64_t duration, std::uint64_t fwd_pkts,
                            std::uint64_t fwd_bytes, std::uint64_t rev_pkts,
                            std::uint64_t rev_bytes, int dup_factor, bool reverse_dropped) {
        GroundTruthSession truth;
        truth.initiator = devices[client].ip;
        truth.responder = devices[server].ip;
        truth.tuple = {devices[client].ip, devices[server].ip, client_port, server_port,
                       protocol};
        truth.start = start;
        truth.end = start + duration;
        truth.dup_factor = dup_factor;
        truth.reverse_dropped = reverse_dropped;
        std::uint64_t dup = static_cast<std::uint64_t>(dup_factor);
        truth.fwd_packets = fwd_pkts * dup;
        truth.fwd_bytes = fwd_bytes * dup;
        truth.rev_packets = reverse_dropped ? 0 : rev_pkts * dup;
        truth.rev_bytes = reverse_dropped ? 0 : rev_bytes * dup;

        for (const SubflowPlan& p : plan_subflows(start, duration, fwd_pkts, fwd_bytes)) {
            UniflowRecord r{p.start,     p.end,       devices[client].ip, devices[server].ip,
                            protocol,    client_port, server_port,        p.packets,
                            p.bytes};
            for (int c = 0; c < dup_factor; ++c) emit(r);
        }
        if (!reverse_dropped) {
            for (const SubflowPlan& p : plan_subflows(start, duration, rev_pkts, rev_bytes)) {
                UniflowRecord r{p.start,     p.end,       devices[server].ip, devices[client].ip,
                                protocol,    server_port, client_port,        p.packets,
                                p.bytes};
                for (int c = 0; c < dup_factor; ++c) emit(r);
            }
        }
        data.truth.push_back(std::move(truth));
    };

    const std::size_t device_count = devices.size();
    for (int s = 0; s < cfg.sessions; ++s) {
        if (cfg.scan_prob > 0 && rng.frac() < cfg.scan_prob) {
            // A scanner probing a range: one-sided, one packet, no answer.
            std::size_t scanner = rng.below(device_count);
            std::size_t base = rng.below(device_count);
            std::int64_t scan_span = std::max<std::int64_t>(window - 3600, 1);
            std::int64_t t = cfg.start_time + static_cast<std::int64_t>(rng.below(
                                                  static_cast<std::uint64_t>(scan_span)));
            std::uint16_t probe_port = 445;
            for (int k = 0; k < cfg.scan_targets; ++k) {
                std::size_t target = (base + static_cast<std::size_t>(k)) % device_count;
                if (target == scanner) continue;
                std::uint16_t sport = static_cast<std::uint16_t>(49152 + rng.below(16384));
                emit_session(scanner, target, 6, sport, probe_port, t + k,
                             static_cast<std::int64_t>(rng.below(2)), 1 + rng.below(2),
                             40 + rng.below(80), 0, 0, 1, true);
            }
            continue;
        }

        std::size_t client = rng.below(device_count);
        std::size_t server = rng.below(device_count);
        while (server == client) server = (server + 1) % device_count;

        double pr = rng.frac();
        int protocol = pr < cfg.w_tcp ? 6 : (pr < cfg.w_tcp + cfg.w_udp ? 17 : 1);
        std::uint16_t server_port = 0;
        std::uint16_t client_port = 0;
        if (protocol == 6) {
            const auto& pool = tcp_service_ports();
            server_port = pool[rng.below(pool.size())];
            client_port = static_cast<std::uint16_t>(49152 + rng.below(16384));
        } else if (protocol == 17) {
            const auto& pool = udp_service_ports();
            server_port = pool[rng.below(pool.size())];
            // NTP peers talk 123 to 123.
            client_port = (server_port == 123 && rng.frac() < 0.5)
                              ? static_cast<std::uint16_t>(123)
                              : static_cast<std::uint16_t>(49152 + rng.below(16384));
        }

        std::int64_t duration = rng.frac() < cfg.long_flow_prob
                                    ? cfg.long_flow_secs +
                                          static_cast<std::int64_t>(rng.below(
                                              static_cast<std::uint64_t>(cfg.long_flow_secs / 2 +
                                                                         1)))
                                    : static_cast<std::int64_t>(rng.below(180));
        std::int64_t span = window - duration - cfg.jitter - 1;
        if (span < 1) span = 1;
        std::int64_t start = cfg.start_time +
                             static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(span)));

        std::uint64_t fwd_pkts = 1 + rng.below(60);
        std::uint64_t fwd_bytes = fwd_pkts * (40 + rng.below(1400));
        std::uint64_t rev_pkts = 1 + rng.below(80);
        std::uint64_t rev_bytes = rev_pkts * (40 + rng.below(1400));
        bool reverse_dropped = rng.frac() < cfg.reverse_drop;
        int dup_factor = rng.frac() < cfg.duplication ? 2 : 1;

        emit_session(client, server, protocol, client_port, server_port, start, duration,
                     fwd_pkts, fwd_bytes, rev_pkts, rev_bytes, dup_factor, reverse_dropped);
    }

    std::stable_sort(arrivals.begin(), arrivals.end(),
                     [](const ArrivalRecord& a, const ArrivalRecord& b) {
                         if (a.arrival != b.arrival) return a.arrival < b.arrival;
                         return a.order < b.order;
                     });
    data.uniflows.reserve(arrivals.size());
    for (auto& a : arrivals) data.uniflows.push_back(std::move(a.record));
    return data;
}

namespace {

struct PendingEvent {
    std::int64_t time;
    std::size_t order;
    std::string json;
};

class HostEventBuilder {
public:
    HostEventBuilder(const GenConfig& cfg, SplitRng& rng) : cfg_(cfg), rng_(rng) {}

    /// Assembles one raw record; applies variant attribute spellings and
    /// username decorations per the configured fractions.
    void emit(std::vector<PendingEvent>& out, std::int64_t time, int event_id,
              const std::string& log_host, nlohmann::ordered_json fields) {
        nlohmann::ordered_json doc;
        doc["Time"] = time;
        doc["EventID"] = event_id;
        doc["LogHost"] = log_host;
        bool variant = rng_.frac() < cfg_.variant_name_fraction;
        for (auto& [key, value] : fields.items()) {
            std::string name = key;
            if (variant && event_id != 4774) {
                if (name == "UserName") name = "TargetUserName";
                else if (name == "DomainName") name = "TargetDomainName";
                else if (name == "LogonID") name = "TargetLogonId";
                else if (name == "AuthenticationPackage") name = "AuthenticationPackageName";
            }
            if ((name == "UserName" || name == "TargetUserName" || name == "MappedName") &&
                value.is_string() && rng_.frac() < cfg_.decorated_fraction) {
                std::string user = value.get<std::string>();
                value = rng_.frac() < 0.5 ? "DOM1\\" + user : user + "@dom1.corp";
            }
            doc[name] = value;
        }
        if (rng_.frac() < cfg_.junk_attr_fraction) {
            if (event_id == 4688) {
                doc["LogonType"] = 3;  // outside the 4688 row, must be dropped
            } else {
                doc["ElevatedToken"] = "%%1842";
            }
        }
        out.push_back({time, order_++, doc.dump()});
    }

private:
    const GenConfig& cfg_;
    SplitRng& rng_;
    std::size_t order_ = 0;
};

std::string strip_extension(const std::string& name) {
    std::size_t dot = name.find_last_of('.');
    if (dot == std::string::npos || dot == 0) return name;
    return name.substr(0, dot);
}

}  // namespace

HostData generate_host_events(const GenConfig& cfg) {
    HostData data;
    std::vector<Device> devices = build_devices(cfg);
    std::vector<std::string> windows_hosts;
    for (const Device& d : devices) {
        if (d.windows) windows_hosts.push_back(d.name);
    }
    if (windows_hosts.empty()) windows_hosts.push_back("ActiveDirectory");
    const std::string ad = "ActiveDirectory";
    const std::int64_t window = static_cast<std::int64_t>(cfg.window_days) * 86400;

    SplitRng rng(cfg.seed, "host");
    HostEventBuilder build(cfg, rng);
    std::vector<PendingEvent> pending;

    auto hex_id = [&]() {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "0x%llx",
                      static_cast<unsigned long long>(0x100 + rng.below(0xfffff)));
        return std::string(buf);
    };
    auto user_name = [&](std::uint64_t u) { return "user" + zero_pad(u, 4); };
    auto host_ip = [&](const std::string& host) -> std::string {
        for (const Device& d : devices) {
            if (d.name == host) return d.ip;
        }
        return host;
    };
    auto source_of = [&](const std::string& host) {
        // Network logons often record the source as a raw address.
        return rng.frac() < 0.3 ? host_ip(host) : host;
    };

    // Boot/shutdown markers per logging host.
    for (std::size_t i = 0; i < windows_hosts.size(); ++i) {
        std::int64_t boot = cfg.start_time + static_cast<std::int64_t>(i);
        build.emit(pending, boot, 4608, windows_hosts[i], {});
        std::int64_t down = cfg.start_time + window - 60 - static_cast<std::int64_t>(i);
        build.emit(pending, down, rng.frac() < 0.5 ? 4609 : 1100, windows_hosts[i], {});
    }

    // Periodic machine credential renewals (the dominant periodicity in the
    // event time series).
    std::int64_t period = static_cast<std::int64_t>(cfg.renewal_period_hours * 3600.0);
    if (period < 600) period = 600;
    for (int h = 0; h < cfg.renewal_hosts && h < static_cast<int>(windows_hosts.size()); ++h) {
        const std::string& host = windows_hosts[static_cast<std::size_t>(h)];
        std::string account = host + "$";
        for (std::int64_t t = cfg.start_time + 300 + h; t < cfg.start_time + window;
             t += period) {
            build.emit(pending, t, 4768, ad,
                       {{"UserName", account},
                        {"DomainName", "dom1"},
                        {"Status", "0x0"},
                        {"Source", source_of(host)}});
            build.emit(pending, t + 1, 4770, ad,
                       {{"UserName", account},
                        {"DomainName", "dom1"},
                        {"ServiceName", "krbtgt"},
                        {"Source", source_of(host)}});
            build.emit(pending, t + 2, 4624, ad,
                       {{"LogonType", 3},
                        {"LogonTypeDescription", logon_type_description(3)},
                        {"UserName", account},
                        {"DomainName", "dom1"},
                        {"LogonID", hex_id()},
                        {"Source", source_of(host)},
                        {"AuthenticationPackage", "Kerberos"}});
        }
    }

    // Authentication chains: TGT and TGS at the directory host, then a
    // network logon at the target named by the service ticket.
    for (int c = 0; c < cfg.host_chains; ++c) {
        std::uint64_t u = rng.below(static_cast<std::uint64_t>(std::max(cfg.users, 1)));
        std::string user = user_name(u);
        const std::string& workstation =
            windows_hosts[u % windows_hosts.size()];
        const std::string& target = windows_hosts[rng.below(windows_hosts.size())];
        std::string domain = rng.frac() < 0.9 ? "dom1" : "dom2";
        std::int64_t t = cfg.start_time + 3600 +
                         static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(
                             std::max<std::int64_t>(window - 7200, 1))));
        std::string logon_id = hex_id();

        build.emit(pending, t, 4768, ad,
                   {{"UserName", user},
                    {"DomainName", domain},
                    {"Status", "0x0"},
                    {"Source", source_of(workstation)}});
        build.emit(pending, t + 1, 4769, ad,
                   {{"UserName", user},
                    {"DomainName", domain},
                    {"ServiceName", target + "$"},
                    {"Status", "0x0"},
                    {"Source", source_of(workstation)}});
        build.emit(pending, t + 2, 4624, target,
                   {{"LogonType", 3},
                    {"LogonTypeDescription", logon_type_description(3)},
                    {"UserName", user},
                    {"DomainName", domain},
                    {"LogonID", logon_id},
                    {"Source", source_of(workstation)},
                    {"AuthenticationPackage", "Kerberos"}});
        if (rng.frac() < 0.4) {
            build.emit(pending, t + 2, 4672, target,
                       {{"UserName", user}, {"DomainName", domain}, {"LogonID", logon_id}});
        }
        std::int64_t session_len = 60 + static_cast<std::int64_t>(rng.below(7200));
        build.emit(pending, t + 2 + session_len, 4634, target,
                   {{"LogonType", 3},
                    {"LogonTypeDescription", logon_type_description(3)},
                    {"UserName", user},
                    {"DomainName", domain},
                    {"LogonID", logon_id}});

        if (rng.frac() < 0.5) {
            // Interactive day at the workstation.
            std::string local_id = hex_id();
            build.emit(pending, t + 5, 4624, workstation,
                       {{"LogonType", 2},
                        {"LogonTypeDescription", logon_type_description(2)},
                        {"UserName", user},
                        {"DomainName", domain},
                        {"LogonID", local_id},
                        {"Source", workstation},
                        {"AuthenticationPackage", "Negotiate"}});
            build.emit(pending, t + 1800, 4800, workstation,
                       {{"UserName", user}, {"DomainName", domain}, {"LogonID", local_id}});
            build.emit(pending, t + 1805, 4802, workstation,
                       {{"UserName", user}, {"DomainName", domain}, {"LogonID", local_id}});
            build.emit(pending, t + 3600, 4803, workstation,
                       {{"UserName", user}, {"DomainName", domain}, {"LogonID", local_id}});
            build.emit(pending, t + 3605, 4801, workstation,
                       {{"UserName", user}, {"DomainName", domain}, {"LogonID", local_id}});
            build.emit(pending, t + 7200, 4647, workstation,
                       {{"UserName", user}, {"DomainName", domain}, {"LogonID", local_id}});
        }
        if (rng.frac() < 0.15) {
            build.emit(pending, t + 10, 4625, target,
                       {{"LogonType", 3},
                        {"LogonTypeDescription", logon_type_description(3)},
                        {"UserName", user},
                        {"DomainName", domain},
                        {"LogonID", hex_id()},
                        {"Source", source_of(workstation)},
                        {"AuthenticationPackage", "NTLM"},
                        {"FailureReason", "%%2313"}});
        }
        if (rng.frac() < 0.15) {
            build.emit(pending, t + 12, 4648, workstation,
                       {{"UserName", user},
                        {"DomainName", domain},
                        {"LogonID", hex_id()},
                        {"SubjectUserName", "Administrator"},
                        {"SubjectDomainName", workstation},
                        {"SubjectLogonID", hex_id()},
                        {"Source", workstation},
                        {"Destination", target},
                        {"ProcessName", "runas.exe"},
                        {"ProcessID", 0x4c0}});
        }
        if (rng.frac() < 0.1) {
            build.emit(pending, t + 14, 4774, ad,
                       {{"MappedName", user},
                        {"SubjectUserName", user},
                        {"SubjectDomainName", domain}});
        }
        if (rng.frac() < 0.1) {
            build.emit(pending, t + 16, 4776, ad,
                       {{"UserName", user},
                        {"DomainName", domain},
                        {"Source", source_of(workstation)},
                        {"AuthenticationPackage", "NTLM"},
                        {"Status", "0x0"}});
        }
    }

    // Process activity with recycled semi-unique pids so parent resolution
    // has genuinely ambiguous candidates.
    static const std::vector<std::string> process_pool = {
        "winword.exe",
        "excel.exe",
        "chrome.exe",
        "setup.exe",
        "svchost.exe",
        "flashplayerplugin_20_0_0_286.exe",
        "tool_x64_20170103_ab12cd34ef.exe",
        "updater_2017-01-03.exe",
        "agent_win64_7f3a2b91cc.exe",
    };
    struct Running {
        std::int64_t pid;
        std::string name;  // with extension
    };
    std::unordered_map<std::string, std::vector<Running>> running;
    std::unordered_map<std::string, std::set<std::int64_t>> pids_in_use;
    std::unordered_map<std::string, std::uint64_t> pid_counter;
    std::unordered_map<std::string, std::int64_t> host_clock;

    auto alloc_pid = [&](const std::string& host) {
        auto& used = pids_in_use[host];
        std::uint64_t& counter = pid_counter[host];
        for (;;) {
            std::int64_t pid = 0x400 + static_cast<std::int64_t>(counter % 48) * 4;
            ++counter;
            if (!used.count(pid)) {
                used.insert(pid);
                return pid;
            }
        }
    };

    for (const std::string& host : windows_hosts) {
        host_clock[host] = cfg.start_time + 30;
        std::int64_t pid = alloc_pid(host);
        build.emit(pending, host_clock[host], 4688, host,
                   {{"UserName", host + "$"},
                    {"DomainName", "dom1"},
                    {"ProcessName", "services.exe"},
                    {"ProcessID", pid}});
        running[host].push_back({pid, "services.exe"});
    }

    struct Ending {
        std::int64_t time;
        std::string host;
        std::int64_t pid;
        std::string name;
        std::string user;
    };
    std::vector<Ending> endings;

    for (int p = 0; p < cfg.process_pairs; ++p) {
        const std::string& host = windows_hosts[rng.below(windows_hosts.size())];
        auto& live = running[host];
        const Running& parent = live[rng.below(live.size())];
        std::int64_t start = host_clock[host] += 5 + static_cast<std::int64_t>(rng.below(900));
        std::int64_t pid = alloc_pid(host);
        std::string name = process_pool[rng.below(process_pool.size())];
        std::uint64_t u = rng.below(static_cast<std::uint64_t>(std::max(cfg.users, 1)));
        std::string user = rng.frac() < 0.3 ? host + "$" : user_name(u);

        build.emit(pending, start, 4688, host,
                   {{"UserName", user},
                    {"DomainName", "dom1"},
                    {"ProcessName", name},
                    {"ProcessID", pid},
                    {"ParentProcessName", strip_extension(parent.name)},
                    {"ParentProcessID", parent.pid}});
        data.parent_truth.push_back({host, pid, start, parent.name});

        std::int64_t end = start + 1 + static_cast<std::int64_t>(rng.below(3600));
        endings.push_back({end, host, pid, name, user});
        live.push_back({pid, name});

        // Occasionally retire an old process so its pid can recycle.
        if (live.size() > 6) {
            std::size_t victim = 1 + rng.below(live.size() - 1);
            Running gone = live[victim];
            live.erase(live.begin() + static_cast<std::ptrdiff_t>(victim));
            std::int64_t gone_time = host_clock[host] += 1;
            build.emit(pending, gone_time, 4689, host,
                       {{"UserName", host + "$"},
                        {"DomainName", "dom1"},
                        {"ProcessName", gone.name},
                        {"ProcessID", gone.pid}});
            pids_in_use[host].erase(gone.pid);
            // Drop its scheduled ending; it already ended.
            endings.erase(std::remove_if(endings.begin(), endings.end(),
                                         [&](const Ending& e) {
                                             return e.host == host && e.pid == gone.pid;
                                         }),
                          endings.end());
        }
    }

    // Everything still running ends before the window closes.
    for (const auto& [host, live] : running) {
        (void)live;
    }
    for (const Ending& e : endings) {
        build.emit(pending, e.time, 4689, e.host,
                   {{"UserName", e.user},
                    {"DomainName", "dom1"},
                    {"ProcessName", e.name},
                    {"ProcessID", e.pid}});
    }
    for (auto& [host, live] : running) {
        std::int64_t t = cfg.start_time + window - 30;
        for (const Running& r : live) {
            bool scheduled = false;
            for (const Ending& e : endings) {
                if (e.host == host && e.pid == r.pid) {
                    scheduled = true;
                    break;
                }
            }
            if (scheduled) continue;
            build.emit(pending, t += 1, 4689, host,
                       {{"UserName", host + "$"},
                        {"DomainName", "dom1"},
                        {"ProcessName", r.name},
                        {"ProcessID", r.pid}});
        }
    }

    std::stable_sort(pending.begin(), pending.end(), [](const PendingEvent& a,
                                                        const PendingEvent& b) {
        if (a.time != b.time) return a.time < b.time;
        return a.order < b.order;
    });
    data.raw_json.reserve(pending.size());
    for (auto& p : pending) data.raw_json.push_back(std::move(p.json));
    return data;
}

std::string ground_truth_json(const NetworkData& network, const HostData& host) {
    nlohmann::ordered_json doc;
    doc["sessions"] = nlohmann::json::array();
    for (const GroundTruthSession& s : network.truth) {
        doc["sessions"].push_back({{"initiator", s.initiator},
                                   {"responder", s.responder},
                                   {"src_ip", s.tuple.src_ip},
                                   {"dst_ip", s.tuple.dst_ip},
                                   {"src_port", s.tuple.src_port},
                                   {"dst_port", s.tuple.dst_port},
                                   {"protocol", s.tuple.protocol},
                                   {"fwd_packets", s.fwd_packets},
                                   {"fwd_bytes", s.fwd_bytes},
                                   {"rev_packets", s.rev_packets},
                                   {"rev_bytes", s.rev_bytes},
                                   {"start", s.start},
                                   {"end", s.end},
                                   {"dup_factor", s.dup_factor},
                                   {"reverse_dropped", s.reverse_dropped}});
    }
    doc["process_parents"] = nlohmann::json::array();
    for (const HostTruth& t : host.parent_truth) {
        doc["process_parents"].push_back({{"log_host", t.log_host},
                                          {"child_pid", t.child_pid},
                                          {"child_time", t.child_time},
                                          {"parent_name", t.parent_name}});
    }
    return doc.dump(2);
}

}  // namespace flowstitch
