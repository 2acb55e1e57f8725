#include "flowstitch/cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "flowstitch/deident.hpp"
#include "flowstitch/fqdn_map.hpp"
#include "flowstitch/hostlog.hpp"
#include "flowstitch/quality_report.hpp"
#include "flowstitch/stitcher.hpp"
#include "flowstitch/synthgen.hpp"
#include "flowstitch/util.hpp"

namespace flowstitch::cli {

namespace {

namespace fs = std::filesystem;

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open input file: " + path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("write failure on: " + path);
}

struct InputDigest {
    std::uint64_t lines = 0;
    std::uint64_t hash = 0xcbf29ce484222325ULL;

    void feed(const std::string& line) {
        ++lines;
        hash = fnv1a64(line, hash);
        hash = fnv1a64("\n", hash);
    }
};

void for_each_line(std::istream& in, const std::function<void(const std::string&, std::size_t)>& fn) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        fn(line, ++line_no);
    }
}

std::unordered_set<std::string> load_name_set(const std::string& path) {
    std::unordered_set<std::string> names;
    auto in = open_input(path);
    for_each_line(in, [&](const std::string& line, std::size_t) {
        if (!line.empty() && line[0] != '#') names.insert(line);
    });
    return names;
}

std::unordered_map<std::string, std::string> load_merge_map(const std::string& path) {
    std::unordered_map<std::string, std::string> merges;
    auto in = open_input(path);
    for_each_line(in, [&](const std::string& line, std::size_t line_no) {
        if (line.empty() || line[0] == '#') return;
        auto fields = split_fields(line);
        if (fields.size() != 2) {
            throw ParseError(line_no, "", "merge map expects real,canonical");
        }
        merges.emplace(std::string(fields[0]), std::string(fields[1]));
    });
    return merges;
}

// ---------------------------------------------------------------------------
// stitch

struct StitchArgs {
    std::string in;
    std::string out;
    std::string port_table;
    StitchConfig config;
    bool header = false;
};

PortFrequencyTable stitch_port_table(const StitchArgs& args) {
    if (!args.port_table.empty()) {
        auto in = open_input(args.port_table);
        return PortFrequencyTable::load(in);
    }
    // Two-pass batch mode: the table comes from the input itself.
    PortCounter counter;
    auto in = open_input(args.in);
    for_each_line(in, [&](const std::string& line, std::size_t line_no) {
        if (line.empty()) return;
        UniflowRecord flow = parse_uniflow(line, line_no);
        if (filter_protocol(flow)) counter.add(flow);
    });
    return counter.top(args.config.top_k);
}

int run_stitch(const StitchArgs& args, std::ostream& err) {
    PortFrequencyTable freq = stitch_port_table(args);
    StitchTable table(args.config);
    auto in = open_input(args.in);
    auto out = open_output(args.out);
    if (args.header) out << kBiflowHeader << '\n';
    std::uint64_t kept = 0, dropped = 0, emitted = 0;
    auto write = [&](const std::vector<BiflowRecord>& records) {
        for (const auto& r : records) {
            out << serialize_biflow(r) << '\n';
            ++emitted;
        }
    };
    for_each_line(in, [&](const std::string& line, std::size_t line_no) {
        if (line.empty()) return;
        UniflowRecord flow = parse_uniflow(line, line_no);
        if (!filter_protocol(flow)) {
            ++dropped;
            return;
        }
        ++kept;
        write(table.ingest(decide_direction(flow, freq)));
    });
    write(table.flush());
    finish_output(out, args.out);
    err << "stitch: " << kept << " uniflows kept, " << dropped << " dropped by protocol filter, "
        << emitted << " biflows emitted\n";
    return 0;
}

// ---------------------------------------------------------------------------
// resolve-fqdn

struct ResolveArgs {
    std::string map;
    std::string in;
    std::string out;
    bool header = false;
};

int run_resolve(const ResolveArgs& args, std::ostream& err) {
    TemporalIpMap map;
    {
        auto in = open_input(args.map);
        map = load_mappings(in);
    }
    auto in = open_input(args.in);
    auto out = open_output(args.out);
    if (args.header) out << kBiflowHeader << '\n';
    std::uint64_t records = 0;
    for_each_line(in, [&](const std::string& line, std::size_t line_no) {
        if (line.empty() || (line_no == 1 && line == kBiflowHeader)) return;
        BiflowRecord b = parse_biflow(line, line_no);
        out << serialize_biflow(apply_to_biflow(std::move(b), map)) << '\n';
        ++records;
    });
    finish_output(out, args.out);
    err << "resolve-fqdn: " << records << " biflows, " << map.ip_count() << " mapped addresses\n";
    return 0;
}

// ---------------------------------------------------------------------------
// deident

struct DeidentArgs {
    std::string registry;
    std::string biflows_in;
    std::string biflows_out;
    std::string events_in;
    std::string events_out;
    std::string system_users_file;
    std::string core_hosts_file;
    std::string merge_map_file;
    int wellknown_max = 1023;
    bool header = false;
};

DeidentConfig deident_config(const DeidentArgs& args) {
    DeidentConfig cfg;
    cfg.wellknown_port_max = args.wellknown_max;
    if (!args.system_users_file.empty()) cfg.system_users = load_name_set(args.system_users_file);
    if (!args.core_hosts_file.empty()) cfg.core_hosts = load_name_set(args.core_hosts_file);
    if (!args.merge_map_file.empty()) cfg.merge_map = load_merge_map(args.merge_map_file);
    return cfg;
}

PseudonymRegistry open_registry(const std::string& path, DeidentConfig cfg) {
    if (!path.empty() && fs::exists(path)) {
        return PseudonymRegistry::load_file(path, std::move(cfg));
    }
    return PseudonymRegistry(std::move(cfg));
}

void deident_biflow(BiflowRecord& b, PseudonymRegistry& reg, std::size_t line_no) {
    b.src_device = reg.device(b.src_device, is_ip_literal(b.src_device));
    b.dst_device = reg.device(b.dst_device, is_ip_literal(b.dst_device));
    auto map_port = [&](std::string& port, const char* field) {
        std::uint64_t numeric = 0;
        bool all_num = !port.empty() && port.size() <= 5;
        for (char c : port) {
            if (c < '0' || c > '9') {
                all_num = false;
                break;
            }
            numeric = numeric * 10 + static_cast<std::uint64_t>(c - '0');
        }
        if (!all_num || numeric > 65535) {
            throw ParseError(line_no, field, "not a port number: '" + port + "'");
        }
        port = reg.port(static_cast<int>(numeric));
    };
    map_port(b.src_port, "SrcPort");
    map_port(b.dst_port, "DstPort");
}

/// De-identifies a normalized host record at the attribute-map level, so it
/// works with any upstream attribute matrix. Field order in the output is
/// the mandatory triple, canonical attributes, then anything else.
std::string deident_event_line(const RawEvent& raw, PseudonymRegistry& reg,
                               std::size_t line_no) {
    auto text = [](const AttrValue& v) -> std::string {
        if (const auto* s = std::get_if<std::string>(&v)) return *s;
        return std::to_string(std::get<std::int64_t>(v));
    };

    auto fields = raw.fields;
    auto id_it = fields.find("EventID");
    auto time_it = fields.find("Time");
    auto host_it = fields.find("LogHost");
    if (id_it == fields.end() || time_it == fields.end() || host_it == fields.end()) {
        throw ParseError(line_no, "", "record is missing EventID, LogHost or Time");
    }

    std::string raw_domain;
    if (auto it = fields.find("DomainName"); it != fields.end()) raw_domain = text(it->second);

    auto map_device = [&](const char* name) {
        auto it = fields.find(name);
        if (it == fields.end()) return;
        std::string value = text(it->second);
        it->second = reg.device(value, is_ip_literal(value));
    };
    auto map_user_pair = [&](const char* user_field, const char* domain_field) {
        auto uit = fields.find(user_field);
        auto dit = fields.find(domain_field);
        std::string domain = dit == fields.end() ? std::string() : text(dit->second);
        if (uit != fields.end()) {
            auto [user_id, domain_id] = reg.user(text(uit->second), domain);
            uit->second = user_id;
            if (dit != fields.end()) dit->second = domain_id;
        } else if (dit != fields.end()) {
            dit->second = reg.domain(domain);
        }
    };
    auto map_process = [&](const char* name) {
        auto it = fields.find(name);
        if (it == fields.end()) return;
        it->second = reg.process(text(it->second));
    };

    map_device("LogHost");
    map_device("Source");
    map_device("Destination");
    map_user_pair("UserName", "DomainName");
    map_user_pair("SubjectUserName", "SubjectDomainName");
    if (auto it = fields.find("ServiceName"); it != fields.end()) {
        it->second = reg.user(text(it->second), raw_domain).first;
    }
    map_process("ProcessName");
    map_process("ParentProcessName");

    nlohmann::ordered_json doc;
    auto put = [&](const std::string& name) {
        auto it = fields.find(name);
        if (it == fields.end()) return;
        if (const auto* i = std::get_if<std::int64_t>(&it->second)) {
            doc[name] = *i;
        } else {
            doc[name] = std::get<std::string>(it->second);
        }
        fields.erase(it);
    };
    put("Time");
    put("EventID");
    put("LogHost");
    for (std::size_t a = 0; a < 18; ++a) put(attr_name(static_cast<Attr>(a)));
    for (const auto& [name, value] : fields) {
        if (const auto* i = std::get_if<std::int64_t>(&value)) {
            doc[name] = *i;
        } else {
            doc[name] = std::get<std::string>(value);
        }
    }
    return doc.dump();
}

int run_deident(const DeidentArgs& args, std::ostream& err) {
    if (args.biflows_in.empty() && args.events_in.empty()) {
        err << "deident: nothing to do; pass --biflows-in and/or --events-in\n";
        return 1;
    }
    PseudonymRegistry reg = open_registry(args.registry, deident_config(args));
    std::uint64_t biflows = 0, events = 0;

    if (!args.biflows_in.empty()) {
        auto in = open_input(args.biflows_in);
        auto out = open_output(args.biflows_out);
        if (args.header) out << kBiflowHeader << '\n';
        for_each_line(in, [&](const std::string& line, std::size_t line_no) {
            if (line.empty() || (line_no == 1 && line == kBiflowHeader)) return;
            BiflowRecord b = parse_biflow(line, line_no);
            deident_biflow(b, reg, line_no);
            out << serialize_biflow(b) << '\n';
            ++biflows;
        });
        finish_output(out, args.biflows_out);
    }
    if (!args.events_in.empty()) {
        auto in = open_input(args.events_in);
        auto out = open_output(args.events_out);
        for_each_line(in, [&](const std::string& line, std::size_t line_no) {
            if (line.empty()) return;
            out << deident_event_line(parse_event(line, line_no), reg, line_no) << '\n';
            ++events;
        });
        finish_output(out, args.events_out);
    }
    if (!args.registry.empty()) reg.save_file(args.registry);
    err << "deident: " << biflows << " biflows, " << events << " events, "
        << reg.entry_count() << " registry entries\n";
    return 0;
}

// ---------------------------------------------------------------------------
// parse-hostlog

struct ParseHostlogArgs {
    std::string in;
    std::string out;
    std::string rejects;
    std::string matrix_file;
    std::string renames_file;
};

int run_parse_hostlog(const ParseHostlogArgs& args, std::ostream& err) {
    AttributeMatrix matrix = AttributeMatrix::appendix_default();
    if (!args.matrix_file.empty()) {
        auto in = open_input(args.matrix_file);
        matrix = AttributeMatrix::from_json(in);
    }
    std::vector<RenameRule> renames = default_renames();
    if (!args.renames_file.empty()) {
        auto in = open_input(args.renames_file);
        auto extra = load_renames(in);
        renames.insert(renames.end(), extra.begin(), extra.end());
    }

    auto in = open_input(args.in);
    auto out = open_output(args.out);
    std::ofstream rejects;
    if (!args.rejects.empty()) rejects = open_output(args.rejects);
    NormalizeStats stats;
    auto reject_line = [&](std::size_t line_no, const std::string& reason,
                           const std::string& raw) {
        if (!rejects.is_open()) return;
        nlohmann::ordered_json doc;
        doc["line"] = line_no;
        doc["reason"] = reason;
        doc["raw"] = raw;
        rejects << doc.dump() << '\n';
    };

    for_each_line(in, [&](const std::string& line, std::size_t line_no) {
        ++stats.lines;
        if (line.empty()) {
            ++stats.empty_lines;
            return;
        }
        RawEvent raw;
        try {
            raw = parse_event(line, line_no);
        } catch (const ParseError& e) {
            ++stats.rejected;
            reject_line(line_no, e.what(), line);
            return;
        }
        std::string reason;
        auto event = normalize_event(raw, matrix, renames, stats, &reason);
        if (!event) {
            reject_line(line_no, reason, line);
            return;
        }
        out << to_json(*event) << '\n';
    });
    finish_output(out, args.out);
    if (rejects.is_open()) finish_output(rejects, args.rejects);
    err << "parse-hostlog: " << stats.accepted << " accepted, " << stats.rejected << " rejected, "
        << stats.empty_lines << " empty lines, " << stats.renamed_attrs << " attributes renamed, "
        << stats.dropped_unknown_attrs + stats.dropped_out_of_matrix << " attributes dropped ("
        << stats.dropped_out_of_matrix << " outside matrix), " << stats.empty_usernames
        << " empty usernames\n";
    return 0;
}

// ---------------------------------------------------------------------------
// report

struct ReportArgs {
    std::string biflows;
    std::string events;
    std::string out_dir;
    std::size_t top_ports = 50;
    std::vector<std::int64_t> degree_days;
    std::string timeline_entity;
};

std::optional<HostEvent> event_from_normalized(const RawEvent& raw, std::string* reason) {
    auto id_it = raw.fields.find("EventID");
    auto time_it = raw.fields.find("Time");
    auto host_it = raw.fields.find("LogHost");
    auto as_int = [](const AttrValue& v) -> std::optional<std::int64_t> {
        if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
        return std::nullopt;
    };
    if (id_it == raw.fields.end() || time_it == raw.fields.end() || host_it == raw.fields.end()) {
        if (reason) *reason = "record is missing EventID, LogHost or Time";
        return std::nullopt;
    }
    auto id = as_int(id_it->second);
    auto time = as_int(time_it->second);
    if (!id || !time) {
        if (reason) *reason = "non-numeric EventID or Time";
        return std::nullopt;
    }
    HostEvent event;
    event.event_id = static_cast<int>(*id);
    event.time = *time;
    if (const auto* s = std::get_if<std::string>(&host_it->second)) {
        event.log_host = *s;
    } else {
        event.log_host = std::to_string(std::get<std::int64_t>(host_it->second));
    }
    for (const auto& [name, value] : raw.fields) {
        if (name == "EventID" || name == "Time" || name == "LogHost") continue;
        if (auto attr = attr_from_name(name)) event.attrs.emplace(*attr, value);
    }
    return event;
}

int run_report(const ReportArgs& args, std::ostream& err) {
    if (args.biflows.empty() && args.events.empty()) {
        err << "report: nothing to do; pass --biflows and/or --events\n";
        return 1;
    }
    fs::create_directories(args.out_dir);
    nlohmann::ordered_json manifest;
    manifest["inputs"] = nlohmann::ordered_json::object();
    manifest["outputs"] = nlohmann::ordered_json::object();

    auto emit = [&](const std::string& name, const std::function<std::size_t(std::ostream&)>& fn) {
        fs::path path = fs::path(args.out_dir) / name;
        auto out = open_output(path.string());
        std::size_t rows = fn(out);
        finish_output(out, path.string());
        manifest["outputs"][name] = rows;
    };
    auto digest_json = [](const InputDigest& d) {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(d.hash));
        return nlohmann::ordered_json{{"lines", d.lines}, {"fnv1a64", std::string(buf)}};
    };

    if (!args.biflows.empty()) {
        BiflowStats stats;
        InputDigest digest;
        auto in = open_input(args.biflows);
        for_each_line(in, [&](const std::string& line, std::size_t line_no) {
            digest.feed(line);
            if (line.empty() || (line_no == 1 && line == kBiflowHeader)) return;
            stats.add(parse_biflow(line, line_no));
        });
        manifest["inputs"][args.biflows] = digest_json(digest);

        emit("daily_biflows.csv", [&](std::ostream& o) { return write_daily_counts_csv(o, stats); });
        emit("zero_fractions.csv",
             [&](std::ostream& o) { return write_zero_fractions_csv(o, stats); });
        emit("protocol_daily.csv",
             [&](std::ostream& o) { return write_protocol_daily_csv(o, stats); });
        emit("top_src_ports.csv", [&](std::ostream& o) {
            return write_port_histogram_csv(o, stats, true, args.top_ports);
        });
        emit("top_dst_ports.csv", [&](std::ostream& o) {
            return write_port_histogram_csv(o, stats, false, args.top_ports);
        });
        emit("distributions.csv",
             [&](std::ostream& o) { return write_distributions_csv(o, stats); });
        std::vector<std::int64_t> days =
            args.degree_days.empty() ? stats.observed_days() : args.degree_days;
        emit("degree_daily.csv",
             [&](std::ostream& o) { return write_degree_csv(o, stats, days); });
    }

    if (!args.events.empty()) {
        HostEventStats stats;
        TimelineCollector timeline(args.timeline_entity);
        InputDigest digest;
        std::uint64_t skipped = 0;
        auto in = open_input(args.events);
        for_each_line(in, [&](const std::string& line, std::size_t line_no) {
            digest.feed(line);
            if (line.empty()) return;
            auto event = event_from_normalized(parse_event(line, line_no), nullptr);
            if (!event) {
                ++skipped;
                return;
            }
            stats.add(*event);
            if (!args.timeline_entity.empty()) timeline.add(*event);
        });
        manifest["inputs"][args.events] = digest_json(digest);
        if (skipped > 0) err << "report: skipped " << skipped << " malformed event records\n";

        emit("event_histogram.csv",
             [&](std::ostream& o) { return write_event_histogram_csv(o, stats); });
        emit("entity_counts.csv",
             [&](std::ostream& o) { return write_entity_counts_csv(o, stats); });
        emit("entity_counts_daily.csv",
             [&](std::ostream& o) { return write_entity_daily_csv(o, stats); });
        if (!args.timeline_entity.empty()) {
            emit("timeline.csv", [&](std::ostream& o) { return write_timeline_csv(o, timeline); });
        }
    }

    fs::path manifest_path = fs::path(args.out_dir) / "manifest.json";
    auto out = open_output(manifest_path.string());
    out << manifest.dump(2) << '\n';
    finish_output(out, manifest_path.string());
    err << "report: wrote " << manifest["outputs"].size() << " tables to " << args.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
    std::string out_dir;
    std::string profile;
    std::optional<int> sessions;
    std::optional<std::uint64_t> seed;
};

int run_generate(const GenerateArgs& args, std::ostream& err) {
    GenConfig cfg;
    if (!args.profile.empty()) {
        auto in = open_input(args.profile);
        cfg = GenConfig::from_json(in);
    } else {
        // Demo profile: enough host activity to exercise every stage.
        cfg.host_chains = 200;
        cfg.process_pairs = 300;
        cfg.renewal_hosts = 3;
        cfg.decorated_fraction = 0.3;
        cfg.variant_name_fraction = 0.3;
        cfg.junk_attr_fraction = 0.1;
        cfg.reverse_drop = 0.2;
        cfg.duplication = 0.2;
        cfg.jitter = 300;
        cfg.scan_prob = 0.01;
    }
    if (args.sessions) cfg.sessions = *args.sessions;
    if (args.seed) cfg.seed = *args.seed;

    fs::create_directories(args.out_dir);
    NetworkData network = generate_network(cfg);
    HostData host = generate_host_events(cfg);

    {
        auto out = open_output((fs::path(args.out_dir) / "uniflows.csv").string());
        for (const auto& r : network.uniflows) out << serialize_uniflow(r) << '\n';
        finish_output(out, "uniflows.csv");
    }
    {
        auto out = open_output((fs::path(args.out_dir) / "fqdn_map.csv").string());
        for (const auto& m : network.mappings) {
            out << m.ip << ',' << m.fqdn << ',' << m.valid_from << ',' << m.valid_to << ','
                << m.rank << '\n';
        }
        finish_output(out, "fqdn_map.csv");
    }
    {
        auto out = open_output((fs::path(args.out_dir) / "hostlog.json").string());
        for (const auto& line : host.raw_json) out << line << '\n';
        finish_output(out, "hostlog.json");
    }
    {
        auto out = open_output((fs::path(args.out_dir) / "truth.json").string());
        out << ground_truth_json(network, host) << '\n';
        finish_output(out, "truth.json");
    }
    err << "generate: " << network.uniflows.size() << " uniflows, " << network.truth.size()
        << " sessions, " << host.raw_json.size() << " host events (seed " << cfg.seed << ")\n";
    return 0;
}

// ---------------------------------------------------------------------------
// pipeline

struct PipelineArgs {
    std::string uniflows;
    std::string events;
    std::string map;
    std::string registry;
    std::string out_dir;
    StitchConfig stitch;
    std::string port_table;
    DeidentArgs deident;  // config file knobs reused
    bool header = false;
};

int run_pipeline(const PipelineArgs& args, std::ostream& err) {
    fs::create_directories(args.out_dir);
    TemporalIpMap map;
    {
        auto in = open_input(args.map);
        map = load_mappings(in);
    }
    PseudonymRegistry reg = open_registry(args.registry, deident_config(args.deident));

    // Network branch: stitch, resolve names, de-identify, one record at a time.
    StitchArgs stitch_args{args.uniflows, "", args.port_table, args.stitch, false};
    PortFrequencyTable freq = stitch_port_table(stitch_args);
    StitchTable table(args.stitch);
    std::uint64_t kept = 0, emitted = 0;
    {
        auto in = open_input(args.uniflows);
        fs::path out_path = fs::path(args.out_dir) / "biflows.csv";
        auto out = open_output(out_path.string());
        if (args.header) out << kBiflowHeader << '\n';
        auto write = [&](std::vector<BiflowRecord> records) {
            for (auto& r : records) {
                r = apply_to_biflow(std::move(r), map);
                deident_biflow(r, reg, 0);
                out << serialize_biflow(r) << '\n';
                ++emitted;
            }
        };
        for_each_line(in, [&](const std::string& line, std::size_t line_no) {
            if (line.empty()) return;
            UniflowRecord flow = parse_uniflow(line, line_no);
            if (!filter_protocol(flow)) return;
            ++kept;
            write(table.ingest(decide_direction(flow, freq)));
        });
        write(table.flush());
        finish_output(out, out_path.string());
    }

    // Host branch: normalize, then de-identify with the same registry.
    std::uint64_t events = 0;
    if (!args.events.empty()) {
        AttributeMatrix matrix = AttributeMatrix::appendix_default();
        std::vector<RenameRule> renames = default_renames();
        NormalizeStats stats;
        auto in = open_input(args.events);
        fs::path out_path = fs::path(args.out_dir) / "events.json";
        fs::path rejects_path = fs::path(args.out_dir) / "rejects.json";
        auto out = open_output(out_path.string());
        auto rejects = open_output(rejects_path.string());
        for_each_line(in, [&](const std::string& line, std::size_t line_no) {
            ++stats.lines;
            if (line.empty()) {
                ++stats.empty_lines;
                return;
            }
            std::string reason;
            std::optional<HostEvent> event;
            try {
                event = normalize_event(parse_event(line, line_no), matrix, renames, stats,
                                        &reason);
            } catch (const ParseError& e) {
                ++stats.rejected;
                reason = e.what();
            }
            if (!event) {
                nlohmann::ordered_json doc;
                doc["line"] = line_no;
                doc["reason"] = reason;
                doc["raw"] = line;
                rejects << doc.dump() << '\n';
                return;
            }
            RawEvent normalized = parse_event(to_json(*event));
            out << deident_event_line(normalized, reg, line_no) << '\n';
            ++events;
        });
        finish_output(out, out_path.string());
        finish_output(rejects, rejects_path.string());
    }

    if (!args.registry.empty()) reg.save_file(args.registry);
    err << "pipeline: " << kept << " uniflows -> " << emitted << " biflows, " << events
        << " host events, registry " << reg.entry_count() << " entries\n";
    return 0;
}

}  // namespace

std::string version_string() {
    return "flowstitch 0.1.0 (uniflow-csv 1, biflow-csv 1, registry 1, hostlog-json 1)";
}

int run(const std::vector<std::string>& args) {
    CLI::App app{"Network flow stitching, name resolution, de-identification and host log "
                 "normalization pipeline"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version_string());

    StitchArgs stitch_args;
    auto* stitch = app.add_subcommand("stitch", "Aggregate uniflows into directed biflows");
    stitch->add_option("--in", stitch_args.in, "Uniflow CSV input")->required();
    stitch->add_option("--out", stitch_args.out, "Biflow CSV output")->required();
    stitch->add_option("--inactivity-timeout-secs", stitch_args.config.inactivity_timeout,
                       "Evict entries idle longer than this")
        ->capture_default_str();
    stitch->add_option("--report-interval-secs", stitch_args.config.report_interval,
                       "Interim report interval for long-lived entries")
        ->capture_default_str();
    stitch->add_option("--top-k", stitch_args.config.top_k, "Frequent-port table size")
        ->capture_default_str();
    stitch->add_option("--port-table", stitch_args.port_table,
                       "Frequent-port file (one port per line, rank order); "
                       "default is a first pass over the input");
    stitch->add_flag("--tcp-only-stitch", stitch_args.config.tcp_only,
                     "Only stitch TCP; other protocols pass through unaggregated");
    stitch->add_flag("--header", stitch_args.header, "Emit a CSV header line");

    ResolveArgs resolve_args;
    auto* resolve = app.add_subcommand("resolve-fqdn", "Replace addresses with stable names");
    resolve->add_option("--map", resolve_args.map, "Mapping CSV: ip,fqdn,from,to,rank")
        ->required();
    resolve->add_option("--in", resolve_args.in, "Biflow CSV input")->required();
    resolve->add_option("--out", resolve_args.out, "Biflow CSV output")->required();
    resolve->add_flag("--header", resolve_args.header, "Emit a CSV header line");

    DeidentArgs deident_args;
    auto* deident = app.add_subcommand("deident", "Replace identifiers with pseudonyms");
    deident->add_option("--registry", deident_args.registry, "Registry file (loaded if present)")
        ->required();
    deident->add_option("--biflows-in", deident_args.biflows_in, "Biflow CSV input");
    deident->add_option("--biflows-out", deident_args.biflows_out, "Biflow CSV output");
    deident->add_option("--events-in", deident_args.events_in, "Normalized host event input");
    deident->add_option("--events-out", deident_args.events_out, "Host event output");
    deident->add_option("--wellknown-max", deident_args.wellknown_max,
                        "Highest port released verbatim")
        ->capture_default_str();
    deident->add_option("--system-users", deident_args.system_users_file,
                        "Pass-through usernames, one per line");
    deident->add_option("--core-hosts", deident_args.core_hosts_file,
                        "Pass-through hosts, one per line");
    deident->add_option("--merge-map", deident_args.merge_map_file,
                        "Entity consolidation CSV: real,canonical");
    deident->add_flag("--header", deident_args.header, "Emit a CSV header line");

    ParseHostlogArgs hostlog_args;
    auto* hostlog = app.add_subcommand("parse-hostlog", "Normalize raw host event records");
    hostlog->add_option("--in", hostlog_args.in, "Raw JSON-lines input")->required();
    hostlog->add_option("--out", hostlog_args.out, "Normalized JSON-lines output")->required();
    hostlog->add_option("--rejects", hostlog_args.rejects, "Reject stream (JSON lines)");
    hostlog->add_option("--matrix", hostlog_args.matrix_file,
                        "Attribute matrix JSON override (built-in default)");
    hostlog->add_option("--renames", hostlog_args.renames_file,
                        "Extra rename rules CSV: raw,canonical[,event_id]");

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "Emit the data-quality statistic tables");
    report->add_option("--biflows", report_args.biflows, "Biflow CSV input");
    report->add_option("--events", report_args.events, "Host event JSON input");
    report->add_option("--out-dir", report_args.out_dir, "Output directory")->required();
    report->add_option("--top-ports", report_args.top_ports, "Port histogram size")
        ->capture_default_str();
    report->add_option("--degree-day", report_args.degree_days,
                       "Day index for degree distributions (repeatable; default all)");
    report->add_option("--timeline-entity", report_args.timeline_entity,
                       "User or device identifier for the event timeline");

    GenerateArgs generate_args;
    int gen_sessions = -1;
    std::int64_t gen_seed = -1;
    auto* generate = app.add_subcommand("generate", "Emit a seeded synthetic data set");
    generate->add_option("--out-dir", generate_args.out_dir, "Output directory")->required();
    generate->add_option("--sessions", gen_sessions, "Session count");
    generate->add_option("--seed", gen_seed, "Master seed");
    generate->add_option("--profile", generate_args.profile, "GenConfig JSON profile");

    PipelineArgs pipeline_args;
    auto* pipeline =
        app.add_subcommand("pipeline", "stitch -> resolve-fqdn -> deident plus host branch, "
                                       "sharing one registry");
    pipeline->add_option("--uniflows", pipeline_args.uniflows, "Uniflow CSV input")->required();
    pipeline->add_option("--events", pipeline_args.events, "Raw host event input (optional)");
    pipeline->add_option("--map", pipeline_args.map, "Mapping CSV")->required();
    pipeline->add_option("--registry", pipeline_args.registry, "Registry file")->required();
    pipeline->add_option("--out-dir", pipeline_args.out_dir, "Output directory")->required();
    pipeline->add_option("--inactivity-timeout-secs", pipeline_args.stitch.inactivity_timeout)
        ->capture_default_str();
    pipeline->add_option("--report-interval-secs", pipeline_args.stitch.report_interval)
        ->capture_default_str();
    pipeline->add_option("--top-k", pipeline_args.stitch.top_k)->capture_default_str();
    pipeline->add_option("--port-table", pipeline_args.port_table);
    pipeline->add_flag("--tcp-only-stitch", pipeline_args.stitch.tcp_only);
    pipeline->add_option("--wellknown-max", pipeline_args.deident.wellknown_max)
        ->capture_default_str();
    pipeline->add_option("--system-users", pipeline_args.deident.system_users_file);
    pipeline->add_option("--core-hosts", pipeline_args.deident.core_hosts_file);
    pipeline->add_option("--merge-map", pipeline_args.deident.merge_map_file);
    pipeline->add_flag("--header", pipeline_args.header);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        std::cout << version_string() << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (stitch->parsed()) return run_stitch(stitch_args, std::cerr);
        if (resolve->parsed()) return run_resolve(resolve_args, std::cerr);
        if (deident->parsed()) return run_deident(deident_args, std::cerr);
        if (hostlog->parsed()) return run_parse_hostlog(hostlog_args, std::cerr);
        if (report->parsed()) return run_report(report_args, std::cerr);
        if (generate->parsed()) {
            if (gen_sessions >= 0) generate_args.sessions = gen_sessions;
            if (gen_seed >= 0) generate_args.seed = static_cast<std::uint64_t>(gen_seed);
            return run_generate(generate_args, std::cerr);
        }
        if (pipeline->parsed()) return run_pipeline(pipeline_args, std::cerr);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace flowstitch::cli
