#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "flowstitch/cli.hpp"
#include "flowstitch/deident.hpp"
#include "flowstitch/fqdn_map.hpp"
#include "flowstitch/hostlog.hpp"
#include "flowstitch/quality_report.hpp"
#include "flowstitch/stitcher.hpp"
#include "flowstitch/synthgen.hpp"

namespace py = pybind11;
using namespace flowstitch;

namespace {

std::vector<BiflowRecord> stitch_all(const std::vector<UniflowRecord>& flows,
                                     const StitchConfig& config) {
    PortFrequencyTable freq = build_port_frequency(flows, config.top_k);
    StitchTable table(config);
    std::vector<BiflowRecord> out;
    for (const UniflowRecord& f : flows) {
        if (!filter_protocol(f)) continue;
        for (auto& r : table.ingest(decide_direction(f, freq))) out.push_back(std::move(r));
    }
    for (auto& r : table.flush()) out.push_back(std::move(r));
    return out;
}

std::optional<std::string> normalize_json_line(const std::string& line) {
    AttributeMatrix matrix = AttributeMatrix::appendix_default();
    auto renames = default_renames();
    NormalizeStats stats;
    auto event = normalize_event(parse_event(line), matrix, renames, stats);
    if (!event) return std::nullopt;
    return to_json(*event);
}

}  // namespace

PYBIND11_MODULE(flowstitch, m) {
    m.doc() = "Flow stitching, temporal name resolution, de-identification and host log "
              "normalization";

    py::class_<UniflowRecord>(m, "UniflowRecord")
        .def(py::init<>())
        .def_readwrite("start_time", &UniflowRecord::start_time)
        .def_readwrite("end_time", &UniflowRecord::end_time)
        .def_readwrite("src_ip", &UniflowRecord::src_ip)
        .def_readwrite("dst_ip", &UniflowRecord::dst_ip)
        .def_readwrite("protocol", &UniflowRecord::protocol)
        .def_readwrite("src_port", &UniflowRecord::src_port)
        .def_readwrite("dst_port", &UniflowRecord::dst_port)
        .def_readwrite("packets", &UniflowRecord::packets)
        .def_readwrite("bytes", &UniflowRecord::bytes)
        .def("__eq__", [](const UniflowRecord& a, const UniflowRecord& b) { return a == b; })
        .def("__repr__", [](const UniflowRecord& r) { return serialize_uniflow(r); });

    py::class_<BiflowRecord>(m, "BiflowRecord")
        .def(py::init<>())
        .def_readwrite("time", &BiflowRecord::time)
        .def_readwrite("duration", &BiflowRecord::duration)
        .def_readwrite("src_device", &BiflowRecord::src_device)
        .def_readwrite("dst_device", &BiflowRecord::dst_device)
        .def_readwrite("protocol", &BiflowRecord::protocol)
        .def_readwrite("src_port", &BiflowRecord::src_port)
        .def_readwrite("dst_port", &BiflowRecord::dst_port)
        .def_readwrite("src_packets", &BiflowRecord::src_packets)
        .def_readwrite("dst_packets", &BiflowRecord::dst_packets)
        .def_readwrite("src_bytes", &BiflowRecord::src_bytes)
        .def_readwrite("dst_bytes", &BiflowRecord::dst_bytes)
        .def("__eq__", [](const BiflowRecord& a, const BiflowRecord& b) { return a == b; })
        .def("__repr__", [](const BiflowRecord& r) { return serialize_biflow(r); });

    m.def("parse_uniflow", &parse_uniflow, py::arg("line"), py::arg("line_no") = 0);
    m.def("serialize_uniflow", &serialize_uniflow);
    m.def("parse_biflow", &parse_biflow, py::arg("line"), py::arg("line_no") = 0);
    m.def("serialize_biflow", &serialize_biflow);

    py::class_<PortFrequencyTable>(m, "PortFrequencyTable")
        .def(py::init<>())
        .def(py::init<std::vector<std::uint16_t>>())
        .def("contains", &PortFrequencyTable::contains)
        .def_property_readonly("ranked", &PortFrequencyTable::ranked);

    m.def("build_port_frequency", &build_port_frequency, py::arg("flows"), py::arg("k") = 90);
    m.def(
        "decide_direction",
        [](const UniflowRecord& flow, const PortFrequencyTable& freq) {
            OrientedUniflow o = decide_direction(flow, freq);
            return py::make_tuple(o.flow, o.swapped);
        },
        py::arg("flow"), py::arg("freq") = PortFrequencyTable());
    m.def("filter_protocol", &filter_protocol);
    m.def("uniflow_to_seed_biflow", &uniflow_to_seed_biflow);

    py::class_<StitchConfig>(m, "StitchConfig")
        .def(py::init<>())
        .def_readwrite("inactivity_timeout", &StitchConfig::inactivity_timeout)
        .def_readwrite("report_interval", &StitchConfig::report_interval)
        .def_readwrite("top_k", &StitchConfig::top_k)
        .def_readwrite("tcp_only", &StitchConfig::tcp_only);

    py::class_<StitchTable>(m, "StitchTable")
        .def(py::init<StitchConfig>(), py::arg("config") = StitchConfig())
        .def(
            "ingest",
            [](StitchTable& t, const UniflowRecord& flow, const PortFrequencyTable& freq) {
                return t.ingest(decide_direction(flow, freq));
            },
            py::arg("flow"), py::arg("freq") = PortFrequencyTable())
        .def("advance_clock", &StitchTable::advance_clock)
        .def("flush", &StitchTable::flush)
        .def("__len__", &StitchTable::size);

    m.def("stitch", &stitch_all, py::arg("flows"), py::arg("config") = StitchConfig(),
          "Orient, filter and stitch a whole uniflow list");

    py::class_<MappingInterval>(m, "MappingInterval")
        .def(py::init<>())
        .def_readwrite("ip", &MappingInterval::ip)
        .def_readwrite("fqdn", &MappingInterval::fqdn)
        .def_readwrite("valid_from", &MappingInterval::valid_from)
        .def_readwrite("valid_to", &MappingInterval::valid_to)
        .def_readwrite("rank", &MappingInterval::rank);

    py::class_<TemporalIpMap>(m, "TemporalIpMap")
        .def(py::init<>())
        .def("add", &TemporalIpMap::add)
        .def("resolve", &TemporalIpMap::resolve)
        .def_property_readonly("ip_count", &TemporalIpMap::ip_count);

    m.def("apply_to_biflow", &apply_to_biflow);

    py::class_<DeidentConfig>(m, "DeidentConfig")
        .def(py::init<>())
        .def_readwrite("wellknown_port_max", &DeidentConfig::wellknown_port_max);

    py::class_<PseudonymRegistry>(m, "PseudonymRegistry")
        .def(py::init<DeidentConfig>(), py::arg("config") = DeidentConfig())
        .def("device", &PseudonymRegistry::device, py::arg("name"),
             py::arg("unresolved") = false)
        .def("port", &PseudonymRegistry::port)
        .def("user", &PseudonymRegistry::user)
        .def("process", &PseudonymRegistry::process)
        .def("domain", &PseudonymRegistry::domain)
        .def("save", &PseudonymRegistry::save_file)
        .def_static("load", &PseudonymRegistry::load_file, py::arg("path"),
                    py::arg("config") = DeidentConfig())
        .def("__len__", &PseudonymRegistry::entry_count);

    m.def("canonicalize_username", &canonicalize_username, py::arg("name"),
          py::arg("lowercase") = false);
    m.def("canonicalize_process", &canonicalize_process);
    m.def("normalize_json_line", &normalize_json_line,
          "Normalize one raw host event record; None when rejected");

    py::enum_<AccountClass>(m, "AccountClass")
        .value("USER", AccountClass::User)
        .value("COMPUTER_ACCOUNT", AccountClass::ComputerAccount)
        .value("SYSTEM", AccountClass::System)
        .value("LOCAL_ACCOUNT", AccountClass::LocalAccount);

    m.def(
        "classify_account",
        [](const std::string& user, const std::string& domain,
           const std::unordered_set<std::string>& known_hosts) {
            return classify_account(user, domain, known_hosts);
        },
        py::arg("user_name"), py::arg("domain_name"),
        py::arg("known_hosts") = std::unordered_set<std::string>());

    py::class_<GenConfig>(m, "GenConfig")
        .def(py::init<>())
        .def_readwrite("seed", &GenConfig::seed)
        .def_readwrite("sessions", &GenConfig::sessions)
        .def_readwrite("devices", &GenConfig::devices)
        .def_readwrite("users", &GenConfig::users)
        .def_readwrite("duplication", &GenConfig::duplication)
        .def_readwrite("reverse_drop", &GenConfig::reverse_drop)
        .def_readwrite("long_flow_prob", &GenConfig::long_flow_prob)
        .def_readwrite("jitter", &GenConfig::jitter)
        .def_readwrite("w_tcp", &GenConfig::w_tcp)
        .def_readwrite("w_udp", &GenConfig::w_udp)
        .def_readwrite("w_icmp", &GenConfig::w_icmp)
        .def_readwrite("window_days", &GenConfig::window_days)
        .def_readwrite("host_chains", &GenConfig::host_chains)
        .def_readwrite("process_pairs", &GenConfig::process_pairs)
        .def_readwrite("renewal_hosts", &GenConfig::renewal_hosts)
        .def_readwrite("decorated_fraction", &GenConfig::decorated_fraction)
        .def_readwrite("variant_name_fraction", &GenConfig::variant_name_fraction);

    py::class_<GroundTruthSession>(m, "GroundTruthSession")
        .def_readonly("initiator", &GroundTruthSession::initiator)
        .def_readonly("responder", &GroundTruthSession::responder)
        .def_readonly("fwd_packets", &GroundTruthSession::fwd_packets)
        .def_readonly("fwd_bytes", &GroundTruthSession::fwd_bytes)
        .def_readonly("rev_packets", &GroundTruthSession::rev_packets)
        .def_readonly("rev_bytes", &GroundTruthSession::rev_bytes)
        .def_readonly("start", &GroundTruthSession::start)
        .def_readonly("end", &GroundTruthSession::end)
        .def_readonly("dup_factor", &GroundTruthSession::dup_factor)
        .def_readonly("reverse_dropped", &GroundTruthSession::reverse_dropped);

    py::class_<NetworkData>(m, "NetworkData")
        .def_readonly("uniflows", &NetworkData::uniflows)
        .def_readonly("truth", &NetworkData::truth)
        .def_readonly("mappings", &NetworkData::mappings);

    py::class_<HostData>(m, "HostData")
        .def_readonly("raw_json", &HostData::raw_json);

    m.def("generate_network", &generate_network);
    m.def("generate_host_events", &generate_host_events);

    m.def("run_cli", &cli::run, "Run a CLI subcommand in-process; returns the exit code");
    m.attr("__version__") = "0.1.0";
}
