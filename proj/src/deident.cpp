#include "flowstitch/deident.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "flowstitch/util.hpp"

namespace flowstitch {

namespace {

constexpr const char* kMagic = "!pseudonyms";
constexpr const char* kVersion = "1";

struct PrefixSeq {
    std::string prefix;
    std::uint64_t seq = 0;
};

PrefixSeq split_pseudonym(const std::string& pseudonym) {
    std::size_t i = 0;
    while (i < pseudonym.size() && (pseudonym[i] < '0' || pseudonym[i] > '9')) ++i;
    PrefixSeq out;
    out.prefix = pseudonym.substr(0, i);
    std::uint64_t seq = 0;
    for (; i < pseudonym.size(); ++i) {
        char c = pseudonym[i];
        if (c < '0' || c > '9') break;
        seq = seq * 10 + static_cast<std::uint64_t>(c - '0');
    }
    out.seq = seq;
    return out;
}

void write_category(std::ostream& out, const char* category,
                    const std::unordered_map<std::string, std::string>& table) {
    std::vector<const std::pair<const std::string, std::string>*> rows;
    rows.reserve(table.size());
    for (const auto& kv : table) rows.push_back(&kv);
    std::sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) {
        PrefixSeq pa = split_pseudonym(a->second);
        PrefixSeq pb = split_pseudonym(b->second);
        if (pa.prefix != pb.prefix) return pa.prefix < pb.prefix;
        if (pa.seq != pb.seq) return pa.seq < pb.seq;
        return a->first < b->first;
    });
    for (const auto* kv : rows) {
        out << category << '\t' << kv->first << '\t' << kv->second << '\n';
    }
}

}  // namespace

PseudonymRegistry::PseudonymRegistry(DeidentConfig config) : config_(std::move(config)) {}

const std::string& PseudonymRegistry::merged(const std::string& real) const {
    auto it = config_.merge_map.find(real);
    return it == config_.merge_map.end() ? real : it->second;
}

std::string PseudonymRegistry::assign(std::unordered_map<std::string, std::string>& table,
                                      const std::string& real, const char* prefix,
                                      std::uint64_t& sequence, int digits) {
    if (auto it = table.find(real); it != table.end()) return it->second;
    if (real.find('\t') != std::string::npos || real.find('\n') != std::string::npos) {
        throw std::invalid_argument("identifier contains control characters: '" + real + "'");
    }
    std::string pseudonym = prefix + zero_pad(++sequence, digits);
    table.emplace(real, pseudonym);
    return pseudonym;
}

std::string PseudonymRegistry::device(const std::string& name, bool unresolved) {
    const std::string& real = merged(name);
    if (config_.core_hosts.count(real)) return real;
    if (auto it = devices_.find(real); it != devices_.end()) return it->second;
    return unresolved ? assign(devices_, real, "IP", ip_seq_, config_.device_digits)
                      : assign(devices_, real, "Comp", comp_seq_, config_.device_digits);
}

std::string PseudonymRegistry::port(int port) {
    if (port < 0 || port > 65535) {
        throw std::out_of_range("port out of range 0..65535: " + std::to_string(port));
    }
    if (port <= config_.wellknown_port_max) return std::to_string(port);
    return assign(ports_, std::to_string(port), "Port", port_seq_, config_.port_digits);
}

std::pair<std::string, std::string> PseudonymRegistry::user(const std::string& username,
                                                            const std::string& domain) {
    const std::string& real_user = merged(username);
    std::string domain_id = this->domain(domain);
    if (config_.system_users.count(real_user)) return {real_user, domain_id};
    if (!real_user.empty() && real_user.back() == '$') {
        // Computer accounts track their computer across both data sets.
        std::string base = real_user.substr(0, real_user.size() - 1);
        return {device(base, false) + "$", domain_id};
    }
    std::string key = real_user + "@" + merged(domain);
    return {assign(users_, key, "User", user_seq_, config_.user_digits), domain_id};
}

std::string PseudonymRegistry::process(const std::string& name) {
    const std::string& real = merged(name);
    std::size_t dot = real.find_last_of('.');
    std::string base = (dot == std::string::npos || dot == 0) ? real : real.substr(0, dot);
    std::string id = assign(processes_, base, "Proc", process_seq_, config_.process_digits);
    if (dot == std::string::npos || dot == 0) return id;
    return id + real.substr(dot);
}

std::string PseudonymRegistry::domain(const std::string& name) {
    if (name.empty()) return name;
    const std::string& real = merged(name);
    if (config_.core_hosts.count(real)) return real;
    return assign(domains_, real, "Domain", domain_seq_, config_.domain_digits);
}

std::size_t PseudonymRegistry::entry_count() const {
    return devices_.size() + ports_.size() + users_.size() + processes_.size() + domains_.size();
}

void PseudonymRegistry::save(std::ostream& out) const {
    out << kMagic << '\t' << kVersion << '\n';
    write_category(out, "device", devices_);
    write_category(out, "port", ports_);
    write_category(out, "user", users_);
    write_category(out, "process", processes_);
    write_category(out, "domain", domains_);
    out << "!end\t" << entry_count() << '\n';
}

void PseudonymRegistry::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open registry file for writing: " + path);
    save(out);
    if (!out) throw std::runtime_error("write failure on registry file: " + path);
}

PseudonymRegistry PseudonymRegistry::load(std::istream& in, DeidentConfig config) {
    PseudonymRegistry reg(std::move(config));
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError(1, "", "empty registry file");
    ++line_no;
    auto header = split_fields(line, '\t');
    if (header.size() != 2 || header[0] != kMagic) {
        throw ParseError(line_no, "", "not a pseudonym registry file");
    }
    if (header[1] != kVersion) {
        throw ParseError(line_no, "",
                         "unsupported registry version '" + std::string(header[1]) + "'");
    }

    std::size_t entries = 0;
    bool saw_footer = false;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_fields(line, '\t');
        if (fields.size() == 2 && fields[0] == "!end") {
            std::uint64_t declared = parse_u64(fields[1], "entry count", line_no);
            if (declared != entries) {
                throw ParseError(line_no, "",
                                 "corrupt registry: expected " + std::to_string(declared) +
                                     " entries, found " + std::to_string(entries));
            }
            saw_footer = true;
            break;
        }
        if (fields.size() != 3) {
            throw ParseError(line_no, "", "corrupt registry: malformed entry");
        }
        std::string category(fields[0]);
        std::string real(fields[1]);
        std::string pseudonym(fields[2]);
        if (real.empty() || pseudonym.empty()) {
            throw ParseError(line_no, "", "corrupt registry: empty field");
        }
        std::unordered_map<std::string, std::string>* table = nullptr;
        if (category == "device") {
            table = &reg.devices_;
        } else if (category == "port") {
            table = &reg.ports_;
        } else if (category == "user") {
            table = &reg.users_;
        } else if (category == "process") {
            table = &reg.processes_;
        } else if (category == "domain") {
            table = &reg.domains_;
        } else {
            throw ParseError(line_no, "", "corrupt registry: unknown category '" + category + "'");
        }
        if (!table->emplace(real, pseudonym).second) {
            throw ParseError(line_no, "", "corrupt registry: duplicate entry for '" + real + "'");
        }
        PrefixSeq ps = split_pseudonym(pseudonym);
        if (ps.prefix == "Comp") {
            reg.comp_seq_ = std::max(reg.comp_seq_, ps.seq);
        } else if (ps.prefix == "IP") {
            reg.ip_seq_ = std::max(reg.ip_seq_, ps.seq);
        } else if (ps.prefix == "Port") {
            reg.port_seq_ = std::max(reg.port_seq_, ps.seq);
        } else if (ps.prefix == "User") {
            reg.user_seq_ = std::max(reg.user_seq_, ps.seq);
        } else if (ps.prefix == "Proc") {
            reg.process_seq_ = std::max(reg.process_seq_, ps.seq);
        } else if (ps.prefix == "Domain") {
            reg.domain_seq_ = std::max(reg.domain_seq_, ps.seq);
        }
        ++entries;
    }
    if (!saw_footer) {
        throw ParseError(line_no, "", "corrupt registry: missing end marker (truncated file?)");
    }
    return reg;
}

PseudonymRegistry PseudonymRegistry::load_file(const std::string& path, DeidentConfig config) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open registry file: " + path);
    return load(in, std::move(config));
}

}  // namespace flowstitch
