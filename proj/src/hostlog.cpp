#include "flowstitch/hostlog.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <istream>

#include <json.hpp>

#include "flowstitch/util.hpp"

namespace flowstitch {

namespace {

constexpr std::array<const char*, 18> kAttrNames = {
    "LogonType",         "LogonTypeDescription",
    "UserName",          "DomainName",
    "LogonID",           "SubjectUserName",
    "SubjectDomainName", "SubjectLogonID",
    "Status",            "Source",
    "ServiceName",       "Destination",
    "AuthenticationPackage", "FailureReason",
    "ProcessName",       "ProcessID",
    "ParentProcessName", "ParentProcessID",
};

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::optional<std::int64_t> to_int(const AttrValue& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
    const auto& s = std::get<std::string>(v);
    if (!all_digits(s) || s.size() > 18) return std::nullopt;
    std::int64_t out = 0;
    for (char c : s) out = out * 10 + (c - '0');
    return out;
}

std::string to_text(const AttrValue& v) {
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    return std::to_string(std::get<std::int64_t>(v));
}

}  // namespace

const char* attr_name(Attr attr) { return kAttrNames[static_cast<std::size_t>(attr)]; }

std::optional<Attr> attr_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kAttrNames.size(); ++i) {
        if (name == kAttrNames[i]) return static_cast<Attr>(i);
    }
    return std::nullopt;
}

std::optional<std::int64_t> HostEvent::int_attr(Attr attr) const {
    const AttrValue* v = find(attr);
    if (!v) return std::nullopt;
    return to_int(*v);
}

std::optional<std::string> HostEvent::text_attr(Attr attr) const {
    const AttrValue* v = find(attr);
    if (!v) return std::nullopt;
    return to_text(*v);
}

const std::set<int> kEventIds = {4768, 4769, 4770, 4774, 4776, 4624, 4625, 4634, 4647, 4648,
                                 4672, 4800, 4801, 4802, 4803, 4688, 4689, 4608, 4609, 1100};

const std::set<int> kLogonTypes = {0, 2, 3, 4, 5, 7, 8, 9, 10, 11, 12};

const char* logon_type_description(int logon_type) {
    switch (logon_type) {
        case 0: return "System";
        case 2: return "Interactive";
        case 3: return "Network";
        case 4: return "Batch";
        case 5: return "Service";
        case 7: return "Unlock";
        case 8: return "NetworkCleartext";
        case 9: return "NewCredentials";
        case 10: return "RemoteInteractive";
        case 11: return "CachedInteractive";
        case 12: return "CachedRemoteInteractive";
        default: return "";
    }
}

AttributeMatrix AttributeMatrix::appendix_default() {
    AttributeMatrix m;
    m.event_ids_ = kEventIds;
    const std::set<int> system_events = {4608, 4609, 1100};
    const std::set<int> no_logon_id = {4768, 4769, 4770, 4774, 4776};

    for (int id : kEventIds) m.rows_[id] = {};
    auto grant = [&](const std::set<int>& ids, Attr a) {
        for (int id : ids) m.rows_[id].insert(a);
    };
    auto grant_all_except = [&](const std::set<int>& excluded, Attr a) {
        for (int id : kEventIds) {
            if (!excluded.count(id)) m.rows_[id].insert(a);
        }
    };

    grant({4624, 4625, 4634}, Attr::LogonType);
    grant({4624, 4625, 4634}, Attr::LogonTypeDescription);
    grant_all_except(system_events, Attr::UserName);
    grant_all_except(system_events, Attr::DomainName);
    grant_all_except(no_logon_id, Attr::LogonID);
    grant({4648, 4774}, Attr::SubjectUserName);
    grant({4648, 4774}, Attr::SubjectDomainName);
    grant({4648}, Attr::SubjectLogonID);
    grant({4768, 4769, 4776}, Attr::Status);
    grant({4624, 4625, 4648, 4768, 4769, 4770, 4776}, Attr::Source);
    grant({4769, 4770}, Attr::ServiceName);
    grant({4648}, Attr::Destination);
    grant({4624, 4625, 4776}, Attr::AuthenticationPackage);
    grant({4625}, Attr::FailureReason);
    grant({4624, 4625, 4648, 4688, 4689}, Attr::ProcessName);
    grant({4624, 4625, 4648, 4688, 4689}, Attr::ProcessID);
    grant({4688}, Attr::ParentProcessName);
    grant({4688}, Attr::ParentProcessID);

    // Subject* on 4624 is permitted only for NewCredentials logons.
    m.conditionals_.push_back(
        {4624, 9, {Attr::SubjectUserName, Attr::SubjectDomainName, Attr::SubjectLogonID}});
    return m;
}

AttributeMatrix AttributeMatrix::from_json(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(0, "", std::string("matrix file: ") + e.what());
    }
    AttributeMatrix m;
    if (!doc.is_object() || !doc.contains("events") || !doc["events"].is_object()) {
        throw ParseError(0, "", "matrix file: missing 'events' object");
    }
    for (const auto& [key, attrs] : doc["events"].items()) {
        int event_id = static_cast<int>(parse_i64(key, "EventID"));
        std::set<Attr> row;
        for (const auto& name : attrs) {
            auto attr = attr_from_name(name.get<std::string>());
            if (!attr) {
                throw ParseError(0, "", "matrix file: unknown attribute '" +
                                            name.get<std::string>() + "'");
            }
            row.insert(*attr);
        }
        m.rows_[event_id] = std::move(row);
        m.event_ids_.insert(event_id);
    }
    if (doc.contains("conditional")) {
        for (const auto& c : doc["conditional"]) {
            Conditional cond;
            cond.event_id = c.at("event").get<int>();
            cond.logon_type = c.at("logon_type").get<std::int64_t>();
            for (const auto& name : c.at("attrs")) {
                auto attr = attr_from_name(name.get<std::string>());
                if (!attr) {
                    throw ParseError(0, "", "matrix file: unknown attribute '" +
                                                name.get<std::string>() + "'");
                }
                cond.attrs.insert(*attr);
            }
            m.conditionals_.push_back(std::move(cond));
        }
    }
    return m;
}

bool AttributeMatrix::allows(int event_id, Attr attr,
                             std::optional<std::int64_t> logon_type) const {
    auto it = rows_.find(event_id);
    if (it == rows_.end()) return false;
    if (it->second.count(attr)) return true;
    if (!logon_type) return false;
    for (const Conditional& c : conditionals_) {
        if (c.event_id == event_id && c.logon_type == *logon_type && c.attrs.count(attr)) {
            return true;
        }
    }
    return false;
}

std::vector<RenameRule> default_renames() {
    return {
        {"TargetUserName", Attr::UserName, 0},
        {"MappedName", Attr::UserName, 4774},
        {"AccountName", Attr::UserName, 4778},
        {"AccountName", Attr::UserName, 4779},
        {"TargetDomainName", Attr::DomainName, 0},
        {"TargetLogonId", Attr::LogonID, 0},
        {"AuthenticationPackageName", Attr::AuthenticationPackage, 0},
    };
}

std::vector<RenameRule> load_renames(std::istream& in) {
    std::vector<RenameRule> rules;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_fields(line);
        if (fields.size() != 2 && fields.size() != 3) {
            throw ParseError(line_no, "", "expected raw,canonical[,event_id]");
        }
        auto attr = attr_from_name(fields[1]);
        if (!attr) {
            throw ParseError(line_no, "", "unknown canonical attribute '" +
                                              std::string(fields[1]) + "'");
        }
        RenameRule rule{std::string(fields[0]), *attr, 0};
        if (fields.size() == 3) {
            rule.event_id = static_cast<int>(parse_i64(fields[2], "EventID", line_no));
        }
        rules.push_back(std::move(rule));
    }
    return rules;
}

RawEvent parse_event(std::string_view json_line, std::size_t line_no) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(line_no, "",
                         "invalid JSON at offset " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_object()) {
        throw ParseError(line_no, "", "record is not a JSON object");
    }
    RawEvent raw;
    for (const auto& [key, value] : doc.items()) {
        if (value.is_null()) continue;  // absent attribute
        if (value.is_string()) {
            raw.fields.emplace(key, value.get<std::string>());
        } else if (value.is_number_integer()) {
            raw.fields.emplace(key, value.get<std::int64_t>());
        } else if (value.is_number_unsigned()) {
            raw.fields.emplace(key, static_cast<std::int64_t>(value.get<std::uint64_t>()));
        } else {
            throw ParseError(line_no, key, "value is not a flat scalar");
        }
    }
    return raw;
}

std::optional<HostEvent> standardize_attributes(const RawEvent& raw, const AttributeMatrix& matrix,
                                                const std::vector<RenameRule>& renames,
                                                NormalizeStats& stats,
                                                std::string* reject_reason) {
    auto reject = [&](std::string reason) -> std::optional<HostEvent> {
        ++stats.rejected;
        if (reject_reason) *reject_reason = std::move(reason);
        return std::nullopt;
    };

    auto id_it = raw.fields.find("EventID");
    if (id_it == raw.fields.end()) return reject("missing EventID");
    auto event_id = to_int(id_it->second);
    if (!event_id) return reject("non-numeric EventID");
    if (!matrix.known_event(static_cast<int>(*event_id))) {
        return reject("unknown EventID " + std::to_string(*event_id));
    }

    auto time_it = raw.fields.find("Time");
    if (time_it == raw.fields.end()) return reject("missing Time");
    auto time = to_int(time_it->second);
    if (!time) return reject("non-numeric Time");

    auto host_it = raw.fields.find("LogHost");
    if (host_it == raw.fields.end()) return reject("missing LogHost");
    std::string log_host = to_text(host_it->second);
    if (log_host.empty()) return reject("empty LogHost");

    HostEvent event;
    event.event_id = static_cast<int>(*event_id);
    event.time = *time;
    event.log_host = std::move(log_host);

    // Canonical spellings first, then collector variants for this EventID.
    std::map<Attr, AttrValue> named;
    for (const auto& [name, value] : raw.fields) {
        if (name == "EventID" || name == "Time" || name == "LogHost") continue;
        std::optional<Attr> attr = attr_from_name(name);
        if (!attr) {
            const RenameRule* match = nullptr;
            for (const RenameRule& rule : renames) {
                if (rule.raw != name) continue;
                if (rule.event_id == event.event_id) {
                    match = &rule;
                    break;
                }
                if (rule.event_id == 0 && match == nullptr) match = &rule;
            }
            if (match) {
                attr = match->canonical;
                ++stats.renamed_attrs;
            }
        }
        if (!attr) {
            ++stats.dropped_unknown_attrs;
            continue;
        }
        named.emplace(*attr, value);
    }

    std::optional<std::int64_t> logon_type;
    if (auto it = named.find(Attr::LogonType); it != named.end()) {
        logon_type = to_int(it->second);
        if (!logon_type) return reject("non-numeric LogonType");
        if (!kLogonTypes.count(static_cast<int>(*logon_type))) {
            return reject("invalid LogonType " + std::to_string(*logon_type));
        }
        it->second = *logon_type;
    }

    for (auto& [attr, value] : named) {
        if (!matrix.allows(event.event_id, attr, logon_type)) {
            ++stats.dropped_out_of_matrix;
            continue;
        }
        if (attr == Attr::ProcessID || attr == Attr::ParentProcessID) {
            if (auto n = to_int(value)) value = *n;
        }
        event.attrs.emplace(attr, std::move(value));
    }

    ++stats.accepted;
    return event;
}

std::string canonicalize_username(std::string_view name, bool lowercase) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
            s.remove_prefix(1);
        }
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
            s.remove_suffix(1);
        }
        return s;
    };
    std::string_view s = trim(name);
    if (std::size_t bs = s.rfind('\\'); bs != std::string_view::npos) {
        s = s.substr(bs + 1);
    }
    if (std::size_t at = s.find('@'); at != std::string_view::npos) {
        s = s.substr(0, at);
    }
    s = trim(s);
    if (s.empty()) return "EMPTY";
    std::string out(s);
    if (lowercase) {
        std::transform(out.begin(), out.end(), out.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    }
    return out;
}

namespace {

bool is_hex_digit(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

bool is_os_tag(std::string_view token) {
    static const std::array<const char*, 5> tags = {"win32", "win64", "x86", "x64", "amd64"};
    std::string lower(token);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return std::find(tags.begin(), tags.end(), lower) != tags.end();
}

bool valid_date_parts(int year, int month, int day) {
    return year >= 1900 && year <= 2099 && month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

bool is_yyyymmdd(std::string_view token) {
    if (token.size() != 8 || !all_digits(token)) return false;
    auto num = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) v = v * 10 + (token[i] - '0');
        return v;
    };
    return valid_date_parts(num(0, 4), num(4, 2), num(6, 2));
}

bool is_hex_token(std::string_view token) {
    if (token.size() < 6) return false;
    bool has_alpha = false;
    for (char c : token) {
        if (!is_hex_digit(c)) return false;
        if ((c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F')) has_alpha = true;
    }
    return has_alpha;
}

struct Token {
    char sep;  // '\0' for the first token
    std::string text;
};

std::vector<Token> tokenize(std::string_view base) {
    std::vector<Token> tokens;
    Token current{'\0', {}};
    for (char c : base) {
        if (c == '.' || c == '_' || c == '-') {
            tokens.push_back(std::move(current));
            current = {c, {}};
        } else {
            current.text.push_back(c);
        }
    }
    tokens.push_back(std::move(current));
    return tokens;
}

std::string canonicalize_base(std::string_view base) {
    std::vector<Token> tokens = tokenize(base);
    std::string out;
    const char* prev_placeholder = nullptr;
    std::size_t i = 0;
    while (i < tokens.size()) {
        const char* placeholder = nullptr;
        std::size_t consumed = 1;
        const std::string& t = tokens[i].text;
        // yyyy-mm-dd spans three tokens joined by '-'
        if (i + 2 < tokens.size() && t.size() == 4 && all_digits(t) &&
            tokens[i + 1].sep == '-' && tokens[i + 2].sep == '-' &&
            tokens[i + 1].text.size() == 2 && all_digits(tokens[i + 1].text) &&
            tokens[i + 2].text.size() == 2 && all_digits(tokens[i + 2].text)) {
            int year = std::stoi(t);
            int month = std::stoi(tokens[i + 1].text);
            int day = std::stoi(tokens[i + 2].text);
            if (valid_date_parts(year, month, day)) {
                placeholder = "DATE";
                consumed = 3;
            }
        }
        if (!placeholder && !t.empty()) {
            if (is_os_tag(t)) {
                placeholder = "OS";
            } else if (is_yyyymmdd(t)) {
                placeholder = "DATE";
            } else if (is_hex_token(t)) {
                placeholder = "HEX";
            } else if (all_digits(t)) {
                placeholder = "VERSION";
            }
        }
        if (placeholder && prev_placeholder && std::string_view(placeholder) == prev_placeholder) {
            i += consumed;  // collapse repeated placeholders
            continue;
        }
        if (tokens[i].sep != '\0') out.push_back(tokens[i].sep);
        out += placeholder ? placeholder : t;
        prev_placeholder = placeholder;
        i += consumed;
    }
    return out;
}

}  // namespace

std::string canonicalize_process(std::string_view name) {
    std::size_t dot = name.find_last_of('.');
    std::string_view base = name;
    std::string_view ext;
    if (dot != std::string_view::npos && dot != 0) {
        base = name.substr(0, dot);
        ext = name.substr(dot);  // includes the dot
    }
    return canonicalize_base(base) + std::string(ext);
}

std::optional<HostEvent> normalize_event(const RawEvent& raw, const AttributeMatrix& matrix,
                                         const std::vector<RenameRule>& renames,
                                         NormalizeStats& stats, std::string* reject_reason) {
    auto event = standardize_attributes(raw, matrix, renames, stats, reject_reason);
    if (!event) return std::nullopt;
    for (Attr attr : {Attr::UserName, Attr::SubjectUserName, Attr::ServiceName}) {
        auto it = event->attrs.find(attr);
        if (it == event->attrs.end()) continue;
        std::string canonical = canonicalize_username(to_text(it->second));
        if (canonical == "EMPTY" && to_text(it->second) != "EMPTY") ++stats.empty_usernames;
        it->second = std::move(canonical);
    }
    for (Attr attr : {Attr::ProcessName, Attr::ParentProcessName}) {
        auto it = event->attrs.find(attr);
        if (it == event->attrs.end()) continue;
        it->second = canonicalize_process(to_text(it->second));
    }
    return event;
}

std::string to_json(const HostEvent& event) {
    nlohmann::ordered_json doc;
    doc["Time"] = event.time;
    doc["EventID"] = event.event_id;
    doc["LogHost"] = event.log_host;
    for (const auto& [attr, value] : event.attrs) {
        if (const auto* i = std::get_if<std::int64_t>(&value)) {
            doc[attr_name(attr)] = *i;
        } else {
            doc[attr_name(attr)] = std::get<std::string>(value);
        }
    }
    return doc.dump();
}

AccountClass classify_account(const std::string& user_name, const std::string& domain_name,
                              const std::unordered_set<std::string>& known_hosts,
                              const std::unordered_set<std::string>& system_users) {
    if (!user_name.empty() && user_name.back() == '$') return AccountClass::ComputerAccount;
    if (system_users.count(user_name)) return AccountClass::System;
    if (known_hosts.count(domain_name)) return AccountClass::LocalAccount;
    return AccountClass::User;
}

void ProcessStartIndex::add(const HostEvent& event) {
    if (event.event_id != 4688) return;
    auto pid = event.int_attr(Attr::ProcessID);
    auto name = event.text_attr(Attr::ProcessName);
    if (!pid || !name) return;
    starts_[{event.log_host, *pid}].push_back({event.time, order_++, std::move(*name)});
}

std::optional<std::string> ProcessStartIndex::resolve_parent(const std::string& log_host,
                                                             std::int64_t parent_process_id,
                                                             std::int64_t child_time) const {
    auto it = starts_.find({log_host, parent_process_id});
    if (it == starts_.end()) return std::nullopt;
    const Start* best = nullptr;
    for (const Start& s : it->second) {
        if (s.time > child_time) continue;
        if (!best || s.time > best->time || (s.time == best->time && s.order > best->order)) {
            best = &s;
        }
    }
    if (!best) return std::nullopt;
    return best->name;
}

}  // namespace flowstitch
