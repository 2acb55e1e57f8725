#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

namespace flowstitch {

/// Optional event attributes, in canonical output order. Every record also
/// carries the mandatory EventID, LogHost and Time.
enum class Attr {
    LogonType,
    LogonTypeDescription,
    UserName,
    DomainName,
    LogonID,
    SubjectUserName,
    SubjectDomainName,
    SubjectLogonID,
    Status,
    Source,
    ServiceName,
    Destination,
    AuthenticationPackage,
    FailureReason,
    ProcessName,
    ProcessID,
    ParentProcessName,
    ParentProcessID,
};

const char* attr_name(Attr attr);
std::optional<Attr> attr_from_name(std::string_view name);

using AttrValue = std::variant<std::int64_t, std::string>;

/// Normalized Windows event record restricted to the permitted attribute set.
struct HostEvent {
    int event_id = 0;
    std::int64_t time = 0;
    std::string log_host;
    std::map<Attr, AttrValue> attrs;

    const AttrValue* find(Attr attr) const {
        auto it = attrs.find(attr);
        return it == attrs.end() ? nullptr : &it->second;
    }
    std::optional<std::int64_t> int_attr(Attr attr) const;
    std::optional<std::string> text_attr(Attr attr) const;

    bool operator==(const HostEvent&) const = default;
};

/// One JSON line, serialized with the mandatory triple first and the
/// remaining attributes in canonical order.
std::string to_json(const HostEvent& event);

extern const std::set<int> kEventIds;           // the released EventID universe
extern const std::set<int> kLogonTypes;         // 0,2,3,4,5,7,8,9,10,11,12
const char* logon_type_description(int logon_type);

/// Which attributes each EventID may carry, including the LogonType-9
/// conditional rows for 4624.
class AttributeMatrix {
public:
    static AttributeMatrix appendix_default();
    static AttributeMatrix from_json(std::istream& in);

    bool known_event(int event_id) const { return rows_.count(event_id) > 0; }
    bool allows(int event_id, Attr attr, std::optional<std::int64_t> logon_type) const;
    const std::set<int>& event_ids() const { return event_ids_; }

private:
    struct Conditional {
        int event_id;
        std::int64_t logon_type;
        std::set<Attr> attrs;
    };
    std::map<int, std::set<Attr>> rows_;
    std::vector<Conditional> conditionals_;
    std::set<int> event_ids_;
};

/// Collector-specific attribute spellings mapped to canonical names;
/// event_id 0 applies to every event, otherwise only to that EventID.
struct RenameRule {
    std::string raw;
    Attr canonical;
    int event_id = 0;
};

std::vector<RenameRule> default_renames();
std::vector<RenameRule> load_renames(std::istream& in);  // csv: raw,canonical[,event_id]

/// Flat attribute map of one raw JSON record.
struct RawEvent {
    std::map<std::string, AttrValue> fields;
};

/// Parses one JSON object line. Nested values and unsupported scalar types
/// raise ParseError with the byte offset. Null values are treated as absent.
RawEvent parse_event(std::string_view json_line, std::size_t line_no = 0);

struct NormalizeStats {
    std::uint64_t lines = 0;
    std::uint64_t empty_lines = 0;
    std::uint64_t accepted = 0;
    std::uint64_t rejected = 0;
    std::uint64_t renamed_attrs = 0;
    std::uint64_t dropped_unknown_attrs = 0;
    std::uint64_t dropped_out_of_matrix = 0;
    std::uint64_t empty_usernames = 0;
};

/// Renames EventID-specific attribute spellings, drops everything outside the
/// event's permitted row and checks the mandatory triple. Returns nullopt and
/// fills reject_reason for records outside the released universe.
std::optional<HostEvent> standardize_attributes(const RawEvent& raw, const AttributeMatrix& matrix,
                                                const std::vector<RenameRule>& renames,
                                                NormalizeStats& stats,
                                                std::string* reject_reason = nullptr);

/// Strips "DOMAIN\" and "@domain" decorations and surrounding whitespace;
/// preserves a trailing "$". Empty results become the "EMPTY" sentinel.
std::string canonicalize_username(std::string_view name, bool lowercase = false);

/// Rewrites version, date, OS-tag and hex tokens of the base name to
/// placeholders; the extension is untouched.
std::string canonicalize_process(std::string_view name);

/// standardize_attributes plus canonical username/process values.
std::optional<HostEvent> normalize_event(const RawEvent& raw, const AttributeMatrix& matrix,
                                         const std::vector<RenameRule>& renames,
                                         NormalizeStats& stats,
                                         std::string* reject_reason = nullptr);

enum class AccountClass { User, ComputerAccount, System, LocalAccount };

AccountClass classify_account(const std::string& user_name, const std::string& domain_name,
                              const std::unordered_set<std::string>& known_hosts,
                              const std::unordered_set<std::string>& system_users = {
                                  "Anonymous", "Local Service", "Network Service"});

/// Index of process start events, used to recover the extensioned name of a
/// parent process from its semi-unique ProcessID.
class ProcessStartIndex {
public:
    void add(const HostEvent& event);

    /// The ProcessName of the 4688 on `log_host` whose ProcessID matches,
    /// choosing the latest start not after `child_time`.
    std::optional<std::string> resolve_parent(const std::string& log_host,
                                              std::int64_t parent_process_id,
                                              std::int64_t child_time) const;

    std::size_t size() const { return starts_.size(); }

private:
    struct Start {
        std::int64_t time;
        std::uint64_t order;
        std::string name;
    };
    std::map<std::pair<std::string, std::int64_t>, std::vector<Start>> starts_;
    std::uint64_t order_ = 0;
};

}  // namespace flowstitch
