#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace flowstitch {

struct DeidentConfig {
    int wellknown_port_max = 1023;  // ports 0..max pass through verbatim
    int device_digits = 6;
    int port_digits = 5;
    int user_digits = 6;
    int process_digits = 6;
    int domain_digits = 3;
    /// Account names that never map to a person and are released as-is.
    std::unordered_set<std::string> system_users = {"Anonymous", "Local Service",
                                                    "Network Service"};
    /// Core enterprise hosts released under their own (consolidated) names.
    std::unordered_set<std::string> core_hosts = {"ActiveDirectory", "EnterpriseAppServer"};
    /// Consolidation of well-known redundant entities: real value -> canonical
    /// real value, applied before lookup in every category.
    std::unordered_map<std::string, std::string> merge_map;
};

/// Persistent bijections from real identifiers to released identifiers,
/// shared by the network and host pipelines so values match across both.
/// Assignment is first-seen sequential; replays return the stored identifier.
class PseudonymRegistry {
public:
    explicit PseudonymRegistry(DeidentConfig config = {});

    /// Resolved devices map to "Comp"-prefixed identifiers, unresolved
    /// addresses to "IP"-prefixed ones. Core hosts pass through.
    std::string device(const std::string& name, bool unresolved);

    /// Well-known ports pass through as decimal text; the rest map to
    /// "Port"-prefixed identifiers. Throws std::out_of_range outside 0..65535.
    std::string port(int port);

    /// Returns (user id, domain id). A (username, domain) pair is one
    /// identity; a name ending in "$" maps to the computer's identifier plus
    /// "$"; system usernames pass through.
    std::pair<std::string, std::string> user(const std::string& username,
                                             const std::string& domain);

    /// The base name (before the final ".") is de-identified; the extension is
    /// re-appended verbatim. Extensionless names share the same base mapping.
    std::string process(const std::string& name);

    std::string domain(const std::string& name);

    const DeidentConfig& config() const { return config_; }

    /// Versioned line-oriented format: category<TAB>real<TAB>pseudonym.
    void save(std::ostream& out) const;
    void save_file(const std::string& path) const;
    static PseudonymRegistry load(std::istream& in, DeidentConfig config = {});
    static PseudonymRegistry load_file(const std::string& path, DeidentConfig config = {});

    std::size_t entry_count() const;

private:
    std::string assign(std::unordered_map<std::string, std::string>& table,
                       const std::string& real, const char* prefix, std::uint64_t& sequence,
                       int digits);
    const std::string& merged(const std::string& real) const;

    DeidentConfig config_;
    std::unordered_map<std::string, std::string> devices_;
    std::unordered_map<std::string, std::string> ports_;
    std::unordered_map<std::string, std::string> users_;  // keyed username@domain
    std::unordered_map<std::string, std::string> processes_;  // keyed by base name
    std::unordered_map<std::string, std::string> domains_;
    std::uint64_t comp_seq_ = 0;
    std::uint64_t ip_seq_ = 0;
    std::uint64_t port_seq_ = 0;
    std::uint64_t user_seq_ = 0;
    std::uint64_t process_seq_ = 0;
    std::uint64_t domain_seq_ = 0;
};

}  // namespace flowstitch
