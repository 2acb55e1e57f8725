#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace flowstitch::cli {

/// I/O failures (unopenable paths, write errors); exits with code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Runs one subcommand: stitch, resolve-fqdn, deident, parse-hostlog,
/// report, generate or pipeline. Returns the process exit code: 0 on
/// success, 1 on validation failure, 2 on I/O failure. All diagnostics go to
/// the error stream; data goes to files only.
int run(const std::vector<std::string>& args);

std::string version_string();

}  // namespace flowstitch::cli
