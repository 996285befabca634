#pragma once

// Command-line front end.  run() is the whole program minus process setup so
// tests can drive it in-process.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rotstar::cli {

/// Flat `key = value` configuration with dotted keys (scf.damping, radial.a, ...).
/// Only keys listed in known_keys() are accepted; values are validated on access.
class RunConfig {
public:
    static RunConfig parse(std::istream& in, const std::string& origin = "<config>");
    static RunConfig from_file(const std::string& path);
    static const std::vector<std::string>& known_keys();

    /// Overrides (or adds) a value; rejects unknown keys.
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::optional<std::string> raw(const std::string& key) const;

    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;

private:
    std::map<std::string, std::string> values_;
};

enum ExitCode : int { Success = 0, SolverFailure = 1, InvalidInput = 2 };

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace rotstar::cli
