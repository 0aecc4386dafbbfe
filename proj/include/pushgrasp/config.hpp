#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pushgrasp/common.hpp"

namespace pg {

/// Flat dotted-key configuration. Every tunable lives here so a run's
/// effective config can be echoed verbatim next to its outputs.
/// Unknown keys are rejected at load/override time.
class Config {
public:
    Config();  // populated with registered defaults

    void load_file(const std::string& path);
    void apply_override(const std::string& key_equals_value);
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;
    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    std::int64_t get_i64(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::string get_string(const std::string& key) const;

    /// Deterministic key-sorted dump of the effective configuration.
    std::string echo() const;
    void write(const std::string& path) const;

    std::vector<std::string> keys() const;

private:
    const std::string& raw(const std::string& key) const;
    std::map<std::string, std::string> values_;
};

}  // namespace pg
