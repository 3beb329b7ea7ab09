#pragma once

// Flat key-value config files: one `key = value` per line, `#` comments,
// blank lines ignored. Every file must carry `schema = 1`. Keys outside the
// caller's allowed set are hard errors, as are duplicates and type
// mismatches; errors name the offending line.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace riskpde {

inline constexpr int kConfigSchema = 1;

class Config {
public:
    static Config parse_file(const std::string& path, const std::set<std::string>& allowed);
    static Config parse_text(const std::string& text, const std::set<std::string>& allowed);

    bool has(const std::string& key) const;

    double get_real(const std::string& key) const;
    double get_real(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::vector<double> get_real_list(const std::string& key) const; // comma-separated
    std::vector<std::int64_t> get_int_list(const std::string& key) const;

    // Canonical "key = value" lines, sorted by key; input to the config hash.
    std::string canonical_text() const;
    // FNV-1a 64 digest of the canonical text, as 16 hex chars.
    std::string hash() const;

private:
    std::map<std::string, std::string> entries_;
};

std::string fnv1a_hex(const std::string& bytes);

} // namespace riskpde
