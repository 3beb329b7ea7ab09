#include "riskpde/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace riskpde {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.')
            return false;
    return true;
}

[[noreturn]] void fail(int line, const std::string& what) {
    throw std::invalid_argument("config line " + std::to_string(line) + ": " + what);
}

double parse_real_token(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    if (v.empty()) throw std::invalid_argument("key '" + key + "': empty number");
    std::size_t pos = 0;
    double out;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("key '" + key + "': '" + v + "' is not a number");
    }
    if (pos != v.size())
        throw std::invalid_argument("key '" + key + "': '" + v + "' is not a number");
    return out;
}

std::int64_t parse_int_token(const std::string& key, const std::string& raw) {
    const std::string v = trim(raw);
    std::int64_t out = 0;
    const char* b = v.data();
    const char* e = b + v.size();
    auto [p, ec] = std::from_chars(b, e, out);
    if (ec != std::errc{} || p != e)
        throw std::invalid_argument("key '" + key + "': '" + v + "' is not an integer");
    return out;
}

} // namespace

Config Config::parse_text(const std::string& text, const std::set<std::string>& allowed) {
    Config c;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (!valid_key(key)) fail(line_no, "bad key '" + key + "'");
        if (value.empty()) fail(line_no, "key '" + key + "' has no value");
        if (key != "schema" && !allowed.count(key)) fail(line_no, "unknown key '" + key + "'");
        if (!c.entries_.emplace(key, value).second)
            fail(line_no, "duplicate key '" + key + "'");
    }
    if (!c.has("schema"))
        throw std::invalid_argument("config: missing required key 'schema'");
    if (c.get_int("schema") != kConfigSchema)
        throw std::invalid_argument("config: unsupported schema " + c.entries_.at("schema"));
    return c;
}

Config Config::parse_file(const std::string& path, const std::set<std::string>& allowed) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_text(buf.str(), allowed);
}

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

double Config::get_real(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end())
        throw std::invalid_argument("config: missing required key '" + key + "'");
    return parse_real_token(key, it->second);
}

double Config::get_real(const std::string& key, double fallback) const {
    return has(key) ? get_real(key) : fallback;
}

std::int64_t Config::get_int(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end())
        throw std::invalid_argument("config: missing required key '" + key + "'");
    return parse_int_token(key, it->second);
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("key '" + key + "': '" + v + "' is not a boolean");
}

std::string Config::get_string(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end())
        throw std::invalid_argument("config: missing required key '" + key + "'");
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

std::vector<double> Config::get_real_list(const std::string& key) const {
    const std::string joined = get_string(key);
    std::vector<double> out;
    std::istringstream is(joined);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(parse_real_token(key, tok));
    if (out.empty()) throw std::invalid_argument("key '" + key + "': empty list");
    return out;
}

std::vector<std::int64_t> Config::get_int_list(const std::string& key) const {
    const std::string joined = get_string(key);
    std::vector<std::int64_t> out;
    std::istringstream is(joined);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(parse_int_token(key, tok));
    if (out.empty()) throw std::invalid_argument("key '" + key + "': empty list");
    return out;
}

std::string Config::canonical_text() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

std::string Config::hash() const { return fnv1a_hex(canonical_text()); }

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = digits[h & 0xf];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

} // namespace riskpde
