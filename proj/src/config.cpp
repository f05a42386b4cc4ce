#include "casimir/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "casimir/error.hpp"

namespace casimir {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
    std::string t = trim(text);
    if (t.empty()) throw ConfigError("config key '" + key + "': empty value");
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0' || errno == ERANGE)
        throw ConfigError("config key '" + key + "': not a number: '" + t + "'");
    return v;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',' || ch == ' ' || ch == '\t') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

Config Config::parse(std::istream& in, const std::string& origin) {
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + " line " + std::to_string(lineno) + ": malformed section header");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + " line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(origin + " line " + std::to_string(lineno) + ": empty key");
        if (cfg.values_.count(key))
            throw ConfigError(origin + " line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        cfg.values_[key] = value;
    }
    return cfg;
}

Config Config::from_header(std::istream& in) {
    const std::string tag = "# config:";
    std::ostringstream body;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(tag, 0) == 0) body << line.substr(tag.size()) << "\n";
    }
    std::istringstream ss(body.str());
    return parse(ss, "header");
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = trim(value); }

std::string Config::str(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
    return it->second;
}

std::string Config::str_or(const std::string& key, const std::string& def) const {
    auto it = values_.find(key);
    if (it != values_.end()) return it->second;
    defaults_[key] = def;
    return def;
}

double Config::num(const std::string& key) const { return parse_double(key, str(key)); }

double Config::num_or(const std::string& key, double def) const {
    if (has(key)) return num(key);
    defaults_[key] = format_number(def);
    return def;
}

int Config::integer_or(const std::string& key, int def) const {
    if (!has(key)) {
        defaults_[key] = std::to_string(def);
        return def;
    }
    double v = num(key);
    if (v != static_cast<double>(static_cast<long long>(v)) || std::abs(v) > 1e9)
        throw ConfigError("config key '" + key + "': expected an integer");
    return static_cast<int>(v);
}

std::vector<double> Config::list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& w : split_list(str(key))) out.push_back(parse_double(key, w));
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

std::vector<double> Config::list_or(const std::string& key, const std::vector<double>& def) const {
    if (has(key)) return list(key);
    std::string s;
    for (size_t i = 0; i < def.size(); ++i) s += (i ? "," : "") + format_number(def[i]);
    defaults_[key] = s;
    return def;
}

std::vector<std::string> Config::words_or(const std::string& key, const std::string& def) const {
    auto w = split_list(str_or(key, def));
    if (w.empty()) throw ConfigError("config key '" + key + "': empty list");
    return w;
}

void Config::echo(std::ostream& out) const {
    std::map<std::string, std::string> all = defaults_;
    for (const auto& [k, v] : values_) all[k] = v;
    for (const auto& [k, v] : all) out << "# config: " << k << " = " << v << "\n";
}

void Config::check_known(const std::set<std::string>& known) const {
    for (const auto& [k, v] : values_)
        if (!known.count(k)) throw ConfigError("unknown config key '" + k + "'");
}

}  // namespace casimir
