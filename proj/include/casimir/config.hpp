#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace casimir {

// key = value configuration; [section] lines group keys but do not scope them.
class Config {
public:
    static Config parse(std::istream& in, const std::string& origin = "config");
    // Rebuild from the `# config:` lines of a CSV header.
    static Config from_header(std::istream& in);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return values_.count(key) > 0; }

    // Typed getters. The *_or variants record the default so that it is echoed.
    std::string str(const std::string& key) const;
    std::string str_or(const std::string& key, const std::string& def) const;
    double num(const std::string& key) const;
    double num_or(const std::string& key, double def) const;
    int integer_or(const std::string& key, int def) const;
    std::vector<double> list(const std::string& key) const;
    std::vector<double> list_or(const std::string& key, const std::vector<double>& def) const;
    std::vector<std::string> words_or(const std::string& key, const std::string& def) const;

    // Every explicit key plus every default that was read, sorted by key.
    void echo(std::ostream& out) const;
    // Throws ConfigError naming the first key outside `known`.
    void check_known(const std::set<std::string>& known) const;

private:
    std::map<std::string, std::string> values_;
    mutable std::map<std::string, std::string> defaults_;
};

std::string format_number(double v);

// Runs one command; returns the process exit status (0, 2 config error, 3 numerical fault).
int run_command(const std::string& command, const Config& cfg, std::ostream& out, std::ostream& err);

const std::set<std::string>& known_config_keys();
const std::vector<std::string>& command_names();

}  // namespace casimir
