#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "casimir/config.hpp"
#include "casimir/error.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Sphere-plate Casimir force and experiment analysis"};
    std::string command, config_path, header_path, out_path;
    std::vector<std::string> overrides;
    app.add_option("command", command, "force|pfa|de|theta|electrostatic|patch|psd|edge-fit|median|band")->required();
    app.add_option("-c,--config", config_path, "key = value config file");
    app.add_option("--from-header", header_path, "rebuild the config from a previous output header");
    app.add_option("-s,--set", overrides, "override one key: key=value");
    app.add_option("-o,--output", out_path, "output file (default stdout)");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    casimir::Config cfg;
    try {
        if (!config_path.empty() && !header_path.empty())
            throw casimir::ConfigError("use either --config or --from-header");
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw casimir::ConfigError("cannot open config '" + config_path + "'");
            cfg = casimir::Config::parse(f, config_path);
        } else if (!header_path.empty()) {
            std::ifstream f(header_path);
            if (!f) throw casimir::ConfigError("cannot open '" + header_path + "'");
            cfg = casimir::Config::from_header(f);
        }
        for (const auto& kv : overrides) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) throw casimir::ConfigError("--set expects key=value, got '" + kv + "'");
            cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
    } catch (const std::exception& e) {
        std::cerr << "casimir: error status=2 kind=config command=" << command << " message=\"" << e.what()
                  << "\"\n";
        return 2;
    }

    std::ostringstream buf;
    int rc = casimir::run_command(command, cfg, buf, std::cerr);
    if (rc != 0) return rc;
    if (out_path.empty()) {
        std::cout << buf.str();
    } else {
        std::ofstream f(out_path);
        f << buf.str();
        if (!f) {
            std::cerr << "casimir: error status=2 kind=config command=" << command << " message=\"cannot write '"
                      << out_path << "'\"\n";
            return 2;
        }
    }
    return 0;
}
