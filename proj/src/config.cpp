#include "klslab/config.hpp"

#include <fstream>
#include <sstream>

#include "klslab/errors.hpp"

namespace klslab {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(const std::string& filename, int line, const std::string& what) {
    throw ConfigError(filename + ":" + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& filename, int line, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        fail(filename, line, "not a number: '" + value + "'");
    }
}

long long parse_int(const std::string& filename, int line, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        fail(filename, line, "not an integer: '" + value + "'");
    }
}

bool parse_bool(const std::string& filename, int line, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    fail(filename, line, "not a boolean: '" + value + "'");
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& filename) {
    ExperimentConfig config;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(filename, line_no, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(filename, line_no, "empty key");
        if (value.empty()) fail(filename, line_no, "empty value for '" + key + "'");

        if (key == "command") {
            config.command = value;
        } else if (key == "family") {
            try {
                config.family = family_from_string(value);
            } catch (const Error& e) {
                fail(filename, line_no, e.what());
            }
        } else if (key == "dim") {
            config.dim = static_cast<int>(parse_int(filename, line_no, value));
        } else if (key == "n_atoms") {
            config.n_atoms = static_cast<int>(parse_int(filename, line_no, value));
        } else if (key == "q") {
            config.q = static_cast<int>(parse_int(filename, line_no, value));
        } else if (key == "T") {
            config.t_end = parse_double(filename, line_no, value);
        } else if (key == "dt") {
            config.dt = parse_double(filename, line_no, value);
        } else if (key == "seed") {
            config.master_seed =
                static_cast<std::uint64_t>(parse_int(filename, line_no, value));
        } else if (key == "n_paths") {
            config.n_paths = static_cast<int>(parse_int(filename, line_no, value));
        } else if (key == "slack") {
            config.slack = parse_double(filename, line_no, value);
        } else if (key == "record_every") {
            config.record_every = static_cast<int>(parse_int(filename, line_no, value));
        } else if (key == "suite") {
            config.suite = value;
        } else if (key == "trace_cases") {
            config.trace_cases = static_cast<int>(parse_int(filename, line_no, value));
        } else if (key == "swap_cases") {
            config.swap_cases = static_cast<int>(parse_int(filename, line_no, value));
        } else if (key == "lemma_seeds") {
            config.lemma_seeds = static_cast<int>(parse_int(filename, line_no, value));
        } else if (key == "alpha") {
            config.alpha = parse_double(filename, line_no, value);
        } else if (key == "beta") {
            config.beta = parse_double(filename, line_no, value);
        } else if (key == "c") {
            config.c = parse_double(filename, line_no, value);
        } else if (key == "c_lv") {
            config.c_lv = parse_double(filename, line_no, value);
        } else if (key == "d_list") {
            config.d_list.clear();
            std::stringstream items(value);
            std::string item;
            while (std::getline(items, item, ',')) {
                config.d_list.push_back(parse_double(filename, line_no, trim(item)));
            }
        } else if (key == "inject_trace_violation") {
            config.inject_trace_violation = parse_bool(filename, line_no, value);
        } else if (key == "out") {
            config.out_dir = value;
        } else {
            fail(filename, line_no, "unknown key '" + key + "'");
        }
    }
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    return parse_config(in, path);
}

void validate_config(const ExperimentConfig& config) {
    if (config.command != "simulate" && config.command != "verify" &&
        config.command != "bounds") {
        throw ConfigError("command must be simulate, verify, or bounds (got '" +
                          config.command + "')");
    }
    if (config.dim < 1) throw ConfigError("dim >= 1 required");
    if (config.n_atoms < config.dim + 1) throw ConfigError("n_atoms > dim required");
    if (config.q < 2) throw ConfigError("q >= 2 required");
    if (config.n_paths < 1) throw ConfigError("n_paths >= 1 required");
    if (config.record_every < 1) throw ConfigError("record_every >= 1 required");
    if (config.slack < 1.0) throw ConfigError("slack >= 1 required");
    if (config.command == "simulate") {
        if (config.t_end <= 0.0) throw ConfigError("T > 0 required for simulate");
        if (config.dt <= 0.0 || config.dt > config.t_end) {
            throw ConfigError("0 < dt <= T required for simulate");
        }
        if (config.out_dir.empty()) {
            throw ConfigError("simulate requires an output directory (out = DIR)");
        }
    }
    if (config.command == "verify") {
        static const char* suites[] = {"trace",  "swap",       "moments",   "tensor-lemmas",
                                       "drift",  "martingale", "potential", "all"};
        bool known = false;
        for (const char* s : suites) known = known || config.suite == s;
        if (!known) throw ConfigError("unknown suite '" + config.suite + "'");
    }
    if (config.command == "bounds" && config.d_list.empty()) {
        throw ConfigError("bounds requires a nonempty d_list");
    }
}

}  // namespace klslab
