#include "pathdep/config.hpp"

#include "pathdep/csv.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace pathdep {

namespace {

using KeyMap = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

std::map<std::string, KeyMap> parse_sections(const std::string& text) {
    std::map<std::string, KeyMap> sections;
    std::istringstream in(text);
    std::string line, current = "";
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": unclosed section");
            current = trim(line.substr(1, line.size() - 2));
            sections[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        sections[current][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return sections;
}

const std::string* find(const std::map<std::string, KeyMap>& sections,
                        const std::string& sec, const std::string& key) {
    const auto s = sections.find(sec);
    if (s == sections.end()) return nullptr;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
}

double num(const std::map<std::string, KeyMap>& sections, const std::string& sec,
           const std::string& key, double fallback) {
    const std::string* v = find(sections, sec, key);
    if (!v) return fallback;
    try {
        std::size_t pos = 0;
        const double x = std::stod(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw ConfigError("bad number for " + sec + "." + key + ": " + *v);
    }
}

std::string str(const std::map<std::string, KeyMap>& sections, const std::string& sec,
                const std::string& key, const std::string& fallback) {
    const std::string* v = find(sections, sec, key);
    return v ? *v : fallback;
}

template <typename T, typename Fn>
std::vector<T> parse_list(const std::string& text, Fn convert) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(convert(item));
    }
    return out;
}

ExperimentConfig::Kind parse_kind(const std::string& s) {
    if (s == "forward") return ExperimentConfig::Kind::Forward;
    if (s == "reverse") return ExperimentConfig::Kind::Reverse;
    if (s == "grid_rate") return ExperimentConfig::Kind::GridRate;
    if (s == "remainder") return ExperimentConfig::Kind::Remainder;
    throw ConfigError("unknown experiment kind: " + s);
}

std::string kind_name(ExperimentConfig::Kind k) {
    switch (k) {
        case ExperimentConfig::Kind::Forward: return "forward";
        case ExperimentConfig::Kind::Reverse: return "reverse";
        case ExperimentConfig::Kind::GridRate: return "grid_rate";
        default: return "remainder";
    }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    const auto sections = parse_sections(text);
    ExperimentConfig c;

    c.kind = parse_kind(str(sections, "experiment", "kind", "forward"));
    const std::string preset = str(sections, "experiment", "preset", "forward");
    if (preset == "forward")
        c.preset = ExperimentConfig::Preset::Forward;
    else if (preset == "reverse")
        c.preset = ExperimentConfig::Preset::Reverse;
    else
        throw ConfigError("unknown preset: " + preset);

    c.alpha = num(sections, "experiment", "alpha", c.alpha);
    if (const std::string* v = find(sections, "experiment", "epsilons"))
        c.epsilons = parse_list<double>(*v, [](const std::string& s) { return std::stod(s); });
    c.n_samples = static_cast<std::size_t>(num(sections, "experiment", "n_samples",
                                               static_cast<double>(c.n_samples)));
    c.seed = static_cast<std::uint64_t>(num(sections, "experiment", "seed", 0.0));
    c.workers = static_cast<std::size_t>(num(sections, "experiment", "workers", 1.0));
    if (c.workers == 0) c.workers = 1;

    c.t_end = num(sections, "grid", "t_end", c.t_end);
    c.delay = num(sections, "grid", "delay", c.delay);
    c.master_cells = static_cast<std::size_t>(
        num(sections, "grid", "master_cells", static_cast<double>(c.master_cells)));

    c.m = static_cast<std::size_t>(num(sections, "model", "m", 1.0));
    c.d = static_cast<std::size_t>(num(sections, "model", "d", 1.0));
    c.drift_spec = str(sections, "model", "drift", c.drift_spec);
    c.diffusion_spec = str(sections, "model", "diffusion", c.diffusion_spec);
    if (const std::string* v = find(sections, "model", "x0"))
        c.x0 = parse_list<double>(*v, [](const std::string& s) { return std::stod(s); });

    c.driver = DriverSpec::parse(str(sections, "driver", "h", "zero"));

    if (const std::string* v = find(sections, "sweep", "cells"))
        c.sweep_cells = parse_list<std::size_t>(
            *v, [](const std::string& s) { return static_cast<std::size_t>(std::stoul(s)); });
    c.sweep_family = str(sections, "sweep", "family", c.sweep_family);
    c.balance_cap = num(sections, "sweep", "balance_cap", c.balance_cap);

    try {
        c.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream body;
    body << in.rdbuf();
    return parse_config(body.str());
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "[experiment]\n";
    os << "kind = " << kind_name(c.kind) << "\n";
    os << "preset = "
       << (c.preset == ExperimentConfig::Preset::Forward ? "forward" : "reverse") << "\n";
    os << "alpha = " << format_g17(c.alpha) << "\n";
    os << "epsilons = ";
    for (std::size_t i = 0; i < c.epsilons.size(); ++i)
        os << (i ? ", " : "") << format_g17(c.epsilons[i]);
    os << "\n";
    os << "n_samples = " << c.n_samples << "\n";
    os << "seed = " << c.seed << "\n";
    os << "workers = " << c.workers << "\n\n";

    os << "[grid]\n";
    os << "t_end = " << format_g17(c.t_end) << "\n";
    os << "delay = " << format_g17(c.delay) << "\n";
    os << "master_cells = " << c.master_cells << "\n\n";

    os << "[model]\n";
    os << "m = " << c.m << "\n";
    os << "d = " << c.d << "\n";
    os << "drift = " << c.drift_spec << "\n";
    os << "diffusion = " << c.diffusion_spec << "\n";
    os << "x0 = ";
    for (std::size_t i = 0; i < c.x0.size(); ++i) os << (i ? ", " : "") << format_g17(c.x0[i]);
    os << "\n\n";

    os << "[driver]\n";
    os << "h = " << c.driver.to_string() << "\n\n";

    os << "[sweep]\n";
    os << "cells = ";
    for (std::size_t i = 0; i < c.sweep_cells.size(); ++i)
        os << (i ? ", " : "") << c.sweep_cells[i];
    os << "\n";
    os << "family = " << c.sweep_family << "\n";
    os << "balance_cap = " << format_g17(c.balance_cap) << "\n";
    return os.str();
}

std::uint64_t config_hash(const ExperimentConfig& config) {
    const std::string text = serialize_config(config);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace pathdep
