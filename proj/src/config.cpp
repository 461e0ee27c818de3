#include "pmqkd/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pmqkd::cfg {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    double x = parse_double(key, v);
    if (x != std::floor(x)) throw ConfigError(key + " must be an integer");
    return static_cast<long long>(x);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("bad boolean for " + key + ": '" + v + "'");
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

} // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
    ConfigFile f;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": bad section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (section.empty() || key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": key outside section");
        f.values[section + "." + key] = value;
    }
    return f;
}

ConfigFile ConfigFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::vector<double> ScanConfig::distances() const {
    if (!(distance_step > 0.0)) throw ConfigError("distance_step must be > 0");
    if (!(distance_max >= distance_min)) throw ConfigError("distance_max < distance_min");
    std::vector<double> out;
    for (double d = distance_min; d <= distance_max + 1e-9; d += distance_step)
        out.push_back(d);
    return out;
}

void RunConfig::set(const std::string& key, const std::string& v) {
    if (key == "channel.distance_km") channel.distance_km = parse_double(key, v);
    else if (key == "channel.attenuation_db_per_km") channel.attenuation_db_per_km = parse_double(key, v);
    else if (key == "channel.detector_efficiency") channel.detector_efficiency = parse_double(key, v);
    else if (key == "channel.dark_count_rate") channel.dark_count_rate = parse_double(key, v);
    else if (key == "channel.misalignment") channel.misalignment = parse_double(key, v);
    else if (key == "protocol.mu") protocol.mu = parse_double(key, v);
    else if (key == "protocol.nu") protocol.nu = parse_double(key, v);
    else if (key == "protocol.phase_slices") protocol.phase_slices = static_cast<int>(parse_int(key, v));
    else if (key == "protocol.ec_efficiency") protocol.ec_efficiency = parse_double(key, v);
    else if (key == "protocol.rounds") protocol.rounds = parse_double(key, v);
    else if (key == "protocol.epsilon") protocol.epsilon = parse_double(key, v);
    else if (key == "protocol.n_alpha") protocol.n_alpha = parse_double(key, v);
    else if (key == "protocol.prob_vacuum") protocol.prob_vacuum = parse_double(key, v);
    else if (key == "protocol.prob_weak") protocol.prob_weak = parse_double(key, v);
    else if (key == "protocol.prob_signal") protocol.prob_signal = parse_double(key, v);
    else if (key == "sim.seed") sim.seed = static_cast<std::uint64_t>(parse_int(key, v));
    else if (key == "sim.batch_size") sim.batch_size = static_cast<std::uint64_t>(parse_int(key, v));
    else if (key == "sim.threads") sim.threads = static_cast<int>(parse_int(key, v));
    else if (key == "sim.compensation_index") sim.compensation_index = static_cast<int>(parse_int(key, v));
    else if (key == "sim.drift_model") {
        if (v == "none") sim.drift.kind = mc::DriftModel::Kind::none;
        else if (v == "fixed_offset") sim.drift.kind = mc::DriftModel::Kind::fixed_offset;
        else if (v == "random_walk") sim.drift.kind = mc::DriftModel::Kind::random_walk;
        else throw ConfigError("sim.drift_model must be none|fixed_offset|random_walk");
    } else if (key == "sim.phi_delta") sim.drift.phi_delta = parse_double(key, v);
    else if (key == "sim.sigma") sim.drift.sigma = parse_double(key, v);
    else if (key == "sim.tag_ground_truth") sim.tag_ground_truth = parse_bool(key, v);
    else if (key == "scan.distance_min") scan.distance_min = parse_double(key, v);
    else if (key == "scan.distance_max") scan.distance_max = parse_double(key, v);
    else if (key == "scan.distance_step") scan.distance_step = parse_double(key, v);
    else if (key == "scan.optimize_mu") scan.options.optimize_mu = parse_bool(key, v);
    else if (key == "scan.mu_min") scan.options.mu_min = parse_double(key, v);
    else if (key == "scan.mu_max") scan.options.mu_max = parse_double(key, v);
    else if (key == "scan.nu_ratio") scan.options.nu_ratio = parse_double(key, v);
    else if (key == "scan.plob_include_detector") scan.options.plob_include_detector = parse_bool(key, v);
    else if (key == "scan.threads") scan.options.threads = static_cast<int>(parse_int(key, v));
    else throw ConfigError("unknown config key: " + key);
}

void RunConfig::apply(const ConfigFile& file) {
    for (const auto& [k, v] : file.values) set(k, v);
}

void RunConfig::apply_preset(const std::string& name) {
    if (name == "table1") {
        // the paper's simulation parameter table
        channel.dark_count_rate = 1e-8;
        channel.detector_efficiency = 0.2;
        protocol.ec_efficiency = 1.1;
        protocol.phase_slices = 16;
        protocol.epsilon = 1.7e-10;
        protocol.rounds = 1e12;
        return;
    }
    throw ConfigError("unknown preset: " + name);
}

std::map<std::string, std::string> RunConfig::echo() const {
    std::map<std::string, std::string> m;
    m["channel.distance_km"] = fmt(channel.distance_km);
    m["channel.attenuation_db_per_km"] = fmt(channel.attenuation_db_per_km);
    m["channel.detector_efficiency"] = fmt(channel.detector_efficiency);
    m["channel.dark_count_rate"] = fmt(channel.dark_count_rate);
    m["channel.misalignment"] = fmt(channel.misalignment);
    m["protocol.mu"] = fmt(protocol.mu);
    m["protocol.nu"] = fmt(protocol.nu);
    m["protocol.phase_slices"] = std::to_string(protocol.phase_slices);
    m["protocol.ec_efficiency"] = fmt(protocol.ec_efficiency);
    m["protocol.rounds"] = fmt(protocol.rounds);
    m["protocol.epsilon"] = fmt(protocol.epsilon);
    m["protocol.n_alpha"] = fmt(protocol.n_alpha);
    m["protocol.prob_vacuum"] = fmt(protocol.prob_vacuum);
    m["protocol.prob_weak"] = fmt(protocol.prob_weak);
    m["protocol.prob_signal"] = fmt(protocol.prob_signal);
    m["sim.seed"] = std::to_string(sim.seed);
    m["sim.batch_size"] = std::to_string(sim.batch_size);
    m["sim.threads"] = std::to_string(sim.threads);
    m["sim.compensation_index"] = std::to_string(sim.compensation_index);
    m["sim.drift_model"] = sim.drift.kind == mc::DriftModel::Kind::none ? "none"
                           : sim.drift.kind == mc::DriftModel::Kind::fixed_offset
                               ? "fixed_offset"
                               : "random_walk";
    m["sim.phi_delta"] = fmt(sim.drift.phi_delta);
    m["sim.sigma"] = fmt(sim.drift.sigma);
    m["scan.distance_min"] = fmt(scan.distance_min);
    m["scan.distance_max"] = fmt(scan.distance_max);
    m["scan.distance_step"] = fmt(scan.distance_step);
    m["scan.nu_ratio"] = fmt(scan.options.nu_ratio);
    m["scan.optimize_mu"] = scan.options.optimize_mu ? "true" : "false";
    m["scan.plob_include_detector"] = scan.options.plob_include_detector ? "true" : "false";
    return m;
}

} // namespace pmqkd::cfg
