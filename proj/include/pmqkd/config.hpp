#ifndef PMQKD_CONFIG_HPP
#define PMQKD_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "pmqkd/montecarlo.hpp"
#include "pmqkd/params.hpp"
#include "pmqkd/rates.hpp"

namespace pmqkd::cfg {

/// Sectioned key = value text ([channel], [protocol], [sim], [scan]);
/// '#' starts a comment. Unknown keys are rejected, naming the key.
struct ConfigFile {
    std::map<std::string, std::string> values; // "section.key" -> raw text
    static ConfigFile parse(const std::string& text);
    static ConfigFile load(const std::string& path);
};

struct ScanConfig {
    double distance_min = 0.0;
    double distance_max = 500.0;
    double distance_step = 2.0;
    rates::ScanOptions options;
    std::vector<double> distances() const;
};

/// Effective configuration of one CLI invocation; file values first, flag
/// overrides applied on top.
struct RunConfig {
    ChannelParams channel;
    ProtocolParams protocol;
    mc::SimConfig sim;       // channel/protocol mirrored in
    ScanConfig scan;
    void apply(const ConfigFile& file);
    void apply_preset(const std::string& name);
    void set(const std::string& dotted_key, const std::string& value);
    /// Echo of every effective key, for output metadata.
    std::map<std::string, std::string> echo() const;
};

} // namespace pmqkd::cfg

#endif
