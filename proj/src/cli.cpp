#include "pmqkd/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <json.hpp>
#include <numbers>

#include "pmqkd/config.hpp"
#include "pmqkd/decoy.hpp"
#include "pmqkd/fock.hpp"
#include "pmqkd/io.hpp"
#include "pmqkd/model.hpp"
#include "pmqkd/montecarlo.hpp"
#include "pmqkd/rates.hpp"
#include "pmqkd/rng.hpp"

namespace pmqkd::cli {

namespace {

using nlohmann::json;

std::string fmt12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

struct Overrides {
    std::vector<std::pair<std::string, std::string>> kv;
    std::string config_path;
    std::string preset;

    void apply(cfg::RunConfig& rc) const {
        if (!config_path.empty()) rc.apply(cfg::ConfigFile::load(config_path));
        if (!preset.empty()) rc.apply_preset(preset);
        for (const auto& [k, v] : kv) rc.set(k, v);
    }
};

void add_common_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option_function<std::string>(
           "--config", [&ov](const std::string& v) { ov.config_path = v; },
           "config file (sectioned key = value)");
    cmd->add_option_function<std::string>(
           "--preset", [&ov](const std::string& v) { ov.preset = v; },
           "parameter preset (table1)");
    auto opt = [cmd, &ov](const std::string& flag, const std::string& key, const char* help) {
        cmd->add_option_function<std::string>(
            flag, [&ov, key](const std::string& v) { ov.kv.emplace_back(key, v); }, help);
    };
    opt("--distance_km", "channel.distance_km", "fiber length, km");
    opt("--attenuation_db_per_km", "channel.attenuation_db_per_km", "fiber attenuation");
    opt("--detector_efficiency", "channel.detector_efficiency", "detector efficiency");
    opt("--dark_count_rate", "channel.dark_count_rate", "dark counts per pulse per detector");
    opt("--misalignment", "channel.misalignment", "misalignment error e0");
    opt("--e0", "channel.misalignment", "alias of --misalignment");
    opt("--mu", "protocol.mu", "signal total intensity");
    opt("--nu", "protocol.nu", "weak decoy total intensity");
    opt("--phase_slices", "protocol.phase_slices", "number of discrete phases D");
    opt("--ec_efficiency", "protocol.ec_efficiency", "error correction efficiency f");
    opt("--rounds", "protocol.rounds", "protocol rounds N");
    opt("--epsilon", "protocol.epsilon", "failure probability budget");
    opt("--n_alpha", "protocol.n_alpha", "Chernoff preset width");
    opt("--prob_vacuum", "protocol.prob_vacuum", "P(vacuum setting)");
    opt("--prob_weak", "protocol.prob_weak", "P(weak setting)");
    opt("--prob_signal", "protocol.prob_signal", "P(signal setting)");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t pos = s.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

json config_echo_json(const cfg::RunConfig& rc) {
    json j;
    for (const auto& [k, v] : rc.echo()) j[k] = v;
    return j;
}

int cmd_scan(const Overrides& ov, const std::string& out_path, const std::string& protocols_arg) {
    cfg::RunConfig rc;
    ov.apply(rc);
    std::vector<rates::Protocol> protos;
    if (!protocols_arg.empty())
        for (const std::string& name : split_list(protocols_arg))
            protos.push_back(rates::protocol_from_name(name));
    rc.channel.validate();
    rc.protocol.validate();
    rates::ScanResult res = rates::scan_distance(rc.channel, rc.protocol, protos,
                                                 rc.scan.distances(), rc.scan.options);
    io::atomic_write(io::resolve_output_path(out_path), rates::scan_csv(res));
    for (const auto& [proto, km] : res.first_crossing_km)
        std::cout << rates::protocol_name(proto) << " first exceeds plob at " << fmt12(km)
                  << " km\n";
    return 0;
}

int cmd_simulate(const Overrides& ov, const std::string& out_path) {
    cfg::RunConfig rc;
    ov.apply(rc);
    rc.sim.channel = rc.channel;
    rc.sim.protocol = rc.protocol;
    mc::SimResult res = mc::simulate(rc.sim);
    std::string path = io::resolve_output_path(out_path);
    io::atomic_write(path, res.tallies.to_csv());

    json meta;
    meta["seed"] = res.seed;
    meta["runtime_seconds"] = res.seconds;
    meta["double_clicks"] = res.double_clicks;
    meta["config"] = config_echo_json(rc);
    // estimate reads these back so the file round trip is exact
    meta["protocol"] = {{"mu", rc.protocol.mu},
                        {"nu", rc.protocol.nu},
                        {"phase_slices", rc.protocol.phase_slices},
                        {"ec_efficiency", rc.protocol.ec_efficiency},
                        {"rounds", rc.protocol.rounds},
                        {"epsilon", rc.protocol.epsilon},
                        {"n_alpha", rc.protocol.n_alpha},
                        {"prob_vacuum", rc.protocol.prob_vacuum},
                        {"prob_weak", rc.protocol.prob_weak},
                        {"prob_signal", rc.protocol.prob_signal}};
    json truth;
    for (Intensity a : kAllSettings) {
        std::vector<std::uint64_t> ev(res.truth.groups);
        for (int j = 0; j < res.truth.groups; ++j) ev[j] = res.truth.even(a, j);
        truth[setting_name(a)] = ev;
    }
    meta["ground_truth_even_clicks"] = truth;
    io::atomic_write(path + ".meta.json", meta.dump(2) + "\n");
    std::cout << "simulated " << fmt12(rc.protocol.rounds) << " rounds in "
              << fmt12(res.seconds) << " s\n";
    return 0;
}

int cmd_estimate(const Overrides& ov, const std::string& tallies_path,
                 const std::string& groups_arg, const std::string& out_path) {
    cfg::RunConfig rc;
    std::string resolved = tallies_path;
    TallyTable tallies = TallyTable::from_csv(io::read_file(resolved));
    // sidecar, when present, supplies the params the tallies were made with
    if (io::file_exists(resolved + ".meta.json")) {
        json meta = json::parse(io::read_file(resolved + ".meta.json"));
        if (meta.contains("protocol")) {
            const json& p = meta["protocol"];
            rc.protocol.mu = p.value("mu", rc.protocol.mu);
            rc.protocol.nu = p.value("nu", rc.protocol.nu);
            rc.protocol.phase_slices = p.value("phase_slices", rc.protocol.phase_slices);
            rc.protocol.ec_efficiency = p.value("ec_efficiency", rc.protocol.ec_efficiency);
            rc.protocol.rounds = p.value("rounds", rc.protocol.rounds);
            rc.protocol.epsilon = p.value("epsilon", rc.protocol.epsilon);
            rc.protocol.n_alpha = p.value("n_alpha", rc.protocol.n_alpha);
            rc.protocol.prob_vacuum = p.value("prob_vacuum", rc.protocol.prob_vacuum);
            rc.protocol.prob_weak = p.value("prob_weak", rc.protocol.prob_weak);
            rc.protocol.prob_signal = p.value("prob_signal", rc.protocol.prob_signal);
        }
    }
    ov.apply(rc);

    std::vector<int> groups;
    if (groups_arg.empty() || groups_arg == "all") {
        groups = decoy::all_groups(tallies.phase_slices());
    } else {
        for (const std::string& g : split_list(groups_arg)) groups.push_back(std::stoi(g));
    }
    decoy::DecoyEstimate est = decoy::finite_size_estimate(tallies, rc.protocol, groups);
    if (est.clamped)
        std::cerr << "note: a bound was clamped to [0,1]; the estimate is loose\n";

    json j;
    j["method"] = est.method == decoy::Method::finite_chernoff ? "finite_chernoff" : "asymptotic";
    j["y1_lower"] = est.y1_lower;
    j["q1_lower"] = est.q1_lower;
    j["eph_upper"] = est.eph_upper;
    j["failure_probability"] = est.failure_probability;
    j["clamped"] = est.clamped;
    j["group_set"] = groups;
    j["mu"] = rc.protocol.mu;
    j["nu"] = rc.protocol.nu;
    io::atomic_write(io::resolve_output_path(out_path), j.dump(2) + "\n");
    return 0;
}

int cmd_verify_symmetry(const Overrides& ov, const std::string& out_path) {
    cfg::RunConfig rc;
    ov.apply(rc);
    std::string csv = "check,mu,D,delta,bound,value,residual\n";
    auto row = [&csv](const std::string& check, double mu, int D, double delta, double bound,
                      double value, double residual) {
        csv += check + "," + fmt12(mu) + "," + std::to_string(D) + "," + fmt12(delta) + "," +
               fmt12(bound) + "," + fmt12(value) + "," + fmt12(residual) + "\n";
    };

    // fidelity^2 of the discrete pseudo-Fock single photon against |1-bar>,
    // lower-bounded by 1 - mu^D/(D+1)!. The margin sits far below double
    // rounding on 1 - F^2, so it is assembled from the strictly positive
    // series remainder (the l = 1 piece x P(1) - P(D+1) is identically zero).
    for (int D : {8, 16})
        for (int i = 1; i <= 10; ++i) {
            double mu = 0.1 * i;
            double x = std::exp(D * std::log(mu) - std::lgamma(D + 2.0));
            double p1 = model::poisson_pmf(mu, 1);
            double pd1 = model::discrete_randomized_pmf(mu, D, 1);
            double margin = 0.0;
            for (int l = 1; (l + 1) * D + 1 <= 400; ++l)
                margin += x * model::poisson_pmf(mu, l * D + 1) -
                          model::poisson_pmf(mu, (l + 1) * D + 1);
            row("fidelity_sq", mu, D, 0.0, 1.0 - x, p1 / pd1, margin / pd1);
        }

    // xi_D(mu) against the gain of the configured channel
    for (int i = 1; i <= 10; ++i) {
        double mu = 0.1 * i;
        double xi = model::discrete_randomization_deviation(mu, rc.protocol.phase_slices);
        double q = model::gain(rc.channel, mu);
        row("xi_ratio", mu, rc.protocol.phase_slices, 0.0, 0.0, xi, q > 0 ? xi / q : 0.0);
    }

    // twirled random states stay invariant under U (x) U
    {
        const int k_max = 12;
        CounterRng rng(20240901, 0);
        fock::Operator u = fock::mode_phase_unitary(true, true, k_max);
        for (int trial = 0; trial < 5; ++trial) {
            fock::FockVector psi(k_max);
            for (int idx = 0; idx < fock::basis_dim(k_max); ++idx)
                psi.amplitudes()(idx) = {rng.next_double() - 0.5, rng.next_double() - 0.5};
            psi.amplitudes() /= psi.amplitudes().norm();
            fock::Operator rho = fock::twirl(fock::density(psi));
            double residual = (u * rho * u.adjoint() - rho).norm();
            row("parity_invariance", 0.0, 0, 0.0, 1e-10, residual, residual);
        }
    }

    // single-photon state after 0/pi mixing is independent of delta
    {
        const int k_max = 6;
        fock::Operator ref = fock::Operator::Zero(fock::basis_dim(k_max), fock::basis_dim(k_max));
        ref(fock::basis_index(0, 1), fock::basis_index(0, 1)) = 0.5;
        ref(fock::basis_index(1, 0), fock::basis_index(1, 0)) = 0.5;
        for (double delta : {0.0, 0.3, std::numbers::pi / 2}) {
            fock::Operator mixed =
                0.5 * (fock::density(fock::k_photon_component(delta, 1, k_max)) +
                       fock::density(fock::k_photon_component(delta + std::numbers::pi, 1, k_max)));
            double residual = (mixed - ref).norm();
            row("delta_independence", 0.0, 0, delta, 1e-12, residual, residual);
        }
    }

    io::atomic_write(io::resolve_output_path(out_path), csv);
    return 0;
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"phase-matching QKD rate analysis and protocol simulation"};
    app.require_subcommand(1);

    Overrides ov_scan, ov_sim, ov_est, ov_ver;
    std::string scan_out = "scan.csv", scan_protocols = "pm-asym,plob";
    std::string sim_out = "tallies.csv";
    std::string est_tallies, est_groups = "all", est_out = "estimate.json";
    std::string ver_out = "symmetry.csv";

    CLI::App* scan = app.add_subcommand("scan", "rate-distance scan");
    add_common_flags(scan, ov_scan);
    scan->add_option("--protocols", scan_protocols, "comma list: pm-asym,pm-finite,mdi,plob");
    scan->add_option("--out", scan_out, "output CSV path");
    auto scan_opt = [&](const std::string& flag, const std::string& key, const char* help) {
        scan->add_option_function<std::string>(
            flag, [&ov_scan, key](const std::string& v) { ov_scan.kv.emplace_back(key, v); },
            help);
    };
    scan_opt("--distance_min", "scan.distance_min", "first distance, km");
    scan_opt("--distance_max", "scan.distance_max", "last distance, km");
    scan_opt("--distance_step", "scan.distance_step", "grid step, km");
    scan_opt("--optimize_mu", "scan.optimize_mu", "per-distance mu optimization");
    scan_opt("--nu_ratio", "scan.nu_ratio", "nu/mu while optimizing");
    scan_opt("--mu_min", "scan.mu_min", "mu search lower edge");
    scan_opt("--mu_max", "scan.mu_max", "mu search upper edge");
    scan_opt("--plob_include_detector", "scan.plob_include_detector",
             "include detector efficiency in the PLOB transmittance");
    scan_opt("--threads", "scan.threads", "scan worker threads (0 = hardware)");

    CLI::App* sim = app.add_subcommand("simulate", "round-level protocol simulation");
    add_common_flags(sim, ov_sim);
    sim->add_option("--out", sim_out, "output tallies CSV path");
    auto sim_opt = [&](const std::string& flag, const std::string& key, const char* help) {
        sim->add_option_function<std::string>(
            flag, [&ov_sim, key](const std::string& v) { ov_sim.kv.emplace_back(key, v); }, help);
    };
    sim_opt("--seed", "sim.seed", "RNG seed");
    sim_opt("--batch_size", "sim.batch_size", "rounds per RNG stream");
    sim_opt("--threads", "sim.threads", "worker threads (0 = hardware)");
    sim_opt("--drift_model", "sim.drift_model", "none|fixed_offset|random_walk");
    sim_opt("--phi_delta", "sim.phi_delta", "fixed drift offset, radians");
    sim_opt("--sigma", "sim.sigma", "random walk step, radians per round");
    sim_opt("--compensation_index", "sim.compensation_index", "j_delta (-1 = auto)");
    sim_opt("--tag_ground_truth", "sim.tag_ground_truth", "record parity tags");

    CLI::App* est = app.add_subcommand("estimate", "decoy estimation from stored tallies");
    add_common_flags(est, ov_est);
    est->add_option("--tallies", est_tallies, "tallies CSV from simulate")->required();
    est->add_option("--groups", est_groups, "comma list of kept groups, or 'all'");
    est->add_option("--out", est_out, "output JSON path");

    CLI::App* ver = app.add_subcommand("verify-symmetry", "Fock-space symmetry checks");
    add_common_flags(ver, ov_ver);
    ver->add_option("--out", ver_out, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (scan->parsed()) return cmd_scan(ov_scan, scan_out, scan_protocols);
        if (sim->parsed()) return cmd_simulate(ov_sim, sim_out);
        if (est->parsed()) return cmd_estimate(ov_est, est_tallies, est_groups, est_out);
        if (ver->parsed()) return cmd_verify_symmetry(ov_ver, ver_out);
    } catch (const decoy::DegenerateDataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) { // ConfigError and input validation
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace pmqkd::cli
