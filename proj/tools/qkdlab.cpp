// Command-line front end: key-rate sweeps, intensity optimization, reach
// search, Monte Carlo validation, and the interception report.
//
// Exit codes: 0 success; 2 bad command line or bad config; 3 a requested
// check failed; 4 file I/O problems.

#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qkdlab/runner.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_check_failed = 3;
constexpr int exit_io = 4;

qkdlab::RunConfig load_config(const std::optional<std::string>& path) {
    if (!path)
        return qkdlab::RunConfig{};
    std::ifstream is(*path, std::ios::binary);
    if (!is)
        throw qkdlab::IoError(*path, "cannot open for reading");
    std::ostringstream ss;
    ss << is.rdbuf();
    if (is.bad())
        throw qkdlab::IoError(*path, "read failed");
    return qkdlab::parse_config(ss.str());
}

int cmd_sweep(const qkdlab::RunConfig& cfg) {
    const auto points = qkdlab::run_sweep(cfg);
    std::printf("wrote %zu rows to %s\n", points.size(), cfg.out.c_str());
    return exit_ok;
}

int cmd_optimize(const qkdlab::RunConfig& cfg, double distance_km, double eta_s, double lo,
                 double hi, double tol) {
    const qkdlab::TrustedSourceModel trust{qkdlab::Probability(eta_s)};
    const auto result = qkdlab::optimize_signal_intensity(cfg.channel, distance_km, trust, cfg.mode,
                                                          lo, hi, tol, cfg.mu_decoy);
    std::printf("eta_s = %g  distance = %g km  mode = %s\n", eta_s, distance_km,
                std::string(qkdlab::to_string(cfg.mode)).c_str());
    std::printf("mu_star = %.12g\nrate_star = %.17g\n", result.mu_star, result.rate_star);
    if (result.flat)
        std::printf("note: rate is zero over the whole search range; mu_star is arbitrary\n");
    return exit_ok;
}

int cmd_maxdist(const qkdlab::RunConfig& cfg, double eta_s, double tol_km) {
    const double mu = qkdlab::resolve_signal_intensity(cfg, eta_s);
    const qkdlab::IntensitySet intensities{0.0, cfg.mu_decoy, mu};
    const qkdlab::TrustedSourceModel trust{qkdlab::Probability(eta_s)};
    const auto result = qkdlab::max_distance(cfg.channel, intensities, trust, cfg.mode, tol_km);
    std::printf("eta_s = %g  mu = %g  mode = %s\n", eta_s, mu,
                std::string(qkdlab::to_string(cfg.mode)).c_str());
    std::printf("max_distance_km = %.6f\n", result.distance_km);
    if (result.no_positive_rate)
        std::printf("note: no positive rate at any distance\n");
    if (result.hit_cap)
        std::printf("note: rate still positive at the search cap\n");
    return exit_ok;
}

int cmd_validate(const qkdlab::RunConfig& cfg) {
    const qkdlab::ValidationReport report = qkdlab::run_validate(cfg);
    std::fputs(qkdlab::render(report).c_str(), stdout);
    return report.pass() ? exit_ok : exit_check_failed;
}

int cmd_attack_report() {
    const qkdlab::TextReport report = qkdlab::run_attack_report();
    std::fputs(report.text.c_str(), stdout);
    return report.pass ? exit_ok : exit_check_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"measurement-device-independent key-rate toolbox"};
    app.require_subcommand(1);

    std::optional<std::string> config_path;
    app.add_option("-c,--config", config_path, "configuration file (key = value lines)");

    auto* sweep = app.add_subcommand("sweep", "write the rate-vs-distance CSV");

    double opt_distance = 0.0, opt_eta_s = 1.0, opt_lo = 0.05, opt_hi = 2.0, opt_tol = 1e-6;
    auto* optimize = app.add_subcommand("optimize", "best signal intensity at one distance");
    optimize->add_option("--distance", opt_distance, "distance in km")->capture_default_str();
    optimize->add_option("--eta-s", opt_eta_s, "source trust in [0, 1]")->capture_default_str();
    optimize->add_option("--lo", opt_lo, "search range lower edge")->capture_default_str();
    optimize->add_option("--hi", opt_hi, "search range upper edge")->capture_default_str();
    optimize->add_option("--tol", opt_tol, "intensity tolerance")->capture_default_str();

    double md_eta_s = 1.0, md_tol_km = 0.01;
    auto* maxdist = app.add_subcommand("maxdist", "largest distance with a positive rate");
    maxdist->add_option("--eta-s", md_eta_s, "source trust in [0, 1]")->capture_default_str();
    maxdist->add_option("--tol-km", md_tol_km, "distance tolerance in km")->capture_default_str();

    auto* validate = app.add_subcommand("validate", "compare the model against sampling");
    auto* attack = app.add_subcommand("attack-report", "interception indistinguishability table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        const qkdlab::RunConfig cfg = load_config(config_path);
        if (sweep->parsed())
            return cmd_sweep(cfg);
        if (optimize->parsed())
            return cmd_optimize(cfg, opt_distance, opt_eta_s, opt_lo, opt_hi, opt_tol);
        if (maxdist->parsed())
            return cmd_maxdist(cfg, md_eta_s, md_tol_km);
        if (validate->parsed())
            return cmd_validate(cfg);
        if (attack->parsed())
            return cmd_attack_report();
        std::fprintf(stderr, "no subcommand selected\n");
        return exit_config;
    } catch (const qkdlab::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return exit_config;
    } catch (const qkdlab::IoError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return exit_io;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_config;
    }
}
