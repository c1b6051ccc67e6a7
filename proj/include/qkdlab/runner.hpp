#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "qkdlab/attack.hpp"
#include "qkdlab/config.hpp"
#include "qkdlab/csv.hpp"
#include "qkdlab/montecarlo.hpp"
#include "qkdlab/optimizer.hpp"

namespace qkdlab {

// Canonical signal intensity for each source-trust level, used when a config
// does not pin mu_signal explicitly.
inline const std::vector<std::pair<double, double>>& default_intensity_map() {
    static const std::vector<std::pair<double, double>> map{
        {1.0, 0.45}, {0.95, 0.3}, {0.9, 0.1}, {0.85, 0.05}};
    return map;
}

inline double resolve_signal_intensity(const RunConfig& cfg, double eta_s) {
    if (cfg.mu_signal)
        return *cfg.mu_signal;
    for (const auto& [trust, mu] : default_intensity_map())
        if (std::abs(trust - eta_s) <= 1e-12)
            return mu;
    char buf[96];
    std::snprintf(buf, sizeof buf, "no default signal intensity for eta_s = %.17g; set mu_signal",
                  eta_s);
    throw ConfigError(0, "mu_signal", buf);
}

// Evaluate one key-rate curve per eta_s on the config's distance grid and
// write the CSV to cfg.out. Returns the points that were written.
inline std::vector<KeyRatePoint> run_sweep(const RunConfig& cfg) {
    SweepGrid grid;
    grid.distances_km = grid_distances(cfg);
    grid.eta_s_values = cfg.eta_s_list;
    grid.mode = cfg.mode;

    std::vector<IntensitySet> intensities;
    intensities.reserve(cfg.eta_s_list.size());
    for (const double eta_s : cfg.eta_s_list) {
        const double mu = resolve_signal_intensity(cfg, eta_s);
        if (!(mu > cfg.mu_decoy))
            throw ConfigError(0, "mu_decoy", "must be below the signal intensity");
        intensities.push_back(IntensitySet{0.0, cfg.mu_decoy, mu});
    }

    std::vector<KeyRatePoint> points = rate_vs_distance(cfg.channel, grid, intensities);
    write_keyrate_csv(cfg.out, points);
    return points;
}

// One model-vs-sampling comparison: gain and error rate at a fixed distance
// and basis, estimated from cfg.mc_trials pulse pairs, checked against the
// closed-form values within three binomial standard errors.
struct ValidationEntry {
    double distance_km;
    Basis basis;
    double mu;
    double gain_model;
    double qber_model;
    double gain_est;
    double qber_est;
    double gain_stderr;
    double qber_stderr;
    bool gain_ok;
    bool qber_ok;

    bool ok() const { return gain_ok && qber_ok; }
};

struct ValidationReport {
    std::vector<ValidationEntry> entries;
    std::uint64_t n_trials{0};

    int n_ok() const {
        int n = 0;
        for (const ValidationEntry& e : entries)
            n += e.ok() ? 1 : 0;
        return n;
    }
    bool pass() const { return n_ok() == static_cast<int>(entries.size()); }
};

// Run the six canonical comparisons: distances {0, 50, 100} km x bases
// {Z, X} with equal intensities mu = nu. Each configuration gets its own
// deterministic stream (seed = mc_seed + index).
inline ValidationReport run_validate(const RunConfig& cfg) {
    const double mu = cfg.mu_signal.value_or(0.45);
    ValidationReport report;
    report.n_trials = cfg.mc_trials;
    std::uint64_t index = 0;
    for (const double km : {0.0, 50.0, 100.0}) {
        const ArmEfficiencies arms = arm_transmittance(cfg.channel, km);
        for (const Basis basis : {Basis::z, Basis::x}) {
            const BasisStatistics model = basis == Basis::z
                                              ? gain_qber_zz(mu, mu, arms, cfg.channel)
                                              : gain_qber_xx(mu, mu, arms, cfg.channel);
            const SpecDistribution dist{mu, mu, basis, basis};
            const EmpiricalStatistics est = estimate_statistics(
                dist, cfg.mc_trials, arms, cfg.channel, cfg.mc_seed + index);
            const CellCounts& c = est.matched(basis);

            ValidationEntry e;
            e.distance_km = km;
            e.basis = basis;
            e.mu = mu;
            e.gain_model = model.gain;
            e.qber_model = model.qber;
            e.gain_est = EmpiricalStatistics::gain_hat(c);
            e.qber_est = EmpiricalStatistics::qber_hat(c);
            e.gain_stderr = EmpiricalStatistics::gain_stderr(c);
            e.qber_stderr = EmpiricalStatistics::qber_stderr(c);
            e.gain_ok = std::abs(e.gain_est - e.gain_model) <= 3.0 * e.gain_stderr;
            e.qber_ok = std::abs(e.qber_est - e.qber_model) <= 3.0 * e.qber_stderr;
            report.entries.push_back(e);
            ++index;
        }
    }
    return report;
}

inline std::string render(const ValidationReport& report) {
    std::string s = "model vs Monte Carlo (" + std::to_string(report.n_trials) +
                    " trials per configuration, 3-sigma bands)\n";
    char buf[256];
    std::snprintf(buf, sizeof buf, "%5s  %5s  %12s  %12s  %10s  %12s  %12s  %10s  %s\n", "L/km",
                  "basis", "gain(model)", "gain(est)", "gain(3sd)", "qber(model)", "qber(est)",
                  "qber(3sd)", "ok");
    s += buf;
    for (const ValidationEntry& e : report.entries) {
        std::snprintf(buf, sizeof buf,
                      "%5g  %5s  %12.6e  %12.6e  %10.2e  %12.6e  %12.6e  %10.2e  %s\n",
                      e.distance_km, e.basis == Basis::z ? "Z" : "X", e.gain_model, e.gain_est,
                      3.0 * e.gain_stderr, e.qber_model, e.qber_est, 3.0 * e.qber_stderr,
                      e.ok() ? "yes" : "NO");
        s += buf;
    }
    s += "result: " + std::to_string(report.n_ok()) + "/" + std::to_string(report.entries.size()) +
         " configurations within 3 sigma -- " + (report.pass() ? "PASS" : "FAIL") + "\n";
    return s;
}

// Rendered text plus the verdict driving the process exit code.
struct TextReport {
    std::string text;
    bool pass;
};

inline TextReport run_attack_report() {
    const AttackReport report = attack_indistinguishability_report();
    return {render(report), report.indistinguishable};
}

}  // namespace qkdlab
