#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qkdlab/keyrate.hpp"
#include "qkdlab/model.hpp"

namespace qkdlab {

// Configuration problem: carries the offending line (0 when not tied to a
// line) and key (empty when structural).
struct ConfigError : std::runtime_error {
    int line;
    std::string key;

    ConfigError(int line_, std::string key_, const std::string& message)
        : std::runtime_error(format(line_, key_, message)), line(line_), key(std::move(key_)) {}

    static std::string format(int line, const std::string& key, const std::string& message) {
        std::string s = "config error";
        if (line > 0)
            s += " at line " + std::to_string(line);
        if (!key.empty())
            s += " (key '" + key + "')";
        return s + ": " + message;
    }
};

// Everything a run needs. Defaults reproduce the standard simulation setup;
// when mu_signal is unset, the sweep runner assigns the canonical per-eta_s
// signal intensities (see runner.hpp).
struct RunConfig {
    ChannelParams channel{};
    std::optional<double> mu_signal{};
    double mu_decoy{0.01};
    std::vector<double> eta_s_list{1.0, 0.95, 0.9, 0.85};
    RateMode mode{RateMode::asymptotic};
    double l_min{0.0};
    double l_max{200.0};
    double l_step{1.0};
    std::uint64_t mc_trials{10'000'000};
    std::uint64_t mc_seed{1};
    std::string out{"sweep.csv"};

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline double parse_double(std::string_view v, int line, const std::string& key) {
    double out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ConfigError(line, key, "expected a number, got '" + std::string(v) + "'");
    return out;
}

inline std::uint64_t parse_u64(std::string_view v, int line, const std::string& key) {
    std::uint64_t out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ConfigError(line, key, "expected a non-negative integer, got '" + std::string(v) + "'");
    return out;
}

inline Probability parse_probability(std::string_view v, int line, const std::string& key) {
    const double d = parse_double(v, line, key);
    if (!(d >= 0.0 && d <= 1.0))
        throw ConfigError(line, key, "probability out of [0, 1]");
    return Probability(d);
}

}  // namespace detail

// Parse a flat key = value configuration. '#' starts a comment, blank lines
// are skipped, every key may appear at most once, unknown keys are rejected.
// eta_s_list is a comma-separated list and is stored sorted descending.
inline RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::set<std::string> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty())
            continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(line_no, "", "expected 'key = value'");
        const std::string key{detail::trim(line.substr(0, eq))};
        const std::string_view value = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(line_no, "", "missing key before '='");
        if (!seen.insert(key).second)
            throw ConfigError(line_no, key, "duplicate key");

        if (key == "eta_d") {
            cfg.channel.eta_d = detail::parse_probability(value, line_no, key);
        } else if (key == "e_d") {
            cfg.channel.e_d = detail::parse_probability(value, line_no, key);
        } else if (key == "p_d") {
            cfg.channel.p_d = detail::parse_probability(value, line_no, key);
        } else if (key == "f") {
            cfg.channel.f = detail::parse_double(value, line_no, key);
            if (!(std::isfinite(cfg.channel.f) && cfg.channel.f >= 1.0))
                throw ConfigError(line_no, key, "must be >= 1");
        } else if (key == "alpha") {
            cfg.channel.alpha = detail::parse_double(value, line_no, key);
            if (!(std::isfinite(cfg.channel.alpha) && cfg.channel.alpha > 0.0))
                throw ConfigError(line_no, key, "must be > 0");
        } else if (key == "mu_signal") {
            const double v = detail::parse_double(value, line_no, key);
            if (!(std::isfinite(v) && v > 0.0))
                throw ConfigError(line_no, key, "must be > 0");
            cfg.mu_signal = v;
        } else if (key == "mu_decoy") {
            const double v = detail::parse_double(value, line_no, key);
            if (!(std::isfinite(v) && v > 0.0))
                throw ConfigError(line_no, key, "must be > 0");
            cfg.mu_decoy = v;
        } else if (key == "eta_s_list") {
            std::vector<double> vals;
            std::string_view rest = value;
            while (true) {
                const std::size_t comma = rest.find(',');
                const std::string_view item = detail::trim(rest.substr(0, comma));
                if (item.empty())
                    throw ConfigError(line_no, key, "empty list entry");
                vals.push_back(detail::parse_probability(item, line_no, key));
                if (comma == std::string_view::npos)
                    break;
                rest = rest.substr(comma + 1);
            }
            std::sort(vals.begin(), vals.end(), std::greater<>());
            if (std::adjacent_find(vals.begin(), vals.end()) != vals.end())
                throw ConfigError(line_no, key, "duplicate eta_s value");
            cfg.eta_s_list = std::move(vals);
        } else if (key == "mode") {
            if (value == "asymptotic")
                cfg.mode = RateMode::asymptotic;
            else if (value == "two-decoy")
                cfg.mode = RateMode::two_decoy;
            else
                throw ConfigError(line_no, key, "expected 'asymptotic' or 'two-decoy'");
        } else if (key == "l_min") {
            cfg.l_min = detail::parse_double(value, line_no, key);
            if (!(std::isfinite(cfg.l_min) && cfg.l_min >= 0.0))
                throw ConfigError(line_no, key, "must be >= 0");
        } else if (key == "l_max") {
            cfg.l_max = detail::parse_double(value, line_no, key);
            if (!(std::isfinite(cfg.l_max) && cfg.l_max >= 0.0))
                throw ConfigError(line_no, key, "must be >= 0");
        } else if (key == "l_step") {
            cfg.l_step = detail::parse_double(value, line_no, key);
            if (!(std::isfinite(cfg.l_step) && cfg.l_step > 0.0))
                throw ConfigError(line_no, key, "must be > 0");
        } else if (key == "mc_trials") {
            cfg.mc_trials = detail::parse_u64(value, line_no, key);
            if (cfg.mc_trials < 1)
                throw ConfigError(line_no, key, "must be >= 1");
        } else if (key == "mc_seed") {
            cfg.mc_seed = detail::parse_u64(value, line_no, key);
        } else if (key == "out") {
            if (value.empty())
                throw ConfigError(line_no, key, "must not be empty");
            cfg.out = std::string(value);
        } else {
            throw ConfigError(line_no, key, "unknown key");
        }
    }

    if (cfg.l_max < cfg.l_min)
        throw ConfigError(0, "l_max", "must be >= l_min");
    if (cfg.mu_signal && *cfg.mu_signal <= cfg.mu_decoy)
        throw ConfigError(0, "mu_signal", "must exceed mu_decoy");
    return cfg;
}

namespace detail {

inline std::string fmt_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace detail

// Canonical text form; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const RunConfig& cfg) {
    std::string s;
    s += "eta_d = " + detail::fmt_double(cfg.channel.eta_d) + "\n";
    s += "e_d = " + detail::fmt_double(cfg.channel.e_d) + "\n";
    s += "p_d = " + detail::fmt_double(cfg.channel.p_d) + "\n";
    s += "f = " + detail::fmt_double(cfg.channel.f) + "\n";
    s += "alpha = " + detail::fmt_double(cfg.channel.alpha) + "\n";
    if (cfg.mu_signal)
        s += "mu_signal = " + detail::fmt_double(*cfg.mu_signal) + "\n";
    s += "mu_decoy = " + detail::fmt_double(cfg.mu_decoy) + "\n";
    s += "eta_s_list = ";
    for (std::size_t i = 0; i < cfg.eta_s_list.size(); ++i) {
        if (i)
            s += ", ";
        s += detail::fmt_double(cfg.eta_s_list[i]);
    }
    s += "\n";
    s += std::string("mode = ") + (cfg.mode == RateMode::asymptotic ? "asymptotic" : "two-decoy") +
         "\n";
    s += "l_min = " + detail::fmt_double(cfg.l_min) + "\n";
    s += "l_max = " + detail::fmt_double(cfg.l_max) + "\n";
    s += "l_step = " + detail::fmt_double(cfg.l_step) + "\n";
    s += "mc_trials = " + std::to_string(cfg.mc_trials) + "\n";
    s += "mc_seed = " + std::to_string(cfg.mc_seed) + "\n";
    s += "out = " + cfg.out + "\n";
    return s;
}

// Distance grid implied by the config: l_min, l_min + l_step, ..., up to
// l_max (inclusive within a half-step tolerance for inexact steps).
inline std::vector<double> grid_distances(const RunConfig& cfg) {
    std::vector<double> out;
    for (std::uint64_t k = 0;; ++k) {
        const double km = cfg.l_min + static_cast<double>(k) * cfg.l_step;
        if (km > cfg.l_max + cfg.l_step * 1e-9)
            break;
        out.push_back(km);
    }
    return out;
}

}  // namespace qkdlab
