#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qkdlab/keyrate.hpp"

namespace qkdlab {

// Evaluation grid for rate-vs-distance curves.
struct SweepGrid {
    std::vector<double> distances_km;
    double intensity_lo{0.05};
    double intensity_hi{1.0};
    double intensity_step{0.05};
    std::vector<double> eta_s_values;
    RateMode mode{RateMode::asymptotic};

    void validate() const {
        for (std::size_t i = 0; i + 1 < distances_km.size(); ++i)
            if (!(distances_km[i] < distances_km[i + 1]))
                throw std::domain_error("SweepGrid: distances must be strictly increasing");
        if (!(std::isfinite(intensity_lo) && std::isfinite(intensity_hi) && intensity_lo > 0.0 &&
              intensity_lo < intensity_hi))
            throw std::domain_error("SweepGrid: need 0 < intensity_lo < intensity_hi");
        if (!(intensity_step > 0.0))
            throw std::domain_error("SweepGrid: intensity step must be > 0");
    }
};

struct OptimizeResult {
    double mu_star;
    double rate_star;
    bool flat;  // the rate was 0 over the whole range; mu_star is arbitrary
};

// Maximize the key rate over the signal intensity mu = nu at one distance.
// A 21-point coarse grid guards against non-unimodal landscapes; golden-
// section search then refines the bracket around the best coarse point to
// width <= tol. The result never falls below the best coarse value, and the
// search is fully deterministic. In two-decoy mode the decoys stay fixed at
// (mu_decoy, 0) and candidates at or below mu_decoy are inadmissible.
inline OptimizeResult optimize_signal_intensity(const ChannelParams& channel, double distance_km,
                                                const TrustedSourceModel& trust, RateMode mode,
                                                double lo, double hi, double tol,
                                                double mu_decoy = 0.01) {
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo > 0.0 && lo < hi && hi <= 2.0))
        throw std::domain_error("optimize_signal_intensity: range must satisfy 0 < lo < hi <= 2");
    if (!(tol > 0.0))
        throw std::domain_error("optimize_signal_intensity: tol must be > 0");

    const auto rate_of = [&](double m) -> double {
        if (mode == RateMode::two_decoy && m <= mu_decoy)
            return -std::numeric_limits<double>::infinity();
        return rate_at(channel, distance_km, IntensitySet{0.0, mu_decoy, m}, trust, mode).rate;
    };

    constexpr int coarse_n = 20;  // 21 points
    double best_mu = lo;
    double best_rate = -std::numeric_limits<double>::infinity();
    int best_k = 0;
    for (int k = 0; k <= coarse_n; ++k) {
        const double m = lo + (hi - lo) * static_cast<double>(k) / coarse_n;
        const double r = rate_of(m);
        if (r > best_rate) {
            best_rate = r;
            best_mu = m;
            best_k = k;
        }
    }
    if (!(best_rate > 0.0))
        return {best_mu, 0.0, true};

    double a = lo + (hi - lo) * static_cast<double>(std::max(best_k - 1, 0)) / coarse_n;
    double b = lo + (hi - lo) * static_cast<double>(std::min(best_k + 1, coarse_n)) / coarse_n;
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = rate_of(x1);
    double f2 = rate_of(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = rate_of(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = rate_of(x1);
        }
    }
    double mu_star = f1 > f2 ? x1 : x2;
    double rate_star = std::max(f1, f2);
    if (best_rate > rate_star) {  // refinement must never lose to the coarse grid
        mu_star = best_mu;
        rate_star = best_rate;
    }
    return {mu_star, rate_star, false};
}

struct MaxDistanceResult {
    double distance_km;
    bool no_positive_rate;  // rate was not positive even at L = 0
    bool hit_cap;           // rate stayed positive out to the search cap
};

// Largest distance with a positive key rate, located by doubling the bracket
// and bisecting the sign change to tol_km. Relies on the rate being
// non-increasing in distance. Parameter sets whose rate never turns negative
// (e.g. p_d = 0) stop at a 409600 km cap and report hit_cap.
inline MaxDistanceResult max_distance(const ChannelParams& channel, const IntensitySet& intensities,
                                      const TrustedSourceModel& trust, RateMode mode,
                                      double tol_km) {
    if (!(tol_km > 0.0))
        throw std::domain_error("max_distance: tol_km must be > 0");
    const auto rate = [&](double km) {
        return rate_at(channel, km, intensities, trust, mode).rate;
    };
    if (!(rate(0.0) > 0.0))
        return {0.0, true, false};
    constexpr double cap = 409600.0;
    double lo = 0.0;
    double hi = 100.0;
    while (rate(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > cap)
            return {cap, false, true};
    }
    while (hi - lo > tol_km) {
        const double mid = lo + (hi - lo) / 2.0;
        (rate(mid) > 0.0 ? lo : hi) = mid;
    }
    return {lo + (hi - lo) / 2.0, false, false};
}

// One key-rate curve per eta_s value, each with its own intensity set.
// Output rows follow the input order: eta_s values in the order given,
// distances ascending within each curve.
inline std::vector<KeyRatePoint> rate_vs_distance(
    const ChannelParams& channel, const SweepGrid& grid,
    const std::vector<IntensitySet>& intensities_per_eta_s) {
    grid.validate();
    if (intensities_per_eta_s.size() != grid.eta_s_values.size())
        throw std::invalid_argument("rate_vs_distance: need one IntensitySet per eta_s value");
    std::vector<KeyRatePoint> out;
    out.reserve(grid.eta_s_values.size() * grid.distances_km.size());
    for (std::size_t e = 0; e < grid.eta_s_values.size(); ++e) {
        const TrustedSourceModel trust{Probability(grid.eta_s_values[e])};
        for (const double km : grid.distances_km)
            out.push_back(rate_at(channel, km, intensities_per_eta_s[e], trust, grid.mode));
    }
    return out;
}

}  // namespace qkdlab
