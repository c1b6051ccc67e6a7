#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "qkdlab/model.hpp"

namespace qkdlab {

// Vacuum + weak + signal intensities, shared by both parties.
struct IntensitySet {
    double mu0{0.0};
    double mu1{0.01};
    double mu2{0.45};

    void validate() const {
        if (mu0 != 0.0)
            throw std::domain_error("IntensitySet: mu0 must be exactly 0");
        if (!(std::isfinite(mu1) && std::isfinite(mu2) && mu2 > mu1 && mu1 > 0.0))
            throw std::domain_error("IntensitySet: need mu2 > mu1 > mu0 = 0");
    }

    double at(int i) const { return i == 0 ? mu0 : (i == 1 ? mu1 : mu2); }

    friend bool operator==(const IntensitySet&, const IntensitySet&) = default;
};

// Gain/QBER for every intensity pair (i, j) in {0,1,2}^2 and both matched
// bases. The estimators below consume only this table, so they are agnostic
// to whether it came from closed forms or from sampled counts.
struct PairStatistics {
    std::array<std::array<BasisStatistics, 3>, 3> zz{};
    std::array<std::array<BasisStatistics, 3>, 3> xx{};

    const BasisStatistics& cell(Basis b, int i, int j) const {
        return (b == Basis::z ? zz : xx)[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    BasisStatistics& cell(Basis b, int i, int j) {
        return (b == Basis::z ? zz : xx)[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
};

// Populate the full 9-pair x 2-basis table from the closed-form channel model.
inline PairStatistics observe(const ChannelParams& channel, double distance_km,
                              const IntensitySet& intensities) {
    intensities.validate();
    const ArmEfficiencies arms = arm_transmittance(channel, distance_km);
    PairStatistics t;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            t.zz[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                gain_qber_zz(intensities.at(i), intensities.at(j), arms, channel);
            t.xx[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                gain_qber_xx(intensities.at(i), intensities.at(j), arms, channel);
        }
    }
    return t;
}

// A one-sided estimate clamped into [0, 1]; `clamped` records that the raw
// formula value fell outside.
struct Bound {
    double value;
    bool clamped;
};

// Raised when the estimation chain cannot proceed (no certified signal).
struct EstimationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Analytic lower bound on the single-photon yield from vacuum + one weak
// decoy. With G_ij = e^(mu_i + mu_j) Q_ij and
// B(m) = G_mm + G_00 - G_m0 - G_0m evaluated at the weak (m = mu1) and
// signal (m = mu2) intensities:
//   Y11 >= (mu2^3 B(mu1) - mu1^3 B(mu2)) / (mu2^2 mu1^2 (mu2 - mu1)).
// The bound holds identically in either matched basis. Negative values are
// vacuously true but useless; they clamp to 0 and flag the point.
inline Bound y11_lower_two_decoy(const PairStatistics& stats, const IntensitySet& intensities,
                                 Basis basis) {
    intensities.validate();
    const double m1 = intensities.mu1;
    const double m2 = intensities.mu2;
    const auto bracket = [&](int idx, double m) {
        return std::exp(2.0 * m) * stats.cell(basis, idx, idx).gain + stats.cell(basis, 0, 0).gain -
               std::exp(m) * (stats.cell(basis, idx, 0).gain + stats.cell(basis, 0, idx).gain);
    };
    const double raw = (m2 * m2 * m2 * bracket(1, m1) - m1 * m1 * m1 * bracket(2, m2)) /
                       (m2 * m2 * m1 * m1 * (m2 - m1));
    if (raw < 0.0)
        return {0.0, true};
    if (raw > 1.0)
        return {1.0, true};
    return {raw, false};
}

// Analytic upper bound on the single-photon X-basis error rate from the same
// decoy data, given a positive lower bound y11_xx on the X-basis yield:
//   e11 <= (E00 Q00 + e^(2 mu1) E11 Q11 - e^(mu1) (E10 Q10 + E01 Q01))
//          / (mu1^2 y11_xx)
// with every statistic taken in the X basis at the vacuum/weak intensities.
inline Bound e11_upper_two_decoy(const PairStatistics& stats, const IntensitySet& intensities,
                                 double y11_xx) {
    intensities.validate();
    if (!(y11_xx > 0.0))
        throw EstimationError("e11_upper_two_decoy: no certified single-photon signal (y11 <= 0)");
    const double m1 = intensities.mu1;
    const auto eq = [&](int i, int j) {
        const BasisStatistics& s = stats.cell(Basis::x, i, j);
        return static_cast<double>(s.gain) * static_cast<double>(s.qber);
    };
    const double raw =
        (eq(0, 0) + std::exp(2.0 * m1) * eq(1, 1) - std::exp(m1) * (eq(1, 0) + eq(0, 1))) /
        ((m1 * m1) * y11_xx);
    if (raw < 0.0)
        return {0.0, true};
    if (raw > 1.0)
        return {1.0, true};
    return {raw, false};
}

enum class EstimateMode { exact, two_decoy_bound };

// Single-photon quantities as consumed by the rate pipeline. In two-decoy
// mode y11/q11_zz are lower bounds and e11 is an upper bound; `no_signal`
// means no positive yield could be certified and the rate must be zero.
struct SinglePhotonEstimates {
    Probability y11{0.0};
    Probability e11{0.5};
    Probability q11_zz{0.0};
    EstimateMode mode{EstimateMode::exact};
    bool clamped{false};
    bool no_signal{false};
};

// Infinite-decoy limit: the exact channel values.
inline SinglePhotonEstimates asymptotic_estimates(const ChannelParams& channel, double distance_km,
                                                  double mu, double nu) {
    const ArmEfficiencies arms = arm_transmittance(channel, distance_km);
    const SinglePhotonTruth t = single_photon_truth(mu, nu, arms, channel);
    return {t.y11, t.e11, t.q11_zz, EstimateMode::exact, false, false};
}

// Two-decoy estimates from an already-populated statistics table. The
// Z-basis yield bound feeds the key-rate gain Q11 = mu2^2 e^(-2 mu2) Y11^L,
// while the X-basis bound certifies the denominator of the error bound.
inline SinglePhotonEstimates two_decoy_estimates_from(const PairStatistics& stats,
                                                      const IntensitySet& intensities) {
    const Bound yzz = y11_lower_two_decoy(stats, intensities, Basis::z);
    const Bound yxx = y11_lower_two_decoy(stats, intensities, Basis::x);
    const bool clamped = yzz.clamped || yxx.clamped;
    if (!(yzz.value > 0.0) || !(yxx.value > 0.0)) {
        return {Probability(0.0), Probability(0.5), Probability(0.0),
                EstimateMode::two_decoy_bound, clamped, true};
    }
    const Bound e11 = e11_upper_two_decoy(stats, intensities, yxx.value);
    const double m2 = intensities.mu2;
    const double q11 = (m2 * m2) * std::exp(-2.0 * m2) * yzz.value;
    return {Probability(yzz.value), Probability(e11.value), Probability(q11),
            EstimateMode::two_decoy_bound, clamped || e11.clamped, false};
}

// Two-decoy estimates for the honest closed-form channel.
inline SinglePhotonEstimates two_decoy_estimates(const ChannelParams& channel, double distance_km,
                                                 const IntensitySet& intensities) {
    return two_decoy_estimates_from(observe(channel, distance_km, intensities), intensities);
}

}  // namespace qkdlab
