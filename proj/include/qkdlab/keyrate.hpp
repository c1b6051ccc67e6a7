#pragma once

#include <cmath>
#include <stdexcept>

#include "qkdlab/decoy.hpp"
#include "qkdlab/model.hpp"
#include "qkdlab/numerics.hpp"

namespace qkdlab {

// Probability that the uncharacterized encoder emits the intended state.
// Failures are modeled as white noise, i.e. a 50% error contribution.
struct TrustedSourceModel {
    Probability eta_s{1.0};
};

// Blend an observed error rate with the worst-case noise of untrusted
// emissions: e' = eta_s e + (1 - eta_s)/2. Identity at eta_s = 1.
inline Probability apply_source_trust(Probability e, const TrustedSourceModel& trust) {
    const double s = trust.eta_s;
    return Probability(s * e + (1.0 - s) * 0.5);
}

// Secret fraction of the single-photon component: r = 1 - h(e1) - h(e2).
inline double single_photon_rate(Probability e1, Probability e2) {
    return 1.0 - binary_entropy(e1) - binary_entropy(e2);
}

// Decoy-state key rate, unfloored so callers can observe the sign:
//   R = Q11 (1 - h(e11)) - Q_sig f h(E_sig)
// Multiphoton events are counted as fully leaked; privacy amplification is
// paid on the single-photon phase error, error correction on the whole sifted
// block.
inline double secret_key_rate(Probability q11_zz, Probability e11_xx, Probability q_sig_zz,
                              Probability e_sig_zz, double f) {
    if (!(std::isfinite(f) && f >= 1.0))
        throw std::domain_error("secret_key_rate: f must be finite and >= 1");
    return q11_zz * (1.0 - binary_entropy(e11_xx)) - q_sig_zz * f * binary_entropy(e_sig_zz);
}

enum class RateMode { asymptotic, two_decoy };

namespace pointflag {
inline constexpr unsigned floored = 1u << 0;    // formula value was negative, reported as 0
inline constexpr unsigned clamped = 1u << 1;    // an estimate was clamped into range
inline constexpr unsigned no_signal = 1u << 2;  // no certified single-photon signal
}  // namespace pointflag

struct KeyRatePoint {
    double distance_km{0.0};
    double mu{0.0};
    double nu{0.0};
    Probability eta_s{1.0};
    RateMode mode{RateMode::asymptotic};
    double rate{0.0};  // secret bits per pulse pair, floored at 0
    unsigned flags{0};
};

// Full pipeline for one grid point: channel statistics -> single-photon
// estimates -> source-trust adjustment of both error rates -> key rate,
// floored at zero. The key is extracted from Z-basis data; the X basis only
// estimates the phase error. The trust-adjusted phase error is capped at 1/2
// before the entropy term: values above 1/2 would otherwise be credited with
// *less* leakage than 1/2 itself.
inline KeyRatePoint rate_at(const ChannelParams& channel, double distance_km,
                            const IntensitySet& intensities, const TrustedSourceModel& trust,
                            RateMode mode) {
    const double mu = intensities.mu2;
    const SinglePhotonEstimates est = (mode == RateMode::asymptotic)
                                          ? asymptotic_estimates(channel, distance_km, mu, mu)
                                          : two_decoy_estimates(channel, distance_km, intensities);
    const ArmEfficiencies arms = arm_transmittance(channel, distance_km);
    const BasisStatistics sig = gain_qber_zz(mu, mu, arms, channel);

    unsigned flags = 0;
    if (est.clamped)
        flags |= pointflag::clamped;
    double rate = 0.0;
    if (est.no_signal || sig.empty) {
        flags |= pointflag::no_signal;
    } else {
        Probability e11 = apply_source_trust(est.e11, trust);
        if (e11 > 0.5) {
            e11 = Probability(0.5);
            flags |= pointflag::clamped;
        }
        const Probability e_sig = apply_source_trust(sig.qber, trust);
        const double r = secret_key_rate(est.q11_zz, e11, sig.gain, e_sig, channel.f);
        if (r < 0.0)
            flags |= pointflag::floored;
        else
            rate = r;
    }
    return {distance_km, mu, mu, trust.eta_s, mode, rate, flags};
}

}  // namespace qkdlab
