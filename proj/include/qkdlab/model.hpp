#pragma once

#include <cmath>
#include <stdexcept>

#include "qkdlab/numerics.hpp"

namespace qkdlab {

enum class Basis { z, x };

// Physical parameters of the detection setup and fiber channel.
struct ChannelParams {
    Probability eta_d{0.40};  // detector efficiency
    Probability e_d{0.015};   // polarization misalignment error probability
    Probability p_d{3e-6};    // dark-count probability per detector per gate
    double f{1.16};           // error-correction inefficiency
    double alpha{0.2};        // fiber loss in dB/km

    void validate() const {
        if (!(std::isfinite(f) && f >= 1.0))
            throw std::domain_error("ChannelParams: f must be finite and >= 1");
        if (!(std::isfinite(alpha) && alpha > 0.0))
            throw std::domain_error("ChannelParams: alpha must be finite and > 0");
    }

    friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

// Total efficiency of each arm (fiber transmittance times detector efficiency).
struct ArmEfficiencies {
    Probability eta_a{0.0};
    Probability eta_b{0.0};
};

// Both parties sit a distance L/2 from the measurement node, so each arm
// carries half the total loss: eta = eta_d * 10^(-alpha L / 20).
inline ArmEfficiencies arm_transmittance(const ChannelParams& params, double distance_km) {
    params.validate();
    if (!(std::isfinite(distance_km) && distance_km >= 0.0))
        throw std::domain_error("arm_transmittance: distance must be finite and >= 0");
    const double eta = params.eta_d * std::pow(10.0, -params.alpha * distance_km / 20.0);
    return {Probability(eta), Probability(eta)};
}

// Gain Q and error rate E of one basis at one intensity pair. When the gain
// is zero there are no events to assign an error rate to; the point reports
// E = 1/2 and is flagged empty.
struct BasisStatistics {
    Probability gain{0.0};
    Probability qber{0.5};
    bool empty{true};
};

namespace detail {

// Quantities shared by both basis formulas for mean photon numbers mu, nu:
//   ta = mu eta_a, tb = nu eta_b, omega = ta + tb,
//   s  = sqrt(ta tb)            (the Bessel arguments are s/2 and s),
//   y  = (1 - p_d) e^(-omega/4).
// one_minus_y is computed via expm1 so it keeps full precision when omega
// and p_d are both tiny. All expressions are factored so that swapping
// (mu, eta_a) with (nu, eta_b) gives bit-identical results.
struct PairKinematics {
    double ta, tb, omega, s, y, one_minus_y;
};

inline PairKinematics pair_kinematics(double mu, double nu, const ArmEfficiencies& arms,
                                      const ChannelParams& params) {
    if (!(std::isfinite(mu) && mu >= 0.0 && std::isfinite(nu) && nu >= 0.0))
        throw std::domain_error("intensity must be finite and >= 0");
    PairKinematics k{};
    k.ta = mu * arms.eta_a;
    k.tb = nu * arms.eta_b;
    k.omega = k.ta + k.tb;
    k.s = std::sqrt(k.ta * k.tb);
    const double pd = params.p_d;
    const double eq = std::exp(-k.omega / 4.0);
    k.y = (1.0 - pd) * eq;
    k.one_minus_y = -std::expm1(-k.omega / 4.0) + pd * eq;
    return k;
}

}  // namespace detail

// X-basis gain and error rate for phase-randomized inputs:
//   Q = 2 y^2 (1 + 2 y^2 - 4 y I0(s/2) + I0(s))
//   E Q = Q/2 - (1/2 - e_d) * 2 y^2 (I0(s) - 1)
// evaluated as Q = 2 y^2 (2 (1-y)^2 + (I0(s)-1) - 4 y (I0(s/2)-1)) so the
// small-argument regime suffers no cancellation.
inline BasisStatistics gain_qber_xx(double mu, double nu, const ArmEfficiencies& arms,
                                    const ChannelParams& params) {
    const auto k = detail::pair_kinematics(mu, nu, arms, params);
    const double a = detail::bessel_i0_minus_one(k.s / 2.0);
    const double b = detail::bessel_i0_minus_one(k.s);
    const double y = k.y;
    const double q = 2.0 * y * y * (2.0 * k.one_minus_y * k.one_minus_y + (b - 4.0 * y * a));
    if (!(q > 0.0))
        return {Probability(0.0), Probability(0.5), true};
    const double e0 = 0.5;
    const double e = e0 - (e0 - params.e_d) * ((2.0 * y * y * b) / q);
    return {Probability(q), Probability(e), false};
}

// Z-basis gain and error rate. Correct coincidences require one detection
// per arm-mode; erroneous ones come from dark counts:
//   Q_C = 2 (1-p_d)^2 e^(-omega/2) (1 - (1-p_d) e^(-ta/2)) (1 - (1-p_d) e^(-tb/2))
//   Q_E = 2 p_d (1-p_d)^2 e^(-omega/2) (I0(s) - (1-p_d) e^(-omega/2))
//   E Q = e_d Q_C + (1 - e_d) Q_E
// E is formed as e_d + (1 - 2 e_d) Q_E / Q, which is exactly e_d when p_d = 0.
inline BasisStatistics gain_qber_zz(double mu, double nu, const ArmEfficiencies& arms,
                                    const ChannelParams& params) {
    const auto k = detail::pair_kinematics(mu, nu, arms, params);
    const double pd = params.p_d;
    const double c = (1.0 - pd) * (1.0 - pd);
    const double exp_half = std::exp(-k.omega / 2.0);
    const double ua = -std::expm1(-k.ta / 2.0) + pd * std::exp(-k.ta / 2.0);
    const double ub = -std::expm1(-k.tb / 2.0) + pd * std::exp(-k.tb / 2.0);
    const double qc = 2.0 * c * exp_half * (ua * ub);
    const double qe = 2.0 * pd * c * exp_half *
                      (detail::bessel_i0_minus_one(k.s) - std::expm1(-k.omega / 2.0) + pd * exp_half);
    const double q = qc + qe;
    if (!(q > 0.0))
        return {Probability(0.0), Probability(0.5), true};
    const double e = params.e_d + (1.0 - 2.0 * params.e_d) * (qe / q);
    return {Probability(q), Probability(e), false};
}

// Exact single-photon quantities of the honest channel.
struct SinglePhotonTruth {
    Probability y11;     // yield given one photon per side
    Probability e11;     // X-basis error rate of those events
    Probability q11_zz;  // Z-basis single-photon gain: mu nu e^(-mu-nu) Y11
};

// Yield and error of the (1,1) photon-number component:
//   Y11 = (1-p_d)^2 (eta_a eta_b / 2
//         + (2 eta_a + 2 eta_b - 3 eta_a eta_b) p_d + 4 (1-eta_a)(1-eta_b) p_d^2)
//   e11 Y11 = Y11 / 2 - (1/2 - e_d) (1-p_d)^2 eta_a eta_b / 2
// The signal/dark split makes e11 exactly e_d when p_d = 0 and exactly 1/2
// when no signal photons can interfere (eta_a eta_b = 0).
inline SinglePhotonTruth single_photon_truth(double mu, double nu, const ArmEfficiencies& arms,
                                             const ChannelParams& params) {
    if (!(std::isfinite(mu) && mu >= 0.0 && std::isfinite(nu) && nu >= 0.0))
        throw std::domain_error("intensity must be finite and >= 0");
    const double ea = arms.eta_a;
    const double eb = arms.eta_b;
    const double pd = params.p_d;
    const double c = (1.0 - pd) * (1.0 - pd);
    const double y_signal = c * ((ea * eb) / 2.0);
    const double y_dark =
        c * pd * ((2.0 * ea + 2.0 * eb - 3.0 * (ea * eb)) + 4.0 * (1.0 - ea) * (1.0 - eb) * pd);
    const double y11 = y_signal + y_dark;
    const double e0 = 0.5;
    const double e11 = (y_signal == 0.0) ? e0 : params.e_d + (e0 - params.e_d) * (y_dark / y11);
    const double q11 = (mu * nu) * std::exp(-(mu + nu)) * y11;
    return {Probability(y11), Probability(e11), Probability(q11)};
}

}  // namespace qkdlab
