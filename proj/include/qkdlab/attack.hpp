#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qkdlab {

// Single-qubit state |psi> = a0 |0> + a1 |1>.
struct QubitState {
    std::complex<double> a0;
    std::complex<double> a1;
};

enum class BB84 : int { zero = 0, one = 1, plus = 2, minus = 3 };

inline constexpr std::array<BB84, 4> bb84_all{BB84::zero, BB84::one, BB84::plus, BB84::minus};

inline QubitState bb84_state(BB84 s) {
    constexpr double r = std::numbers::sqrt2 / 2.0;
    switch (s) {
        case BB84::zero:
            return {1.0, 0.0};
        case BB84::one:
            return {0.0, 1.0};
        case BB84::plus:
            return {r, r};
        default:
            return {r, -r};
    }
}

inline const char* bb84_name(BB84 s) {
    switch (s) {
        case BB84::zero:
            return "|0>";
        case BB84::one:
            return "|1>";
        case BB84::plus:
            return "|+>";
        default:
            return "|->";
    }
}

inline bool bb84_is_z_basis(BB84 s) { return s == BB84::zero || s == BB84::one; }

namespace outcome {
inline constexpr int phi_plus = 0;
inline constexpr int phi_minus = 1;
inline constexpr int psi_plus = 2;
inline constexpr int psi_minus = 3;
inline constexpr std::array<const char*, 4> names{"phi+", "phi-", "psi+", "psi-"};
}  // namespace outcome

// Probabilities of the four Bell outcomes {phi+, phi-, psi+, psi-}.
struct BellOutcomeDistribution {
    std::array<double, 4> p{};

    double total() const { return p[0] + p[1] + p[2] + p[3]; }
};

namespace detail {

inline void check_normalized(const QubitState& q) {
    const double n = std::norm(q.a0) + std::norm(q.a1);
    if (std::abs(n - 1.0) > 1e-12)
        throw std::domain_error("qubit state is not normalized");
}

}  // namespace detail

// Ideal complete Bell-state measurement on a product input:
//   <phi+-|ab> = (a0 b0 +- a1 b1)/sqrt(2),  <psi+-|ab> = (a0 b1 +- a1 b0)/sqrt(2),
// yielding outcome probabilities |<Bell_i|ab>|^2.
inline BellOutcomeDistribution genuine_bsm_distribution(const QubitState& a, const QubitState& b) {
    detail::check_normalized(a);
    detail::check_normalized(b);
    const std::complex<double> phi_p = a.a0 * b.a0 + a.a1 * b.a1;
    const std::complex<double> phi_m = a.a0 * b.a0 - a.a1 * b.a1;
    const std::complex<double> psi_p = a.a0 * b.a1 + a.a1 * b.a0;
    const std::complex<double> psi_m = a.a0 * b.a1 - a.a1 * b.a0;
    return {{std::norm(phi_p) / 2.0, std::norm(phi_m) / 2.0, std::norm(psi_p) / 2.0,
             std::norm(psi_m) / 2.0}};
}

// Announcement distribution of a measurement device that cheats instead of
// performing a Bell measurement. When the first party's encoder leaks its
// four states into orthogonal higher-dimensional directions, the device
// identifies that state perfectly, measures the second party's qubit in the
// identified basis, and announces a Bell outcome consistent with what it
// found, choosing uniformly within the consistent pair:
//   Z basis: matching bit -> {phi+, phi-}, differing bit -> {psi+, psi-}
//   X basis: matching bit -> {phi+, psi+}, differing bit -> {phi-, psi-}
inline BellOutcomeDistribution attack_distribution(BB84 alice, const QubitState& bob) {
    detail::check_normalized(bob);
    const QubitState a = bb84_state(alice);
    const std::complex<double> overlap = std::conj(a.a0) * bob.a0 + std::conj(a.a1) * bob.a1;
    // |<a|b>|^2 can land an ulp above 1 for 1/sqrt(2) amplitudes; clamp so
    // the complementary probability cannot come out negative.
    const double p_same = std::min(1.0, std::norm(overlap));
    const double p_diff = 1.0 - p_same;
    BellOutcomeDistribution d{};
    if (bb84_is_z_basis(alice)) {
        d.p[outcome::phi_plus] = p_same / 2.0;
        d.p[outcome::phi_minus] = p_same / 2.0;
        d.p[outcome::psi_plus] = p_diff / 2.0;
        d.p[outcome::psi_minus] = p_diff / 2.0;
    } else {
        d.p[outcome::phi_plus] = p_same / 2.0;
        d.p[outcome::psi_plus] = p_same / 2.0;
        d.p[outcome::phi_minus] = p_diff / 2.0;
        d.p[outcome::psi_minus] = p_diff / 2.0;
    }
    return d;
}

// Half the L1 distance between two outcome distributions; 0 iff identical.
inline double total_variation(const BellOutcomeDistribution& a, const BellOutcomeDistribution& b) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i)
        s += std::abs(a.p[static_cast<std::size_t>(i)] - b.p[static_cast<std::size_t>(i)]);
    return s / 2.0;
}

struct AttackReportRow {
    BB84 alice;
    BB84 bob;
    BellOutcomeDistribution genuine;
    BellOutcomeDistribution attack;
    double tv;
};

struct AttackReport {
    std::array<AttackReportRow, 16> rows{};
    bool indistinguishable{false};  // every row's TV distance <= 1e-12
    // The cheating device identifies the first party's state exactly (the
    // four leaked directions are orthogonal), so its knowledge of that bit
    // is complete by construction whenever the strategy applies.
    bool charlie_knows_alice_bit{true};
};

// Compare the cheating announcement distribution against the genuine Bell
// measurement for all 16 BB84 input pairs.
inline AttackReport attack_indistinguishability_report() {
    AttackReport rep;
    std::size_t k = 0;
    bool all_zero = true;
    for (const BB84 a : bb84_all) {
        for (const BB84 b : bb84_all) {
            const BellOutcomeDistribution genuine =
                genuine_bsm_distribution(bb84_state(a), bb84_state(b));
            const BellOutcomeDistribution attacked = attack_distribution(a, bb84_state(b));
            const double tv = total_variation(genuine, attacked);
            all_zero = all_zero && tv <= 1e-12;
            rep.rows[k++] = {a, b, genuine, attacked, tv};
        }
    }
    rep.indistinguishable = all_zero;
    return rep;
}

// Plain-text table: one row per input pair with the outcomes that can occur,
// the probability that the announced outcome implies matching vs differing
// bits in the sender's basis, and the TV distance to the genuine device.
inline std::string render(const AttackReport& rep) {
    std::ostringstream os;
    os << "alice  bob    possible clicks              P[match]  P[differ]  TV distance\n";
    for (const AttackReportRow& row : rep.rows) {
        std::string clicks;
        for (int i = 0; i < 4; ++i) {
            if (row.attack.p[static_cast<std::size_t>(i)] > 1e-12) {
                if (!clicks.empty())
                    clicks += ", ";
                clicks += outcome::names[static_cast<std::size_t>(i)];
            }
        }
        double p_match;
        if (bb84_is_z_basis(row.alice))
            p_match = row.attack.p[outcome::phi_plus] + row.attack.p[outcome::phi_minus];
        else
            p_match = row.attack.p[outcome::phi_plus] + row.attack.p[outcome::psi_plus];
        char line[160];
        std::snprintf(line, sizeof line, "%-6s %-6s %-28s %8.4f  %9.4f  %.3e\n",
                      bb84_name(row.alice), bb84_name(row.bob), clicks.c_str(), p_match,
                      1.0 - p_match, row.tv);
        os << line;
    }
    os << (rep.indistinguishable ? "result: PASS (announcements indistinguishable from a genuine "
                                   "Bell measurement)\n"
                                 : "result: FAIL (announcement statistics deviate)\n");
    os << "sender bit known to the measurement device: "
       << (rep.charlie_knows_alice_bit ? "yes (complete)" : "no") << "\n";
    return os.str();
}

}  // namespace qkdlab
