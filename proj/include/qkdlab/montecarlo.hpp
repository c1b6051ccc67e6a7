#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "qkdlab/decoy.hpp"
#include "qkdlab/model.hpp"

namespace qkdlab {

// One emitted pulse pair: phase-randomized coherent states of the given mean
// photon numbers, encoding the given bits in the given bases.
struct PulsePairSpec {
    double intensity_a{0.0};
    double intensity_b{0.0};
    Basis basis_a{Basis::z};
    Basis basis_b{Basis::z};
    int bit_a{0};
    int bit_b{0};
};

enum class Announcement { psi_plus, psi_minus, failure };

// Detector pattern of one measurement gate. Bits 0..3 of `fired` are the
// four threshold detectors D1..D4 = (c,H), (c,V), (d,H), (d,V), where c and
// d are the two beam-splitter output ports. A psi- announcement requires
// exactly {D1,D4} or {D2,D3}; psi+ requires exactly {D1,D2} or {D3,D4};
// everything else is failure.
struct ClickRecord {
    std::uint8_t fired{0};
    Announcement announced{Announcement::failure};
};

namespace detail {

// Signed (H, V) amplitude weights of a BB84 polarization state.
inline std::array<double, 2> pol_weights(Basis basis, int bit) {
    constexpr double r = std::numbers::sqrt2 / 2.0;
    if (basis == Basis::z)
        return bit == 0 ? std::array<double, 2>{1.0, 0.0} : std::array<double, 2>{0.0, 1.0};
    return bit == 0 ? std::array<double, 2>{r, r} : std::array<double, 2>{r, -r};
}

// 53-bit uniform draw in [0, 1). Built directly from the generator output so
// results do not depend on the standard library's distribution internals.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

// Propagate one pulse pair through the lossy arms into the 50/50 splitter
// and four threshold detectors.
//
// Phase randomization leaves only the relative phase phi of the two pulses
// physically meaningful, so phi is drawn uniformly. After loss, the mean
// photon number reaching detector (port, pol) is
//   ( ia u^2 + ib v^2 +/- 2 sqrt(ia ib) u v cos phi ) / 2
// with u, v the parties' signed polarization weights and +/- the port sign.
// Each detector fires on a photon arrival or a dark count:
//   P(click) = 1 - (1 - p_d) e^(-mean).
// Misalignment is realized as a classification flip: with probability e_d
// the second party's state is replaced by its same-basis orthogonal partner
// before the optics, while error accounting elsewhere keeps the original
// bits. This reproduces the closed-form gains and error rates exactly.
//
// Per call the generator is advanced by exactly six draws, in a frozen
// order: misalignment flip, relative phase, then detectors D1..D4.
inline ClickRecord simulate_pulse_pair(const PulsePairSpec& spec, const ArmEfficiencies& arms,
                                       const ChannelParams& params, std::mt19937_64& rng) {
    if (!(std::isfinite(spec.intensity_a) && spec.intensity_a >= 0.0 &&
          std::isfinite(spec.intensity_b) && spec.intensity_b >= 0.0))
        throw std::domain_error("simulate_pulse_pair: intensities must be finite and >= 0");
    const bool flip = detail::uniform01(rng) < params.e_d;
    const double phi = 2.0 * std::numbers::pi * detail::uniform01(rng);

    const auto u = detail::pol_weights(spec.basis_a, spec.bit_a);
    const auto v = detail::pol_weights(spec.basis_b, flip ? spec.bit_b ^ 1 : spec.bit_b);
    const double ia = spec.intensity_a * arms.eta_a;
    const double ib = spec.intensity_b * arms.eta_b;
    const double cross = 2.0 * std::sqrt(ia * ib) * std::cos(phi);

    std::uint8_t fired = 0;
    for (int port = 0; port < 2; ++port) {
        const double sign = port == 0 ? 1.0 : -1.0;
        for (int pol = 0; pol < 2; ++pol) {
            const double mean = std::max(
                0.0, (ia * u[static_cast<std::size_t>(pol)] * u[static_cast<std::size_t>(pol)] +
                      ib * v[static_cast<std::size_t>(pol)] * v[static_cast<std::size_t>(pol)] +
                      sign * cross * u[static_cast<std::size_t>(pol)] *
                          v[static_cast<std::size_t>(pol)]) /
                         2.0);
            const double p_click = 1.0 - (1.0 - params.p_d) * std::exp(-mean);
            if (detail::uniform01(rng) < p_click)
                fired |= static_cast<std::uint8_t>(1u << (port * 2 + pol));
        }
    }
    ClickRecord rec{fired, Announcement::failure};
    if (fired == 0b1001 || fired == 0b0110)
        rec.announced = Announcement::psi_minus;
    else if (fired == 0b0011 || fired == 0b1100)
        rec.announced = Announcement::psi_plus;
    return rec;
}

// Both announced outcomes imply anticorrelated Z bits; in the X basis psi-
// implies anticorrelated and psi+ correlated bits. An error is a successful
// announcement whose implication contradicts the emitted bits.
inline bool announced_error(Basis basis, int bit_a, int bit_b, Announcement announced) {
    if (announced == Announcement::failure)
        return false;
    if (basis == Basis::z)
        return bit_a == bit_b;
    return announced == Announcement::psi_minus ? bit_a == bit_b : bit_a != bit_b;
}

// What estimate_statistics samples from: fixed intensities, uniformly random
// bits, and bases either pinned or drawn uniformly per trial.
struct SpecDistribution {
    double intensity_a{0.0};
    double intensity_b{0.0};
    std::optional<Basis> basis_a{};  // nullopt: uniform over {Z, X}
    std::optional<Basis> basis_b{};
};

struct CellCounts {
    std::uint64_t trials{0};
    std::uint64_t successes{0};
    std::uint64_t errors{0};  // only tallied for matched-basis cells
};

// Aggregated counts per (basis_a, basis_b) cell, with derived point
// estimates and binomial standard errors.
struct EmpiricalStatistics {
    std::array<std::array<CellCounts, 2>, 2> cells{};  // indexed by [a==x][b==x]
    std::uint64_t n_trials{0};

    const CellCounts& cell(Basis a, Basis b) const {
        return cells[a == Basis::x ? 1 : 0][b == Basis::x ? 1 : 0];
    }
    const CellCounts& matched(Basis b) const { return cell(b, b); }

    static double gain_hat(const CellCounts& c) {
        return c.trials ? static_cast<double>(c.successes) / static_cast<double>(c.trials) : 0.0;
    }
    static double qber_hat(const CellCounts& c) {
        return c.successes ? static_cast<double>(c.errors) / static_cast<double>(c.successes) : 0.5;
    }
    static double gain_stderr(const CellCounts& c) {
        if (!c.trials)
            return 0.0;
        const double p = gain_hat(c);
        return std::sqrt(p * (1.0 - p) / static_cast<double>(c.trials));
    }
    static double qber_stderr(const CellCounts& c) {
        if (!c.successes)
            return 0.0;
        const double p = qber_hat(c);
        return std::sqrt(p * (1.0 - p) / static_cast<double>(c.successes));
    }
};

namespace detail {

inline constexpr std::uint64_t mc_block_size = std::uint64_t{1} << 16;

// Every block owns an independent generator seeded from (seed, block index),
// so any partition of blocks over threads reproduces the same counts.
inline std::mt19937_64 block_rng(std::uint64_t seed, std::uint64_t block) {
    std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
    return std::mt19937_64(sq);
}

inline void run_mc_block(const SpecDistribution& dist, std::uint64_t seed, std::uint64_t block,
                         std::uint64_t n_trials, const ArmEfficiencies& arms,
                         const ChannelParams& params, EmpiricalStatistics& acc) {
    std::mt19937_64 rng = block_rng(seed, block);
    const std::uint64_t begin = block * mc_block_size;
    const std::uint64_t count = std::min(mc_block_size, n_trials - begin);
    for (std::uint64_t t = 0; t < count; ++t) {
        // Frozen per-trial draw order: basis_a (if random), basis_b (if
        // random), bit_a, bit_b, then the six pulse draws.
        PulsePairSpec spec;
        spec.intensity_a = dist.intensity_a;
        spec.intensity_b = dist.intensity_b;
        spec.basis_a =
            dist.basis_a ? *dist.basis_a : (uniform01(rng) < 0.5 ? Basis::z : Basis::x);
        spec.basis_b =
            dist.basis_b ? *dist.basis_b : (uniform01(rng) < 0.5 ? Basis::z : Basis::x);
        spec.bit_a = uniform01(rng) < 0.5 ? 0 : 1;
        spec.bit_b = uniform01(rng) < 0.5 ? 0 : 1;
        const ClickRecord rec = simulate_pulse_pair(spec, arms, params, rng);
        CellCounts& cell = acc.cells[spec.basis_a == Basis::x ? 1 : 0]
                                    [spec.basis_b == Basis::x ? 1 : 0];
        ++cell.trials;
        if (rec.announced != Announcement::failure) {
            ++cell.successes;
            if (spec.basis_a == spec.basis_b &&
                announced_error(spec.basis_a, spec.bit_a, spec.bit_b, rec.announced))
                ++cell.errors;
        }
    }
}

inline void merge_counts(EmpiricalStatistics& into, const EmpiricalStatistics& from) {
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            auto& a = into.cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            const auto& b = from.cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            a.trials += b.trials;
            a.successes += b.successes;
            a.errors += b.errors;
        }
    }
    into.n_trials += from.n_trials;
}

}  // namespace detail

// Sample n_trials pulse pairs and aggregate per-basis-pair counts. The
// result is a pure function of (dist, n_trials, arms, params, seed): trials
// are partitioned into fixed-size blocks with per-block generators, and the
// integer merge is order-independent, so the thread count (0 = hardware
// concurrency) cannot change the outcome.
inline EmpiricalStatistics estimate_statistics(const SpecDistribution& dist, std::uint64_t n_trials,
                                               const ArmEfficiencies& arms,
                                               const ChannelParams& params, std::uint64_t seed,
                                               unsigned n_threads = 0) {
    if (n_trials < 1)
        throw std::domain_error("estimate_statistics: n_trials must be >= 1");
    const std::uint64_t n_blocks = (n_trials + detail::mc_block_size - 1) / detail::mc_block_size;
    if (n_threads == 0)
        n_threads = std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(
        std::min<std::uint64_t>(n_threads, n_blocks));

    std::vector<EmpiricalStatistics> partial(n_threads);
    const auto worker = [&](unsigned w) {
        for (std::uint64_t block = w; block < n_blocks; block += n_threads)
            detail::run_mc_block(dist, seed, block, n_trials, arms, params, partial[w]);
    };
    if (n_threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned w = 0; w < n_threads; ++w)
            pool.emplace_back(worker, w);
        for (auto& th : pool)
            th.join();
    }
    EmpiricalStatistics total;
    for (const auto& p : partial)
        detail::merge_counts(total, p);
    total.n_trials = n_trials;
    return total;
}

// Fill a decoy statistics table from sampled counts: n_per_cell trials for
// each of the 9 intensity pairs x 2 matched bases, with a distinct
// deterministic stream per cell. Cells with no successes carry the empty
// convention (E = 1/2).
inline PairStatistics empirical_pair_statistics(const ChannelParams& channel, double distance_km,
                                                const IntensitySet& intensities,
                                                std::uint64_t n_per_cell, std::uint64_t seed,
                                                unsigned n_threads = 0) {
    intensities.validate();
    const ArmEfficiencies arms = arm_transmittance(channel, distance_km);
    PairStatistics out;
    int cell_id = 0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            for (const Basis b : {Basis::z, Basis::x}) {
                const SpecDistribution d{intensities.at(i), intensities.at(j), b, b};
                const std::uint64_t cell_seed =
                    seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(cell_id + 1));
                const EmpiricalStatistics est =
                    estimate_statistics(d, n_per_cell, arms, channel, cell_seed, n_threads);
                const CellCounts& c = est.matched(b);
                out.cell(b, i, j) = {Probability(EmpiricalStatistics::gain_hat(c)),
                                     Probability(EmpiricalStatistics::qber_hat(c)),
                                     c.successes == 0};
                ++cell_id;
            }
        }
    }
    return out;
}

}  // namespace qkdlab
