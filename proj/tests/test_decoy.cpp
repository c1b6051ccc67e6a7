#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qkdlab/decoy.hpp"

#include "oracles.hpp"

using Catch::Matchers::WithinRel;
using namespace qkdlab;

namespace {
const ChannelParams kDefaults{};
const IntensitySet kSet{0.0, 0.01, 0.45};
}

TEST_CASE("IntensitySet validation", "[decoy]") {
    REQUIRE_NOTHROW(kSet.validate());
    REQUIRE_THROWS_AS(IntensitySet{0.001}.validate(), std::domain_error);       // vacuum not 0
    REQUIRE_THROWS_AS((IntensitySet{0.0, 0.0, 0.45}).validate(), std::domain_error);
    REQUIRE_THROWS_AS((IntensitySet{0.0, 0.45, 0.45}).validate(), std::domain_error);
    REQUIRE_THROWS_AS((IntensitySet{0.0, 0.45, 0.01}).validate(), std::domain_error);
    REQUIRE(kSet.at(0) == 0.0);
    REQUIRE(kSet.at(1) == 0.01);
    REQUIRE(kSet.at(2) == 0.45);
}

TEST_CASE("observe fills the table consistently with the model", "[decoy]") {
    const PairStatistics t = observe(kDefaults, 25.0, kSet);
    const ArmEfficiencies arms = arm_transmittance(kDefaults, 25.0);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const BasisStatistics z = gain_qber_zz(kSet.at(i), kSet.at(j), arms, kDefaults);
            REQUIRE(t.cell(Basis::z, i, j).gain.value == z.gain.value);
            REQUIRE(t.cell(Basis::z, i, j).qber.value == z.qber.value);
            const BasisStatistics x = gain_qber_xx(kSet.at(i), kSet.at(j), arms, kDefaults);
            REQUIRE(t.cell(Basis::x, i, j).gain.value == x.gain.value);
            REQUIRE(t.cell(Basis::x, i, j).qber.value == x.qber.value);
        }
    }
}

TEST_CASE("single-photon yield lower bound matches reference values", "[decoy]") {
    const PairStatistics t = observe(kDefaults, 50.0, kSet);
    const Bound yzz = y11_lower_two_decoy(t, kSet, Basis::z);
    const Bound yxx = y11_lower_two_decoy(t, kSet, Basis::x);
    REQUIRE_FALSE(yzz.clamped);
    REQUIRE_FALSE(yxx.clamped);
    // The bracket differences are cancellation-prone; the tolerance reflects
    // realistic double-precision headroom against the 50-digit reference.
    REQUIRE_THAT(yzz.value, WithinRel(0.0079219682707221540210, 1e-9));
    REQUIRE_THAT(yxx.value, WithinRel(0.0078529957917098110593, 1e-9));
}

TEST_CASE("single-photon error upper bound matches reference values", "[decoy]") {
    const PairStatistics t = observe(kDefaults, 50.0, kSet);
    const Bound yxx = y11_lower_two_decoy(t, kSet, Basis::x);
    const Bound e11 = e11_upper_two_decoy(t, kSet, yxx.value);
    REQUIRE_FALSE(e11.clamped);
    REQUIRE_THAT(e11.value, WithinRel(0.020331749392351969361, 1e-9));
}

TEST_CASE("bounds sandwich the true single-photon quantities", "[decoy]") {
    for (const double km : {0.0, 25.0, 50.0, 75.0, 100.0}) {
        const ArmEfficiencies arms = arm_transmittance(kDefaults, km);
        const SinglePhotonTruth truth = single_photon_truth(0.45, 0.45, arms, kDefaults);
        const PairStatistics t = observe(kDefaults, km, kSet);
        const Bound yzz = y11_lower_two_decoy(t, kSet, Basis::z);
        const Bound yxx = y11_lower_two_decoy(t, kSet, Basis::x);
        REQUIRE(yzz.value <= truth.y11.value);
        REQUIRE(yxx.value <= truth.y11.value);
        const Bound e11 = e11_upper_two_decoy(t, kSet, yxx.value);
        REQUIRE(e11.value >= truth.e11.value);
    }
}

TEST_CASE("estimation without certified signal throws", "[decoy]") {
    const PairStatistics t = observe(kDefaults, 50.0, kSet);
    REQUIRE_THROWS_AS(e11_upper_two_decoy(t, kSet, 0.0), EstimationError);
    REQUIRE_THROWS_AS(e11_upper_two_decoy(t, kSet, -1e-9), EstimationError);
}

namespace {

// A statistics table that drives the yield bracket strongly negative: huge
// single-decoy gains with negligible coincidence gains.
PairStatistics negative_yield_table() {
    PairStatistics t;
    for (const Basis b : {Basis::z, Basis::x}) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                t.cell(b, i, j) = {Probability(1e-9), Probability(0.1), false};
        t.cell(b, 1, 0) = {Probability(1e-3), Probability(0.1), false};
        t.cell(b, 0, 1) = {Probability(1e-3), Probability(0.1), false};
    }
    return t;
}

}  // namespace

TEST_CASE("unphysical input clamps the yield bound to zero and flags it", "[decoy]") {
    const PairStatistics t = negative_yield_table();
    const Bound y = y11_lower_two_decoy(t, kSet, Basis::z);
    REQUIRE(y.value == 0.0);
    REQUIRE(y.clamped);
    const SinglePhotonEstimates est = two_decoy_estimates_from(t, kSet);
    REQUIRE(est.no_signal);
    REQUIRE(est.clamped);
    REQUIRE(est.y11.value == 0.0);
    REQUIRE(est.e11.value == 0.5);
    REQUIRE(est.q11_zz.value == 0.0);
}

TEST_CASE("an error bound above one clamps to one and flags it", "[decoy]") {
    PairStatistics t;
    for (const Basis b : {Basis::z, Basis::x})
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                t.cell(b, i, j) = {Probability(0.0), Probability(0.5), true};
    t.cell(Basis::x, 0, 0) = {Probability(1.0), Probability(0.5), false};
    const Bound e11 = e11_upper_two_decoy(t, kSet, 0.01);
    REQUIRE(e11.value == 1.0);
    REQUIRE(e11.clamped);
}

TEST_CASE("two_decoy_estimates composes the pipeline", "[decoy]") {
    const SinglePhotonEstimates est = two_decoy_estimates(kDefaults, 50.0, kSet);
    REQUIRE(est.mode == EstimateMode::two_decoy_bound);
    REQUIRE_FALSE(est.clamped);
    REQUIRE_FALSE(est.no_signal);
    REQUIRE_THAT(est.q11_zz.value, WithinRel(0.00065221846872142402322, 1e-9));
    REQUIRE_THAT(est.y11.value, WithinRel(0.0079219682707221540210, 1e-9));
    REQUIRE_THAT(est.e11.value, WithinRel(0.020331749392351969361, 1e-9));
}

TEST_CASE("asymptotic_estimates reports the exact channel truth", "[decoy]") {
    const SinglePhotonEstimates est = asymptotic_estimates(kDefaults, 50.0, 0.45, 0.45);
    REQUIRE(est.mode == EstimateMode::exact);
    REQUIRE_FALSE(est.clamped);
    REQUIRE_FALSE(est.no_signal);
    const ArmEfficiencies arms = arm_transmittance(kDefaults, 50.0);
    const SinglePhotonTruth t = single_photon_truth(0.45, 0.45, arms, kDefaults);
    REQUIRE(est.y11.value == t.y11.value);
    REQUIRE(est.e11.value == t.e11.value);
    REQUIRE(est.q11_zz.value == t.q11_zz.value);
}

TEST_CASE("two-decoy bounds agree with the extended-precision oracle", "[decoy]") {
    for (const double km : {0.0, 50.0, 100.0}) {
        const PairStatistics t = observe(kDefaults, km, kSet);
        const testoracle::Table ot =
            testoracle::observe(static_cast<long double>(km), 0.01L, 0.45L, 0.40L, 0.2L, 3e-6L,
                                0.015L);
        const Bound yzz = y11_lower_two_decoy(t, kSet, Basis::z);
        REQUIRE_THAT(yzz.value,
                     WithinRel(static_cast<double>(testoracle::y11_lower(ot.qz, 0.01L, 0.45L)),
                               1e-9));
        const Bound yxx = y11_lower_two_decoy(t, kSet, Basis::x);
        const Bound e11 = e11_upper_two_decoy(t, kSet, yxx.value);
        const long double oyxx = testoracle::y11_lower(ot.qx, 0.01L, 0.45L);
        REQUIRE_THAT(e11.value,
                     WithinRel(static_cast<double>(testoracle::e11_upper(ot, 0.01L, oyxx)), 1e-8));
    }
}
