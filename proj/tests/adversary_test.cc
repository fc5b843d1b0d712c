// Copyright 2026 The qmerkle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qmt/adversary.h"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <unsupported/Eigen/KroneckerProduct>

#include "qmt/error.h"
#include "test_util.h"

namespace qmt {
namespace {

using qmt_test::gaussian_state;
using qmt_test::gaussian_unitary;

Eigen::VectorXcd pad_zero(const Eigen::VectorXcd &psi, int b) {
    Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(Eigen::Index{1} << b);
    zero[0] = 1;
    return Eigen::kroneckerProduct(psi, zero).eval();
}

Eigen::MatrixXcd lift(const Eigen::MatrixXcd &w, int b) {
    return Eigen::kroneckerProduct(w, Eigen::MatrixXcd::Identity(Eigen::Index{1} << b, Eigen::Index{1} << b)).eval();
}

double switch_fidelity(const Eigen::MatrixXcd &g, const Eigen::MatrixXcd &w, const Eigen::VectorXcd &psi,
                       const Eigen::VectorXcd &phi, int b) {
    const Eigen::VectorXcd a = g * pad_zero(psi, b);
    const Eigen::VectorXcd bb = g * pad_zero(phi, b);
    return std::norm(bb.dot(lift(w, b) * a));
}

// Probability that the root reads 0^b after G^dagger (U x I) G on |psi 0>.
double root_zero_probability(const Eigen::MatrixXcd &g, const Eigen::MatrixXcd &u, const Eigen::VectorXcd &psi,
                             int b) {
    const Eigen::VectorXcd out = g.adjoint() * lift(u, b) * g * pad_zero(psi, b);
    const Eigen::Index block = Eigen::Index{1} << b;
    double p = 0;
    for (Eigen::Index x = 0; x < out.size(); x += block) p += std::norm(out[x]);
    return p;
}

Eigen::MatrixXcd phase_matrix(const PhaseFunction &f) {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(f.table().size(), f.table().size());
    for (std::size_t z = 0; z < f.table().size(); ++z) d(z, z) = f.table()[z] ? -1.0 : 1.0;
    return d;
}

TEST(PhaseFunction, Tables) {
    const auto p = PhaseFunction::parity(2);
    ASSERT_EQ(p.table().size(), 16U);
    for (std::size_t z = 0; z < 16; ++z) EXPECT_EQ(p.table()[z], std::popcount(z) % 2);
    const auto z = PhaseFunction::zero(3);
    for (auto v : z.table()) EXPECT_EQ(v, 0);
    EXPECT_THROW(PhaseFunction(2, std::vector<std::uint8_t>(8)), ValidationError);
    EXPECT_TRUE(phase_matrix(p).isApprox(p.as_operator()->to_matrix(), 1e-15));
}

TEST(PlusState, IsUniform) {
    const auto v = plus_state(4);
    ASSERT_EQ(v.size(), 16);
    for (Eigen::Index i = 0; i < 16; ++i) EXPECT_NEAR(std::abs(v[i] - 0.25), 0, 1e-15);
}

TEST(PhaseAttack, XorOracleAlwaysAcceptsTheParityFlip) {
    for (int b : {1, 2, 3}) {
        const auto f = PhaseFunction::parity(b);
        for (std::uint64_t s = 0; s < 100; ++s) {
            Oracle oracle = Oracle::build(OracleSpec::parse("oh"), b, s);
            Rng rng(s);
            const auto r = phase_attack_round(oracle, plus_state(2 * b), f, rng);
            ASSERT_TRUE(r.verifier_accepts);
            // Z on every qubit maps |+...+> to |-...->.
            EXPECT_NEAR(*r.trace_distance, 1.0, 1e-9);
        }
    }
}

TEST(PhaseAttack, XorOracleZeroFunctionChangesNothing) {
    Oracle oracle = Oracle::build(OracleSpec::parse("oh"), 2, 1);
    Rng rng(1);
    const auto r = phase_attack_round(oracle, plus_state(4), PhaseFunction::zero(2), rng);
    EXPECT_TRUE(r.verifier_accepts);
    EXPECT_NEAR(*r.trace_distance, 0.0, 1e-9);
}

TEST(PhaseAttack, XorOracleAcceptsEveryPhaseFunction) {
    Rng draw(2);
    std::mt19937_64 gen(3);
    for (int t = 0; t < 50; ++t) {
        const auto f = PhaseFunction::random(2, draw);
        const Eigen::VectorXcd psi = gaussian_state(16, gen);
        Oracle oracle = Oracle::build(OracleSpec::parse("oh"), 2, static_cast<std::uint64_t>(t));
        Rng rng(static_cast<std::uint64_t>(t));
        const auto r = phase_attack_round(oracle, psi, f, rng);
        ASSERT_TRUE(r.verifier_accepts);
        // Trace distance of pure states: sqrt(1 - |<psi|D|psi>|^2).
        const double expect = std::sqrt(std::max(0.0, 1 - std::norm(psi.dot(phase_matrix(f) * psi))));
        EXPECT_NEAR(*r.trace_distance, expect, 1e-9);
    }
}

TEST(PhaseAttack, HaarAcceptanceMatchesDenseComputation) {
    const int b = 2;
    Oracle oracle = Oracle::build(OracleSpec::parse("haar"), b, 4);
    const auto f = PhaseFunction::parity(b);
    const double p = root_zero_probability(oracle.dense_matrix(), phase_matrix(f), plus_state(2 * b), b);
    const int shots = 2000;
    int accepted = 0;
    for (int s = 0; s < shots; ++s) {
        Rng rng(static_cast<std::uint64_t>(s));
        accepted += phase_attack_round(oracle, plus_state(2 * b), f, rng).verifier_accepts;
    }
    EXPECT_NEAR(static_cast<double>(accepted) / shots, p, 3 * std::sqrt(p * (1 - p) / shots) + 1e-3);
}

TEST(PhaseAttack, HaarRejectsMostOfTheTime) {
    for (int b : {2, 3}) {
        const int draws = b == 2 ? 200 : 40;
        int accepted = 0;
        for (int s = 0; s < draws; ++s) {
            Oracle oracle = Oracle::build(OracleSpec::parse("haar"), b, static_cast<std::uint64_t>(100 + s));
            Rng rng(static_cast<std::uint64_t>(s));
            accepted += phase_attack_round(oracle, plus_state(2 * b), PhaseFunction::parity(b), rng).verifier_accepts;
        }
        const double rate = static_cast<double>(accepted) / draws;
        RecordProperty("haar_b" + std::to_string(b) + "_rate", std::to_string(rate));
        EXPECT_LT(rate, 0.5) << "b=" << b;
    }
}

TEST(Hjw, IdentityOracleSwitchesPerfectly) {
    std::mt19937_64 gen(5);
    for (int b : {1, 2, 3}) {
        const Eigen::Index d = Eigen::Index{1} << (2 * b);
        const Eigen::VectorXcd psi = gaussian_state(d, gen), phi = gaussian_state(d, gen);
        const Eigen::MatrixXcd g = Eigen::MatrixXcd::Identity(d << b, d << b);
        const auto r = hjw_switch_operator(g, psi, phi, b);
        EXPECT_NEAR(r.predicted_overlap, 1.0, 1e-9);
        EXPECT_NEAR(r.achieved_fidelity, 1.0, 1e-9);
        EXPECT_NEAR(*r.check_pass_probability, 1.0, 1e-9);
    }
}

TEST(Hjw, SameStateNeedsNoSwitch) {
    std::mt19937_64 gen(6);
    const Eigen::VectorXcd psi = gaussian_state(16, gen);
    const auto r = hjw_switch_operator(gaussian_unitary(64, gen), psi, psi, 2);
    EXPECT_NEAR(r.achieved_fidelity, 1.0, 1e-9);
    EXPECT_NEAR(*r.check_pass_probability, 1.0, 1e-9);
}

TEST(Hjw, FidelityIsSquaredOverlapAndBoundedByCheckPass) {
    std::mt19937_64 gen(7);
    for (int b : {1, 2, 3}) {
        const Eigen::Index d = Eigen::Index{1} << (2 * b);
        for (int t = 0; t < 10; ++t) {
            const Eigen::MatrixXcd g = gaussian_unitary(d << b, gen);
            const Eigen::VectorXcd psi = gaussian_state(d, gen), phi = gaussian_state(d, gen);
            const auto r = hjw_switch_operator(g, psi, phi, b);
            EXPECT_LT(unitarity_defect(r.w), 1e-10);
            EXPECT_NEAR(r.achieved_fidelity, r.predicted_overlap * r.predicted_overlap, 1e-9);
            EXPECT_NEAR(r.achieved_fidelity, switch_fidelity(g, r.w, psi, phi, b), 1e-9);
            EXPECT_NEAR(*r.check_pass_probability, root_zero_probability(g, r.w, psi, b), 1e-9);
            EXPECT_LE(r.achieved_fidelity, *r.check_pass_probability + 1e-9);
        }
    }
}

TEST(Hjw, SvdSwitchBeatsRandomUnitaries) {
    std::mt19937_64 gen(8);
    const int b = 1;
    const Eigen::MatrixXcd g = gaussian_unitary(8, gen);
    const Eigen::VectorXcd psi = gaussian_state(4, gen), phi = gaussian_state(4, gen);
    const auto r = hjw_switch_operator(g, psi, phi, b);
    for (int t = 0; t < 100; ++t) {
        const Eigen::MatrixXcd w = gaussian_unitary(4, gen);
        EXPECT_LE(switch_fidelity(g, w, psi, phi, b), r.achieved_fidelity + 1e-12);
    }
}

TEST(Hjw, FromImagesAgreesWithOperatorForm) {
    std::mt19937_64 gen(9);
    const int b = 2;
    const Eigen::MatrixXcd g = gaussian_unitary(64, gen);
    const Eigen::VectorXcd psi = gaussian_state(16, gen), phi = gaussian_state(16, gen);
    const auto a = hjw_switch_operator(g, psi, phi, b);
    const auto c = hjw_switch_from_images(g * pad_zero(psi, b), g * pad_zero(phi, b), b);
    EXPECT_NEAR(a.predicted_overlap, c.predicted_overlap, 1e-12);
    EXPECT_NEAR(a.achieved_fidelity, c.achieved_fidelity, 1e-12);
    EXPECT_FALSE(c.check_pass_probability.has_value());
}

TEST(Hjw, RejectsNonUnitaryOracle) {
    std::mt19937_64 gen(10);
    Eigen::MatrixXcd g = gaussian_unitary(8, gen);
    g(0, 0) += 0.1;
    EXPECT_THROW(hjw_switch_operator(g, gaussian_state(4, gen), gaussian_state(4, gen), 1), ValidationError);
}

TEST(Hjw, FrameImagesAreOrthonormalImages) {
    std::mt19937_64 gen(11);
    Rng rng(12);
    const int b = 4;
    const Eigen::VectorXcd psi = gaussian_state(256, gen), phi = gaussian_state(256, gen);
    const auto [a, c] = haar_frame_images(psi, phi, b, rng);
    ASSERT_EQ(a.size(), 4096);
    EXPECT_NEAR(a.norm(), 1.0, 1e-12);
    EXPECT_NEAR(c.norm(), 1.0, 1e-12);
    // A unitary preserves the inner product of its inputs.
    EXPECT_NEAR(std::abs(a.dot(c) - psi.dot(phi)), 0.0, 1e-12);
}

TEST(Hjw, MeanFidelityGrowsWithBlockSize) {
    double previous = 0;
    for (int b : {1, 2, 3}) {
        std::mt19937_64 gen(static_cast<std::uint64_t>(13 + b));
        const Eigen::Index d = Eigen::Index{1} << (2 * b);
        double sum = 0;
        const int draws = 30;
        for (int t = 0; t < draws; ++t) {
            const auto r = hjw_switch_operator(gaussian_unitary(d << b, gen), gaussian_state(d, gen),
                                               gaussian_state(d, gen), b);
            sum += r.achieved_fidelity;
        }
        EXPECT_GT(sum / draws, previous);
        previous = sum / draws;
    }
}

TEST(Hjw, EmpiricalCheckPassMatchesPrediction) {
    std::mt19937_64 gen(16);
    const int b = 2;
    Oracle oracle = Oracle::build(OracleSpec::parse("haar"), b, 17);
    const Eigen::VectorXcd psi = gaussian_state(16, gen), phi = gaussian_state(16, gen);
    const auto sw = hjw_switch_operator(oracle.dense_matrix(), psi, phi, b);
    const double p = *sw.check_pass_probability;
    const int shots = 2000;
    int passed = 0;
    double fid = 0;
    for (int s = 0; s < shots; ++s) {
        Rng rng(static_cast<std::uint64_t>(s));
        const auto r = hjw_attack_round(oracle, sw.w, psi, phi, rng);
        if (r.check_pass) {
            ++passed;
            fid += *r.conditional_fidelity;
        }
    }
    EXPECT_NEAR(static_cast<double>(passed) / shots, p, 3 * std::sqrt(p * (1 - p) / shots) + 1e-3);
    // Conditional fidelity is deterministic given a pass: achieved / pass probability.
    EXPECT_NEAR(fid / passed, sw.achieved_fidelity / p, 1e-9);
}

}  // namespace
}  // namespace qmt
