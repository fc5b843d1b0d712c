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

#include "qmt/qstate.h"

#include <gtest/gtest.h>

#include <cmath>

#include "qmt/error.h"
#include "test_util.h"

namespace qmt {
namespace {

using qmt_test::gaussian_state;
using qmt_test::gaussian_unitary;
using qmt_test::partial_trace;
using qmt_test::reference_apply;

SystemOptions eager() { return {20, Execution::kEager}; }

Eigen::VectorXcd basis(int dim, int index) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    v[index] = 1;
    return v;
}

Eigen::VectorXcd plus() { return Eigen::VectorXcd::Constant(2, 1 / std::sqrt(2.0)); }

TEST(QuantumSystem, AllocatesBasisStates) {
    QuantumSystem sys(eager());
    sys.alloc_register("00", Party::kProver);
    EXPECT_EQ(sys.state_vector(), basis(4, 0));
    sys.alloc_register("1", Party::kProver);
    EXPECT_EQ(sys.state_vector(), basis(8, 1));
    EXPECT_NEAR(sys.norm_squared(), 1.0, 1e-12);
}

TEST(QuantumSystem, NewRegisterIsUnentangled) {
    QuantumSystem sys(eager());
    auto a = sys.alloc_state(plus(), Party::kProver);
    sys.alloc_register("0", Party::kProver);
    const Eigen::MatrixXcd rho = sys.reduced_density(a).matrix();
    EXPECT_NEAR((rho - plus() * plus().adjoint()).norm(), 0.0, 1e-12);
}

TEST(QuantumSystem, CapIsEnforced) {
    QuantumSystem sys({20, Execution::kDeferred});
    EXPECT_THROW(sys.alloc_register(21, Party::kProver), ResourceError);
    sys.alloc_register(20, Party::kProver);
    EXPECT_THROW(sys.alloc_register(1, Party::kProver), ResourceError);
}

TEST(QuantumSystem, IdentityLeavesAmplitudesBitwiseEqual) {
    std::mt19937_64 rng(1);
    QuantumSystem sys(eager());
    const Eigen::VectorXcd psi = gaussian_state(8, rng);
    auto q = sys.alloc_state(psi, Party::kProver);
    sys.apply_unitary(q, Eigen::MatrixXcd::Identity(8, 8));
    EXPECT_EQ(sys.state_vector(), psi);
}

TEST(QuantumSystem, SwapExchangesBasisBits) {
    QuantumSystem sys(eager());
    auto q = sys.alloc_register("01", Party::kProver);
    Eigen::MatrixXcd swap = Eigen::MatrixXcd::Zero(4, 4);
    swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1;
    sys.apply_unitary(q, swap);
    Rng rng(0);
    EXPECT_EQ(sys.measure(q, rng), "10");
}

TEST(QuantumSystem, GateMatchesReferenceOnArbitraryQubitOrder) {
    std::mt19937_64 rng(2);
    for (auto targets : std::vector<std::vector<int>>{{2, 0}, {1}, {3, 1, 0}, {0, 1, 2, 3}}) {
        const Eigen::VectorXcd psi = gaussian_state(16, rng);
        const Eigen::MatrixXcd u = gaussian_unitary(1 << targets.size(), rng);
        QuantumSystem sys(eager());
        auto q = sys.alloc_state(psi, Party::kProver);
        std::vector<QubitId> labels;
        for (int t : targets) labels.push_back(q[static_cast<std::size_t>(t)]);
        sys.apply_unitary(labels, u);
        EXPECT_LT((sys.state_vector() - reference_apply(psi, 4, targets, u)).norm(), 1e-12);
    }
}

TEST(QuantumSystem, ApplyThenDaggerRestores) {
    std::mt19937_64 rng(3);
    for (int t = 1; t <= 6; ++t) {
        for (auto mode : {Execution::kEager, Execution::kDeferred}) {
            const Eigen::VectorXcd psi = gaussian_state(128, rng);
            const Eigen::MatrixXcd u = gaussian_unitary(1 << t, rng);
            QuantumSystem sys({20, mode});
            auto q = sys.alloc_state(psi, Party::kProver);
            std::vector<QubitId> labels(q.end() - t, q.end());
            sys.apply_unitary(labels, u);
            sys.apply_unitary(labels, u, true);
            EXPECT_LT((sys.state_vector() - psi).norm(), 1e-9);
        }
    }
}

TEST(QuantumSystem, RejectsBadInput) {
    QuantumSystem sys(eager());
    auto q = sys.alloc_register("00", Party::kProver);
    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(2, 2);
    bad(0, 0) = 1.1;
    EXPECT_THROW(sys.apply_unitary(std::span(q.data(), 1), bad), ValidationError);
    std::vector<QubitId> dup{q[0], q[0]};
    EXPECT_THROW(sys.apply_unitary(dup, Eigen::MatrixXcd::Identity(4, 4)), UsageError);
    std::vector<QubitId> dead{QubitId{7}};
    EXPECT_THROW(sys.apply_unitary(dead, Eigen::MatrixXcd::Identity(2, 2)), UsageError);
}

TEST(QuantumSystem, MeasuresBasisStateDeterministically) {
    QuantumSystem sys(eager());
    auto q = sys.alloc_register("000", Party::kVerifier);
    Rng rng(4);
    EXPECT_EQ(sys.measure(q, rng), "000");
}

TEST(QuantumSystem, BornRuleOnPlus) {
    Rng rng(5);
    int ones = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        QuantumSystem sys(eager());
        auto q = sys.alloc_state(plus(), Party::kVerifier);
        ones += sys.measure(q, rng) == "1";
    }
    const double p = static_cast<double>(ones) / trials;
    EXPECT_NEAR(p, 0.5, 3 * std::sqrt(0.25 / trials));
}

TEST(QuantumSystem, BellPairIsPerfectlyCorrelated) {
    Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(4);
    bell[0] = bell[3] = 1 / std::sqrt(2.0);
    Rng rng(6);
    for (int i = 0; i < 200; ++i) {
        QuantumSystem sys(eager());
        auto q = sys.alloc_state(bell, Party::kProver);
        const auto first = sys.measure(std::span(q.data(), 1), rng);
        const auto second = sys.measure(std::span(q.data() + 1, 1), rng);
        EXPECT_EQ(first, second);
        EXPECT_NEAR(sys.norm_squared(), 1.0, 1e-12);
    }
}

TEST(QuantumSystem, PovmOrthogonalEffectAlwaysAccepts) {
    Eigen::MatrixXcd one = Eigen::MatrixXcd::Zero(2, 2);
    one(1, 1) = 1;
    Rng rng(7);
    for (int i = 0; i < 100; ++i) {
        QuantumSystem sys(eager());
        auto q = sys.alloc_register("0", Party::kVerifier);
        EXPECT_TRUE(sys.measure_povm_accept(q, one, rng));
    }
}

TEST(QuantumSystem, PovmOnPlusAcceptsHalfTheTime) {
    Eigen::MatrixXcd one = Eigen::MatrixXcd::Zero(2, 2);
    one(1, 1) = 1;
    Rng rng(8);
    int accepts = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        QuantumSystem sys(eager());
        auto q = sys.alloc_state(plus(), Party::kVerifier);
        accepts += sys.measure_povm_accept(q, one, rng);
    }
    EXPECT_NEAR(static_cast<double>(accepts) / trials, 0.5, 3 * std::sqrt(0.25 / trials));
}

TEST(QuantumSystem, PovmRateMatchesDirectTrace) {
    std::mt19937_64 gen(9);
    const Eigen::MatrixXcd v = gaussian_unitary(4, gen);
    Eigen::VectorXd lambdas(4);
    lambdas << 0.1, 0.35, 0.8, 0.95;
    const Eigen::MatrixXcd effect = v * lambdas.cast<Complex>().asDiagonal() * v.adjoint();
    const Eigen::VectorXcd psi = gaussian_state(8, gen);
    const Eigen::MatrixXcd rho = partial_trace(psi, 3, {0, 2});
    const double expected = 1.0 - (effect * rho).trace().real();

    Rng rng(10);
    int accepts = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        QuantumSystem sys(eager());
        auto q = sys.alloc_state(psi, Party::kVerifier);
        std::vector<QubitId> labels{q[0], q[2]};
        accepts += sys.measure_povm_accept(labels, effect, rng);
    }
    const double sd = std::sqrt(expected * (1 - expected) / trials);
    EXPECT_NEAR(static_cast<double>(accepts) / trials, expected, 3 * sd);
}

TEST(QuantumSystem, PovmCollapseUsesSquareRootOfEffect) {
    Eigen::MatrixXcd reject = Eigen::MatrixXcd::Zero(2, 2);
    reject(0, 0) = 0.25;
    reject(1, 1) = 0.75;
    Rng rng(11);
    bool saw_accept = false;
    bool saw_reject = false;
    for (int i = 0; i < 64 && !(saw_accept && saw_reject); ++i) {
        QuantumSystem sys(eager());
        auto q = sys.alloc_state(plus(), Party::kVerifier);
        const bool accept = sys.measure_povm_accept(q, reject, rng);
        // sqrt(F)|+> for the observed effect F, normalized.
        Eigen::VectorXcd expected(2);
        expected << std::sqrt(accept ? 0.75 : 0.25), std::sqrt(accept ? 0.25 : 0.75);
        expected /= expected.norm();
        EXPECT_NEAR(std::abs(expected.dot(sys.state_vector())), 1.0, 1e-12);
        (accept ? saw_accept : saw_reject) = true;
    }
    EXPECT_TRUE(saw_accept && saw_reject);
}

TEST(QuantumSystem, PovmRejectsEffectOutOfRange) {
    QuantumSystem sys(eager());
    auto q = sys.alloc_register("0", Party::kVerifier);
    Rng rng(12);
    EXPECT_THROW(sys.measure_povm_accept(q, 1.5 * Eigen::MatrixXcd::Identity(2, 2), rng), ValidationError);
    Eigen::MatrixXcd skew = Eigen::MatrixXcd::Zero(2, 2);
    skew(0, 1) = 0.5;
    EXPECT_THROW(sys.measure_povm_accept(q, skew, rng), ValidationError);
}

TEST(QuantumSystem, ReducedStateOfBellPairIsMaximallyMixed) {
    Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(4);
    bell[0] = bell[3] = 1 / std::sqrt(2.0);
    QuantumSystem sys(eager());
    auto q = sys.alloc_state(bell, Party::kProver);
    for (std::size_t j = 0; j < 2; ++j) {
        const auto rho = sys.reduced_density(std::span(q.data() + j, 1)).matrix();
        EXPECT_LT((rho - 0.5 * Eigen::MatrixXcd::Identity(2, 2)).norm(), 1e-9);
    }
}

TEST(QuantumSystem, ReducedStateOfProductIsPure) {
    std::mt19937_64 gen(13);
    QuantumSystem sys(eager());
    auto a = sys.alloc_state(gaussian_state(4, gen), Party::kProver);
    sys.alloc_state(gaussian_state(2, gen), Party::kProver);
    EXPECT_NEAR(sys.reduced_density(a).purity(), 1.0, 1e-9);
}

TEST(QuantumSystem, PartialTraceComposes) {
    std::mt19937_64 gen(14);
    for (int n : {3, 4}) {
        const Eigen::VectorXcd psi = gaussian_state(1 << n, gen);
        QuantumSystem sys(eager());
        auto q = sys.alloc_state(psi, Party::kProver);
        // Keep qubit 0 directly, and via keeping {0, 1} then tracing out 1.
        const Eigen::MatrixXcd direct = sys.reduced_density(std::span(q.data(), 1)).matrix();
        const Eigen::MatrixXcd two_step = qmt_test::trace_out_tail(partial_trace(psi, n, {0, 1}), 1);
        EXPECT_LT((direct - two_step).norm(), 1e-9);
        const Eigen::MatrixXcd pair = sys.reduced_density(std::span(q.data(), 2)).matrix();
        EXPECT_LT((pair - partial_trace(psi, n, {0, 1})).norm(), 1e-9);
    }
}

TEST(QuantumSystem, OutcomeProbabilitiesMatchReducedDiagonal) {
    std::mt19937_64 gen(15);
    const Eigen::VectorXcd psi = gaussian_state(16, gen);
    QuantumSystem sys(eager());
    auto q = sys.alloc_state(psi, Party::kProver);
    std::vector<QubitId> labels{q[3], q[1]};
    const auto probs = sys.outcome_probabilities(labels);
    const Eigen::MatrixXcd rho = partial_trace(psi, 4, {3, 1});
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(probs[k], rho(k, k).real(), 1e-12);
}

TEST(QuantumSystem, EmpiricalFrequenciesMatchBornProbabilities) {
    std::mt19937_64 gen(16);
    const Eigen::VectorXcd psi = gaussian_state(8, gen);
    const Eigen::MatrixXcd rho = partial_trace(psi, 3, {0, 2});
    Rng rng(17);
    std::array<int, 4> counts{};
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        QuantumSystem sys(eager());
        auto q = sys.alloc_state(psi, Party::kVerifier);
        std::vector<QubitId> labels{q[0], q[2]};
        counts[std::stoi(sys.measure(labels, rng), nullptr, 2)]++;
    }
    for (int k = 0; k < 4; ++k) {
        const double p = rho(k, k).real();
        EXPECT_NEAR(static_cast<double>(counts[k]) / trials, p, 4 * std::sqrt(p * (1 - p) / trials));
    }
}

TEST(Fidelity, ReferenceValues) {
    const auto zero = DensityMatrix::pure(basis(2, 0));
    const auto one = DensityMatrix::pure(basis(2, 1));
    const auto p = DensityMatrix::pure(plus());
    EXPECT_NEAR(fidelity(p, p), 1.0, 1e-12);
    EXPECT_NEAR(trace_distance(p, p), 0.0, 1e-12);
    EXPECT_NEAR(fidelity(zero, one), 0.0, 1e-12);
    EXPECT_NEAR(trace_distance(zero, one), 1.0, 1e-12);
    EXPECT_NEAR(fidelity(zero, p), 0.5, 1e-12);
    EXPECT_NEAR(trace_distance(zero, p), std::sqrt(0.5), 1e-12);
}

TEST(Fidelity, CommutingMixedStates) {
    for (double a : {0.1, 0.5, 0.9}) {
        for (double b : {0.2, 0.7}) {
            Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(2, 2);
            Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(2, 2);
            r(0, 0) = a;
            r(1, 1) = 1 - a;
            s(0, 0) = b;
            s(1, 1) = 1 - b;
            const double f = std::pow(std::sqrt(a * b) + std::sqrt((1 - a) * (1 - b)), 2);
            EXPECT_NEAR(fidelity(DensityMatrix(r), DensityMatrix(s)), f, 1e-9);
            EXPECT_NEAR(trace_distance(DensityMatrix(r), DensityMatrix(s)), std::abs(a - b), 1e-12);
        }
    }
}

TEST(Fidelity, DimensionMismatchThrows) {
    const auto a = DensityMatrix::pure(basis(2, 0));
    const auto b = DensityMatrix::pure(basis(4, 0));
    EXPECT_THROW(fidelity(a, b), ValidationError);
    EXPECT_THROW(trace_distance(a, b), ValidationError);
}

TEST(DensityMatrix, ValidatesInvariants) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2, 2);
    EXPECT_THROW(DensityMatrix{m}, ValidationError);  // trace 2
    m(0, 0) = 1.5;
    m(1, 1) = -0.5;
    EXPECT_THROW(DensityMatrix{m}, ValidationError);  // negative eigenvalue
}

TEST(QuantumSystem, TransferIsBookkeepingOnly) {
    std::mt19937_64 gen(18);
    QuantumSystem sys(eager());
    auto q = sys.alloc_state(gaussian_state(4, gen), Party::kProver);
    const Eigen::VectorXcd before = sys.state_vector();
    std::vector<QubitId> root{q[0]};
    sys.transfer(root, Party::kProver, Party::kVerifier);
    EXPECT_EQ(sys.owner(q[0]), Party::kVerifier);
    EXPECT_EQ(sys.owner(q[1]), Party::kProver);
    EXPECT_EQ(sys.state_vector(), before);
    EXPECT_THROW(sys.transfer(root, Party::kProver, Party::kVerifier), ProtocolViolation);
}

TEST(QuantumSystem, NormPreservedOverRandomSequence) {
    std::mt19937_64 gen(19);
    Rng rng(20);
    QuantumSystem sys(eager());
    auto q = sys.alloc_state(gaussian_state(8, gen), Party::kProver);
    for (int step = 0; step < 30; ++step) {
        if (step % 7 == 3) {
            auto extra = sys.alloc_register("1", Party::kProver);
            q.push_back(extra[0]);
        }
        std::vector<QubitId> labels{q[gen() % q.size()]};
        const QubitId other = q[gen() % q.size()];
        if (other != labels[0]) labels.push_back(other);
        sys.apply_unitary(labels, gaussian_unitary(1 << labels.size(), gen));
        if (step % 5 == 4) sys.measure(std::span(labels.data(), 1), rng);
        EXPECT_NEAR(sys.norm_squared(), 1.0, 1e-9);
    }
}

// The deferred executor must be observationally identical to eager execution.
TEST(QuantumSystem, DeferredMatchesEager) {
    std::mt19937_64 gen(21);
    std::vector<std::shared_ptr<const Operator>> ops;
    for (int i = 0; i < 4; ++i) ops.push_back(Operator::dense(gaussian_unitary(4, gen)));
    const Eigen::VectorXcd psi = gaussian_state(8, gen);
    struct Step {
        int op, a, b;
        bool dagger, measure;
    };
    std::vector<Step> steps;
    for (int i = 0; i < 40; ++i) {
        int a = static_cast<int>(gen() % 6);
        int b = static_cast<int>(gen() % 6);
        if (b == a) b = (a + 1) % 6;
        steps.push_back({static_cast<int>(gen() % 4), a, b, gen() % 2 == 0, gen() % 9 == 0});
        if (gen() % 3 == 0) steps.push_back({steps.back().op, steps.back().a, steps.back().b, !steps.back().dagger, false});
    }
    std::vector<std::string> outcomes[2];
    Eigen::VectorXcd finals[2];
    for (int mode = 0; mode < 2; ++mode) {
        QuantumSystem sys({20, mode ? Execution::kDeferred : Execution::kEager});
        auto q = sys.alloc_state(psi, Party::kProver);
        auto more = sys.alloc_register("010", Party::kProver);
        q.insert(q.end(), more.begin(), more.end());
        Rng rng(22);
        for (const auto &s : steps) {
            std::vector<QubitId> labels{q[s.a], q[s.b]};
            sys.apply(ops[s.op], labels, s.dagger);
            if (s.measure) outcomes[mode].push_back(sys.measure(std::span(labels.data(), 1), rng));
        }
        outcomes[mode].push_back(sys.measure(std::span(q.data(), 2), rng));
        finals[mode] = sys.state_vector();
    }
    EXPECT_EQ(outcomes[0], outcomes[1]);
    EXPECT_LT((finals[0] - finals[1]).norm(), 1e-9);
}

TEST(QuantumSystem, DeferredInversePairsCancel) {
    std::mt19937_64 gen(23);
    auto op = Operator::dense(gaussian_unitary(8, gen));
    QuantumSystem sys({32, Execution::kDeferred});
    auto q = sys.alloc_register(30, Party::kProver);
    std::vector<QubitId> a(q.begin(), q.begin() + 3);
    std::vector<QubitId> b(q.begin() + 3, q.begin() + 6);
    sys.apply(op, a);
    sys.apply(op, b);
    EXPECT_EQ(sys.pending_gate_count(), 2U);
    sys.apply(op, b, true);
    sys.apply(op, a, true);
    EXPECT_EQ(sys.pending_gate_count(), 0U);
    Rng rng(24);
    EXPECT_EQ(sys.measure(q, rng), std::string(30, '0'));
    EXPECT_EQ(sys.dense_qubit_count(), 0U);
}

TEST(Operator, VariantsExpandToTheirMatrices) {
    auto perm = Operator::permutation(2, {1, 2, 3, 0});
    const Eigen::MatrixXcd p = perm->to_matrix();
    for (int x = 0; x < 4; ++x) EXPECT_EQ(p((x + 1) % 4, x), Complex(1));
    auto diag = Operator::diagonal(1, {1.0, Complex(0, 1)});
    EXPECT_EQ(diag->to_matrix()(1, 1), Complex(0, 1));
    EXPECT_THROW(Operator::permutation(1, {0, 0}), ValidationError);
    EXPECT_THROW(Operator::diagonal(1, {1.0, 0.5}), ValidationError);
}

}  // namespace
}  // namespace qmt
