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

#include <bit>

#include "qmt/error.h"
#include "qmt/merkle.h"

namespace qmt {

namespace {

struct DepthOne {
    QuantumSystem system;
    std::vector<QubitId> data;
    MerkleLayout layout;
};

// Commits psi on a two-leaf tree and hands the root to the verifier.
DepthOne commit_depth_one(Oracle &oracle, const Eigen::VectorXcd &psi) {
    const int b = oracle.block_size();
    if (psi.size() != (Eigen::Index{1} << (2 * b))) throw ValidationError("committed state must have 2b qubits");
    QuantumSystem system;
    auto data = system.alloc_state(psi, Party::kProver);
    MerkleLayout layout = commit(system, oracle, data, b);
    system.transfer(layout.register_of(1), Party::kProver, Party::kVerifier);
    return {std::move(system), std::move(data), std::move(layout)};
}

DecommitResult open_depth_one(DepthOne &round, Oracle &oracle, Rng &rng) {
    round.system.transfer(round.data, Party::kProver, Party::kVerifier);
    return decommit(round.system, oracle, round.layout, NodeSet{2, 3}, rng);
}

// Rows index the first 2b qubits, columns the last b.
Eigen::MatrixXcd split_rows(const Eigen::VectorXcd &v, int block_size) {
    const Eigen::Index low = Eigen::Index{1} << block_size;
    const Eigen::Index high = v.size() / low;
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), low, high).transpose();
}

Eigen::VectorXcd join_rows(const Eigen::MatrixXcd &m) {
    Eigen::MatrixXcd t = m.transpose();
    return Eigen::Map<const Eigen::VectorXcd>(t.data(), t.size());
}

Eigen::VectorXcd with_zero_block(const Eigen::VectorXcd &psi, int block_size) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(psi.size() << block_size);
    for (Eigen::Index x = 0; x < psi.size(); ++x) v[x << block_size] = psi[x];
    return v;
}

}  // namespace

PhaseFunction::PhaseFunction(int block_size, std::vector<std::uint8_t> table)
    : block_size_(block_size), table_(std::move(table)) {
    if (block_size < 1 || block_size > kMaxHashBlock) throw ValidationError("phase function block size out of range");
    if (table_.size() != std::size_t{1} << (2 * block_size)) {
        throw ValidationError("phase table must have 2^(2b) entries");
    }
}

PhaseFunction PhaseFunction::parity(int block_size) {
    std::vector<std::uint8_t> t(std::size_t{1} << (2 * block_size));
    for (std::size_t z = 0; z < t.size(); ++z) t[z] = static_cast<std::uint8_t>(std::popcount(z) & 1);
    return {block_size, std::move(t)};
}

PhaseFunction PhaseFunction::zero(int block_size) {
    return {block_size, std::vector<std::uint8_t>(std::size_t{1} << (2 * block_size), 0)};
}

PhaseFunction PhaseFunction::random(int block_size, Rng &rng) {
    std::vector<std::uint8_t> t(std::size_t{1} << (2 * block_size));
    for (auto &bit : t) bit = static_cast<std::uint8_t>(rng() >> 63);
    return {block_size, std::move(t)};
}

std::shared_ptr<const Operator> PhaseFunction::as_operator() const {
    std::vector<Complex> phases(table_.size());
    for (std::size_t z = 0; z < table_.size(); ++z) phases[z] = table_[z] ? -1.0 : 1.0;
    return Operator::diagonal(2 * block_size_, std::move(phases));
}

Eigen::VectorXcd plus_state(int qubits) {
    const Eigen::Index dim = Eigen::Index{1} << qubits;
    return Eigen::VectorXcd::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
}

PhaseAttackResult phase_attack_round(Oracle &oracle, const Eigen::VectorXcd &psi, const PhaseFunction &f, Rng &rng) {
    if (f.block_size() != oracle.block_size()) throw ValidationError("phase function and oracle block sizes differ");
    DepthOne round = commit_depth_one(oracle, psi);
    round.system.apply(f.as_operator(), round.data);
    PhaseAttackResult out;
    const DecommitResult result = open_depth_one(round, oracle, rng);
    out.verifier_accepts = result.passed;
    if (result.passed) {
        out.trace_distance = trace_distance(round.system.reduced_density(round.data), DensityMatrix::pure(psi));
    }
    return out;
}

SwitchResult hjw_switch_from_images(const Eigen::VectorXcd &image_a, const Eigen::VectorXcd &image_b, int block_size) {
    const Eigen::Index dim = Eigen::Index{1} << (3 * block_size);
    if (image_a.size() != dim || image_b.size() != dim) throw ValidationError("images must live on 3b qubits");
    const Eigen::MatrixXcd a = split_rows(image_a, block_size);
    const Eigen::MatrixXcd b = split_rows(image_b, block_size);
    const Eigen::MatrixXcd m = a * b.adjoint();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    SwitchResult out;
    out.w = svd.matrixV() * svd.matrixU().adjoint();
    out.predicted_overlap = svd.singularValues().sum();

    QuantumSystem system({static_cast<std::size_t>(3 * block_size), Execution::kEager});
    auto labels = system.alloc_state(image_a, Party::kProver);
    system.apply_unitary(std::span<const QubitId>(labels.data(), static_cast<std::size_t>(2 * block_size)), out.w);
    out.achieved_fidelity = std::norm(image_b.dot(system.state_vector()));
    return out;
}

SwitchResult hjw_switch_operator(const Eigen::MatrixXcd &g, const Eigen::VectorXcd &psi, const Eigen::VectorXcd &phi,
                                 int block_size) {
    const Eigen::Index dim = Eigen::Index{1} << (3 * block_size);
    if (g.rows() != dim || g.cols() != dim) throw ValidationError("oracle must act on 3b qubits");
    if (unitarity_defect(g) > kExactTolerance) throw ValidationError("oracle matrix is not unitary");
    const Eigen::VectorXcd a = g * with_zero_block(psi, block_size);
    SwitchResult out = hjw_switch_from_images(a, g * with_zero_block(phi, block_size), block_size);
    const Eigen::VectorXcd back = g.adjoint() * join_rows(out.w * split_rows(a, block_size));
    double pass = 0;
    for (Eigen::Index x = 0; x < back.size(); x += Eigen::Index{1} << block_size) pass += std::norm(back[x]);
    out.check_pass_probability = pass;
    return out;
}

std::pair<Eigen::VectorXcd, Eigen::VectorXcd> haar_frame_images(const Eigen::VectorXcd &psi,
                                                                const Eigen::VectorXcd &phi, int block_size,
                                                                Rng &rng) {
    const Eigen::VectorXcd e1 = with_zero_block(psi, block_size);
    const Eigen::VectorXcd target = with_zero_block(phi, block_size);
    const Complex c = e1.dot(target);
    const double r = (target - c * e1).norm();
    const Eigen::MatrixXcd q = sample_haar_isometry(static_cast<std::size_t>(e1.size()), 2, rng);
    return {q.col(0), c * q.col(0) + r * q.col(1)};
}

HjwAttackResult hjw_attack_round(Oracle &oracle, const Eigen::MatrixXcd &w, const Eigen::VectorXcd &psi,
                                 const Eigen::VectorXcd &phi, Rng &rng) {
    DepthOne round = commit_depth_one(oracle, psi);
    round.system.apply_unitary(round.data, w);
    HjwAttackResult out;
    const DecommitResult result = open_depth_one(round, oracle, rng);
    out.check_pass = result.passed;
    if (result.passed) {
        out.conditional_fidelity = fidelity(round.system.reduced_density(round.data), DensityMatrix::pure(phi));
    }
    return out;
}

}  // namespace qmt
