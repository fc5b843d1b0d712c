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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <random>
#include <set>

#include "qmt/error.h"

namespace qmt {

namespace {

constexpr int kMaxDenseQubits = 26;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int log2_exact(std::size_t n) { return std::countr_zero(n); }

// Index tables for acting on `positions` inside a register of `total_bits`.
// Row r of a 2^t operator maps to offsets[r]; the first position is the most
// significant bit of r. bases enumerates the remaining bits.
struct IndexMap {
    std::vector<std::size_t> offsets;
    std::vector<std::size_t> bases;
};

IndexMap index_map(const std::vector<int> &positions, int total_bits) {
    const int t = static_cast<int>(positions.size());
    IndexMap map;
    map.offsets.resize(std::size_t{1} << t);
    for (std::size_t r = 0; r < map.offsets.size(); ++r) {
        std::size_t off = 0;
        for (int j = 0; j < t; ++j) {
            if ((r >> (t - 1 - j)) & 1U) off |= std::size_t{1} << positions[j];
        }
        map.offsets[r] = off;
    }
    std::vector<int> free_bits;
    for (int p = 0; p < total_bits; ++p) {
        if (std::find(positions.begin(), positions.end(), p) == positions.end()) free_bits.push_back(p);
    }
    map.bases.resize(std::size_t{1} << free_bits.size());
    for (std::size_t c = 0; c < map.bases.size(); ++c) {
        std::size_t base = 0;
        for (std::size_t k = 0; k < free_bits.size(); ++k) {
            if ((c >> k) & 1U) base |= std::size_t{1} << free_bits[k];
        }
        map.bases[c] = base;
    }
    return map;
}

void kernel_matrix(Eigen::VectorXcd &amps, int total_bits, const std::vector<int> &positions,
                   const Eigen::MatrixXcd &m) {
    const auto map = index_map(positions, total_bits);
    const auto dim = static_cast<Eigen::Index>(map.offsets.size());
    const auto rest = static_cast<Eigen::Index>(map.bases.size());
    Eigen::MatrixXcd block(dim, rest);
    for (Eigen::Index c = 0; c < rest; ++c) {
        for (Eigen::Index r = 0; r < dim; ++r) block(r, c) = amps[map.bases[c] + map.offsets[r]];
    }
    Eigen::MatrixXcd out(dim, rest);
    out.noalias() = m * block;
    for (Eigen::Index c = 0; c < rest; ++c) {
        for (Eigen::Index r = 0; r < dim; ++r) amps[map.bases[c] + map.offsets[r]] = out(r, c);
    }
}

void kernel_apply(Eigen::VectorXcd &amps, int total_bits, const Operator &op,
                  const std::vector<int> &positions, bool dagger) {
    std::visit(
        [&](const auto &body) {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, Operator::Dense>) {
                if (dagger) {
                    kernel_matrix(amps, total_bits, positions, body.matrix.adjoint());
                } else {
                    kernel_matrix(amps, total_bits, positions, body.matrix);
                }
            } else if constexpr (std::is_same_v<T, Operator::Permutation>) {
                const auto &image = dagger ? body.inverse : body.image;
                const auto map = index_map(positions, total_bits);
                std::vector<Complex> tmp(map.offsets.size());
                for (auto base : map.bases) {
                    for (std::size_t r = 0; r < tmp.size(); ++r) tmp[r] = amps[base + map.offsets[r]];
                    for (std::size_t r = 0; r < tmp.size(); ++r) amps[base + map.offsets[image[r]]] = tmp[r];
                }
            } else if constexpr (std::is_same_v<T, Operator::Diagonal>) {
                const auto map = index_map(positions, total_bits);
                for (auto base : map.bases) {
                    for (std::size_t r = 0; r < map.offsets.size(); ++r) {
                        amps[base + map.offsets[r]] *= dagger ? std::conj(body.phases[r]) : body.phases[r];
                    }
                }
            } else {
                auto run = [&](const Operator::CircuitGate &g) {
                    std::vector<int> sub;
                    for (int w : g.wires) sub.push_back(positions[w]);
                    if (dagger) {
                        kernel_matrix(amps, total_bits, sub, g.matrix.adjoint());
                    } else {
                        kernel_matrix(amps, total_bits, sub, g.matrix);
                    }
                };
                if (dagger) {
                    std::for_each(body.gates.rbegin(), body.gates.rend(), run);
                } else {
                    std::for_each(body.gates.begin(), body.gates.end(), run);
                }
            }
        },
        op.body());
}

Eigen::MatrixXcd hermitian_sqrt(const Eigen::MatrixXcd &m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

const char *party_name(Party p) {
    switch (p) {
        case Party::kProver:
            return "prover";
        case Party::kVerifier:
            return "verifier";
        case Party::kNobody:
            break;
    }
    return "nobody";
}

std::size_t default_qubit_cap() {
    if (const char *env = std::getenv("QMT_MAX_QUBITS")) {
        char *end = nullptr;
        auto v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return v;
    }
    return 20;
}

double unitarity_defect(const Eigen::MatrixXcd &u) {
    if (u.rows() != u.cols()) return INFINITY;
    Eigen::MatrixXcd d = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
    return d.cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Operator

std::shared_ptr<const Operator> Operator::dense(Eigen::MatrixXcd matrix, double tolerance) {
    if (matrix.rows() != matrix.cols() || !is_power_of_two(static_cast<std::size_t>(matrix.rows())) ||
        matrix.rows() < 2) {
        throw ValidationError("operator matrix must be square with power-of-two dimension >= 2");
    }
    double defect = unitarity_defect(matrix);
    if (!(defect <= tolerance)) {
        throw ValidationError("operator matrix is not unitary (defect " + std::to_string(defect) + ")");
    }
    int arity = log2_exact(static_cast<std::size_t>(matrix.rows()));
    return std::shared_ptr<const Operator>(new Operator(arity, Dense{std::move(matrix)}));
}

std::shared_ptr<const Operator> Operator::permutation(int arity, std::vector<std::uint32_t> image) {
    if (arity < 1 || image.size() != (std::size_t{1} << arity)) {
        throw ValidationError("permutation table size must be 2^arity");
    }
    std::vector<std::uint32_t> inverse(image.size(), UINT32_MAX);
    for (std::size_t x = 0; x < image.size(); ++x) {
        if (image[x] >= image.size() || inverse[image[x]] != UINT32_MAX) {
            throw ValidationError("permutation table is not a bijection");
        }
        inverse[image[x]] = static_cast<std::uint32_t>(x);
    }
    return std::shared_ptr<const Operator>(
        new Operator(arity, Permutation{std::move(image), std::move(inverse)}));
}

std::shared_ptr<const Operator> Operator::diagonal(int arity, std::vector<Complex> phases) {
    if (arity < 1 || phases.size() != (std::size_t{1} << arity)) {
        throw ValidationError("diagonal size must be 2^arity");
    }
    for (const auto &p : phases) {
        if (std::abs(std::abs(p) - 1.0) > kExactTolerance) throw ValidationError("diagonal entry is not a phase");
    }
    return std::shared_ptr<const Operator>(new Operator(arity, Diagonal{std::move(phases)}));
}

std::shared_ptr<const Operator> Operator::circuit(int arity, std::vector<CircuitGate> gates) {
    if (arity < 1) throw ValidationError("circuit arity must be positive");
    for (const auto &g : gates) {
        std::set<int> seen(g.wires.begin(), g.wires.end());
        if (seen.size() != g.wires.size() || g.wires.empty() || *seen.begin() < 0 || *seen.rbegin() >= arity) {
            throw ValidationError("circuit gate has invalid wires");
        }
        if (g.matrix.rows() != (Eigen::Index{1} << g.wires.size()) || unitarity_defect(g.matrix) > kExactTolerance) {
            throw ValidationError("circuit gate matrix is not a unitary of matching size");
        }
    }
    return std::shared_ptr<const Operator>(new Operator(arity, Circuit{std::move(gates)}));
}

Eigen::MatrixXcd Operator::to_matrix() const {
    if (const auto *d = std::get_if<Dense>(&body_)) return d->matrix;
    const auto dim = Eigen::Index{1} << arity_;
    // Wire j sits at bit (arity - 1 - j) so vector indices match matrix indices.
    std::vector<int> positions(arity_);
    for (int j = 0; j < arity_; ++j) positions[j] = arity_ - 1 - j;
    Eigen::MatrixXcd out(dim, dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
        v[col] = 1.0;
        kernel_apply(v, arity_, *this, positions, false);
        out.col(col) = v;
    }
    return out;
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
    const auto n = static_cast<std::size_t>(entries_.rows());
    if (entries_.rows() != entries_.cols() || !is_power_of_two(n)) {
        throw ValidationError("density matrix must be square with power-of-two dimension");
    }
    qubit_count_ = log2_exact(n);
    if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > kExactTolerance) {
        throw ValidationError("density matrix is not Hermitian");
    }
    if (std::abs(entries_.trace() - Complex(1.0)) > kExactTolerance) {
        throw ValidationError("density matrix trace is not 1");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(entries_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kExactTolerance) {
        throw ValidationError("density matrix is not positive semidefinite");
    }
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd &state) {
    return DensityMatrix(state * state.adjoint());
}

double DensityMatrix::purity() const { return (entries_ * entries_).trace().real(); }

double fidelity(const DensityMatrix &rho, const DensityMatrix &sigma) {
    if (rho.qubit_count() != sigma.qubit_count()) throw ValidationError("fidelity: dimension mismatch");
    constexpr double kPureThreshold = 1.0 - 1e-10;
    auto pure_overlap = [](const DensityMatrix &p, const DensityMatrix &q) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(p.matrix());
        Eigen::VectorXcd v = es.eigenvectors().col(es.eigenvalues().size() - 1);
        return (v.adjoint() * q.matrix() * v)(0, 0).real();
    };
    double f;
    if (rho.purity() >= kPureThreshold) {
        f = pure_overlap(rho, sigma);
    } else if (sigma.purity() >= kPureThreshold) {
        f = pure_overlap(sigma, rho);
    } else {
        Eigen::MatrixXcd s = hermitian_sqrt(rho.matrix());
        Eigen::MatrixXcd inner = s * sigma.matrix() * s;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (inner + inner.adjoint()), Eigen::EigenvaluesOnly);
        double root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
        f = root * root;
    }
    return std::clamp(f, 0.0, 1.0);
}

double trace_distance(const DensityMatrix &rho, const DensityMatrix &sigma) {
    if (rho.qubit_count() != sigma.qubit_count()) throw ValidationError("trace_distance: dimension mismatch");
    Eigen::MatrixXcd diff = rho.matrix() - sigma.matrix();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
    return std::clamp(0.5 * es.eigenvalues().cwiseAbs().sum(), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// QuantumSystem

QuantumSystem::QuantumSystem(SystemOptions options) : options_(options), amplitudes_(1) {
    amplitudes_[0] = 1.0;
}

std::vector<QubitId> QuantumSystem::reserve_labels(std::size_t count, Party owner) {
    if (count == 0) throw ValidationError("register size must be positive");
    if (qubits_.size() + count > options_.max_qubits) {
        throw ResourceError("qubit cap exceeded: " + std::to_string(qubits_.size() + count) + " > " +
                            std::to_string(options_.max_qubits));
    }
    std::vector<QubitId> labels;
    labels.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        labels.push_back(QubitId{static_cast<std::uint32_t>(qubits_.size())});
        qubits_.push_back(QubitRecord{owner, -1, 0});
    }
    return labels;
}

std::vector<QubitId> QuantumSystem::alloc_register(std::string_view basis_init, Party owner) {
    for (char c : basis_init) {
        if (c != '0' && c != '1') throw ValidationError("basis string must contain only 0 and 1");
    }
    auto labels = reserve_labels(basis_init.size(), owner);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        qubits_[labels[i].value].bit = basis_init[i] == '1' ? 1 : 0;
        if (options_.execution == Execution::kEager) materialize(labels[i]);
    }
    return labels;
}

std::vector<QubitId> QuantumSystem::alloc_register(std::size_t count, Party owner) {
    return alloc_register(std::string(count, '0'), owner);
}

std::vector<QubitId> QuantumSystem::alloc_state(const Eigen::VectorXcd &state, Party owner) {
    const auto dim = static_cast<std::size_t>(state.size());
    if (dim < 2 || !is_power_of_two(dim)) throw ValidationError("state length must be a power of two >= 2");
    if (std::abs(state.squaredNorm() - 1.0) > kExactTolerance) throw ValidationError("state must have unit norm");
    const int t = log2_exact(dim);
    const int m = static_cast<int>(dense_positions_.size());
    if (m + t > kMaxDenseQubits) throw ResourceError("dense register limit exceeded");
    auto labels = reserve_labels(static_cast<std::size_t>(t), owner);
    Eigen::VectorXcd grown(std::size_t{1} << (m + t));
    const std::size_t old_size = static_cast<std::size_t>(amplitudes_.size());
    for (std::size_t s = 0; s < dim; ++s) {
        // Label j of the new block is state bit (t - 1 - j) and dense position m + j.
        std::size_t high = 0;
        for (int j = 0; j < t; ++j) {
            if ((s >> (t - 1 - j)) & 1U) high |= std::size_t{1} << j;
        }
        for (std::size_t i = 0; i < old_size; ++i) grown[(high << m) | i] = amplitudes_[i] * state[s];
    }
    amplitudes_ = std::move(grown);
    for (int j = 0; j < t; ++j) {
        qubits_[labels[j].value].position = m + j;
        dense_positions_.push_back(labels[j].value);
    }
    return labels;
}

void QuantumSystem::check_labels(std::span<const QubitId> labels) const {
    std::set<std::uint32_t> seen;
    for (auto l : labels) {
        if (l.value >= qubits_.size()) throw UsageError("unknown qubit label " + std::to_string(l.value));
        if (!seen.insert(l.value).second) throw UsageError("duplicate qubit label " + std::to_string(l.value));
    }
}

void QuantumSystem::materialize(QubitId label) {
    auto &rec = qubits_[label.value];
    if (rec.position >= 0) return;
    const int m = static_cast<int>(dense_positions_.size());
    if (m + 1 > kMaxDenseQubits) throw ResourceError("dense register limit exceeded");
    const auto half = static_cast<Eigen::Index>(amplitudes_.size());
    amplitudes_.conservativeResize(2 * half);
    if (rec.bit) {
        amplitudes_.tail(half) = amplitudes_.head(half);
        amplitudes_.head(half).setZero();
    } else {
        amplitudes_.tail(half).setZero();
    }
    rec.position = m;
    dense_positions_.push_back(label.value);
}

void QuantumSystem::dematerialize(QubitId label, std::uint8_t bit) {
    auto &rec = qubits_[label.value];
    const int p = rec.position;
    const std::size_t new_size = static_cast<std::size_t>(amplitudes_.size()) / 2;
    const std::size_t low_mask = (std::size_t{1} << p) - 1;
    Eigen::VectorXcd shrunk(new_size);
    for (std::size_t j = 0; j < new_size; ++j) {
        std::size_t old = ((j & ~low_mask) << 1) | (std::size_t{bit} << p) | (j & low_mask);
        shrunk[j] = amplitudes_[old];
    }
    amplitudes_ = std::move(shrunk);
    dense_positions_.erase(dense_positions_.begin() + p);
    for (std::size_t q = static_cast<std::size_t>(p); q < dense_positions_.size(); ++q) {
        qubits_[dense_positions_[q]].position = static_cast<int>(q);
    }
    rec.position = -1;
    rec.bit = bit;
}

std::vector<int> QuantumSystem::positions_of(std::span<const QubitId> labels) {
    for (auto l : labels) materialize(l);
    std::vector<int> positions;
    positions.reserve(labels.size());
    for (auto l : labels) positions.push_back(qubits_[l.value].position);
    return positions;
}

void QuantumSystem::execute(const PendingGate &gate) {
    auto positions = positions_of(gate.labels);
    kernel_apply(amplitudes_, static_cast<int>(dense_positions_.size()), *gate.op, positions, gate.dagger);
}

void QuantumSystem::apply_matrix_at(const Eigen::MatrixXcd &m, const std::vector<int> &positions) {
    kernel_matrix(amplitudes_, static_cast<int>(dense_positions_.size()), positions, m);
}

void QuantumSystem::flush_lightcone(std::span<const QubitId> labels) {
    if (pending_.empty()) return;
    std::set<std::uint32_t> cone;
    for (auto l : labels) cone.insert(l.value);
    std::vector<bool> included(pending_.size(), false);
    for (std::size_t k = pending_.size(); k-- > 0;) {
        const auto &g = pending_[k];
        bool touches = std::any_of(g.labels.begin(), g.labels.end(),
                                   [&](QubitId q) { return cone.count(q.value) != 0; });
        if (touches) {
            included[k] = true;
            for (auto q : g.labels) cone.insert(q.value);
        }
    }
    std::vector<PendingGate> remaining;
    for (std::size_t k = 0; k < pending_.size(); ++k) {
        if (included[k]) {
            execute(pending_[k]);
        } else {
            remaining.push_back(std::move(pending_[k]));
        }
    }
    pending_ = std::move(remaining);
}

void QuantumSystem::apply(const std::shared_ptr<const Operator> &op, std::span<const QubitId> labels,
                          bool dagger) {
    if (!op) throw UsageError("null operator");
    check_labels(labels);
    if (static_cast<int>(labels.size()) != op->arity()) {
        throw UsageError("operator arity " + std::to_string(op->arity()) + " does not match " +
                         std::to_string(labels.size()) + " labels");
    }
    PendingGate gate{op, std::vector<QubitId>(labels.begin(), labels.end()), dagger};
    if (options_.execution == Execution::kEager) {
        execute(gate);
        return;
    }
    // The most recent pending gate sharing a qubit with this one is the only
    // candidate for cancellation: every later gate commutes with both.
    for (std::size_t k = pending_.size(); k-- > 0;) {
        const auto &prev = pending_[k];
        bool overlaps = std::any_of(prev.labels.begin(), prev.labels.end(), [&](QubitId q) {
            return std::find(labels.begin(), labels.end(), q) != labels.end();
        });
        if (!overlaps) continue;
        if (prev.op == op && prev.dagger != dagger && prev.labels == gate.labels) {
            pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(k));
            return;
        }
        break;
    }
    pending_.push_back(std::move(gate));
}

void QuantumSystem::apply_unitary(std::span<const QubitId> labels, const Eigen::MatrixXcd &u, bool dagger) {
    apply(Operator::dense(u), labels, dagger);
}

std::vector<double> QuantumSystem::outcome_probabilities(std::span<const QubitId> labels) {
    check_labels(labels);
    flush_lightcone(labels);
    auto positions = positions_of(labels);
    const auto map = index_map(positions, static_cast<int>(dense_positions_.size()));
    std::vector<double> probs(map.offsets.size(), 0.0);
    for (auto base : map.bases) {
        for (std::size_t r = 0; r < probs.size(); ++r) probs[r] += std::norm(amplitudes_[base + map.offsets[r]]);
    }
    return probs;
}

std::string QuantumSystem::measure(std::span<const QubitId> labels, Rng &rng) {
    check_labels(labels);
    flush_lightcone(labels);
    std::vector<QubitId> dense;
    for (auto l : labels) {
        if (qubits_[l.value].position >= 0) dense.push_back(l);
    }
    if (!dense.empty()) {
        std::vector<int> positions;
        for (auto l : dense) positions.push_back(qubits_[l.value].position);
        const auto map = index_map(positions, static_cast<int>(dense_positions_.size()));
        std::vector<double> probs(map.offsets.size(), 0.0);
        for (auto base : map.bases) {
            for (std::size_t r = 0; r < probs.size(); ++r) probs[r] += std::norm(amplitudes_[base + map.offsets[r]]);
        }
        double total = 0;
        for (double p : probs) total += p;
        double u = uniform01(rng) * total;
        std::size_t chosen = probs.size();
        double acc = 0;
        for (std::size_t r = 0; r < probs.size(); ++r) {
            if (probs[r] <= 0) continue;
            chosen = r;
            acc += probs[r];
            if (u < acc) break;
        }
        const double scale = 1.0 / std::sqrt(probs[chosen]);
        for (auto base : map.bases) {
            for (std::size_t r = 0; r < probs.size(); ++r) {
                auto &a = amplitudes_[base + map.offsets[r]];
                a = r == chosen ? a * scale : Complex(0.0);
            }
        }
        for (std::size_t j = 0; j < dense.size(); ++j) {
            dematerialize(dense[j], static_cast<std::uint8_t>((chosen >> (dense.size() - 1 - j)) & 1U));
        }
    }
    std::string outcome;
    outcome.reserve(labels.size());
    for (auto l : labels) outcome.push_back(qubits_[l.value].bit ? '1' : '0');
    return outcome;
}

bool QuantumSystem::measure_povm_accept(std::span<const QubitId> labels, const Eigen::MatrixXcd &reject_effect,
                                        Rng &rng) {
    check_labels(labels);
    const auto dim = Eigen::Index{1} << labels.size();
    if (reject_effect.rows() != dim || reject_effect.cols() != dim) {
        throw ValidationError("POVM effect dimension does not match the measured qubits");
    }
    if ((reject_effect - reject_effect.adjoint()).cwiseAbs().maxCoeff() > kExactTolerance) {
        throw ValidationError("POVM effect is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(reject_effect);
    if (es.eigenvalues().minCoeff() < -kExactTolerance || es.eigenvalues().maxCoeff() > 1.0 + kExactTolerance) {
        throw ValidationError("POVM effect eigenvalues must lie in [0, 1]");
    }
    flush_lightcone(labels);
    auto positions = positions_of(labels);
    const auto map = index_map(positions, static_cast<int>(dense_positions_.size()));
    const auto rest = static_cast<Eigen::Index>(map.bases.size());
    Eigen::MatrixXcd block(dim, rest);
    for (Eigen::Index c = 0; c < rest; ++c) {
        for (Eigen::Index r = 0; r < dim; ++r) block(r, c) = amplitudes_[map.bases[c] + map.offsets[r]];
    }
    const double p_reject = std::clamp((reject_effect * block).cwiseProduct(block.conjugate()).sum().real(), 0.0, 1.0);
    const bool accept = !(uniform01(rng) < p_reject);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
    if (accept) ev = (Eigen::VectorXd::Ones(dim) - ev).eval();
    Eigen::MatrixXcd root = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
    apply_matrix_at(root, positions);
    amplitudes_ /= std::sqrt(amplitudes_.squaredNorm());
    return accept;
}

DensityMatrix QuantumSystem::reduced_density(std::span<const QubitId> labels) {
    check_labels(labels);
    if (labels.empty()) throw UsageError("reduced_density needs at least one qubit");
    flush_lightcone(labels);
    auto positions = positions_of(labels);
    const auto map = index_map(positions, static_cast<int>(dense_positions_.size()));
    const auto dim = static_cast<Eigen::Index>(map.offsets.size());
    const auto rest = static_cast<Eigen::Index>(map.bases.size());
    Eigen::MatrixXcd block(dim, rest);
    for (Eigen::Index c = 0; c < rest; ++c) {
        for (Eigen::Index r = 0; r < dim; ++r) block(r, c) = amplitudes_[map.bases[c] + map.offsets[r]];
    }
    Eigen::MatrixXcd rho = block * block.adjoint();
    rho = (0.5 * (rho + rho.adjoint())).eval();
    return DensityMatrix(std::move(rho));
}

void QuantumSystem::transfer(std::span<const QubitId> labels, Party from, Party to) {
    check_labels(labels);
    for (auto l : labels) {
        if (qubits_[l.value].owner != from) {
            throw ProtocolViolation(std::string(party_name(from)) + " does not hold qubit " + std::to_string(l.value));
        }
    }
    for (auto l : labels) qubits_[l.value].owner = to;
}

Party QuantumSystem::owner(QubitId label) const {
    if (label.value >= qubits_.size()) throw UsageError("unknown qubit label " + std::to_string(label.value));
    return qubits_[label.value].owner;
}

std::vector<QubitId> QuantumSystem::owned_by(Party party) const {
    std::vector<QubitId> out;
    for (std::uint32_t i = 0; i < qubits_.size(); ++i) {
        if (qubits_[i].owner == party) out.push_back(QubitId{i});
    }
    return out;
}

Eigen::VectorXcd QuantumSystem::state_vector() {
    for (const auto &g : pending_) execute(g);
    pending_.clear();
    const int n = static_cast<int>(qubits_.size());
    if (n == 0) return amplitudes_;
    for (std::uint32_t i = 0; i < qubits_.size(); ++i) materialize(QubitId{i});
    Eigen::VectorXcd out(amplitudes_.size());
    for (std::size_t i = 0; i < static_cast<std::size_t>(amplitudes_.size()); ++i) {
        std::size_t canonical = 0;
        for (int p = 0; p < n; ++p) {
            if ((i >> p) & 1U) canonical |= std::size_t{1} << (n - 1 - static_cast<int>(dense_positions_[p]));
        }
        out[canonical] = amplitudes_[i];
    }
    return out;
}

double QuantumSystem::norm_squared() const { return amplitudes_.squaredNorm(); }

Eigen::VectorXcd random_state(std::size_t dim, Rng &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXcd v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = Complex(normal(rng), normal(rng));
    return v / v.norm();
}

}  // namespace qmt
