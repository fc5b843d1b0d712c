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

#ifndef QMT_QSTATE_H
#define QMT_QSTATE_H

#include <Eigen/Dense>
#include <complex>
#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qmt/random.h"

namespace qmt {

using Complex = std::complex<double>;

/// Tolerance for identities that hold exactly in exact arithmetic.
inline constexpr double kExactTolerance = 1e-9;

/// Opaque handle to one qubit of a QuantumSystem.
struct QubitId {
    std::uint32_t value = 0;
    auto operator<=>(const QubitId &) const = default;
};

enum class Party : std::uint8_t { kProver, kVerifier, kNobody };

const char *party_name(Party p);

/// Default qubit cap: QMT_MAX_QUBITS from the environment if set, else 20.
std::size_t default_qubit_cap();

/// Immutable unitary on `arity` qubits. The first qubit of the target list is
/// the most significant bit of the matrix index.
///
/// Operators are shared by pointer; two applications of the same operator
/// object with opposite dagger flags on the same ordered labels are treated
/// as an exact inverse pair by the deferred executor.
class Operator {
   public:
    struct Dense {
        Eigen::MatrixXcd matrix;
    };
    /// Basis permutation: |x> -> |image[x]>.
    struct Permutation {
        std::vector<std::uint32_t> image;
        std::vector<std::uint32_t> inverse;
    };
    /// Diagonal phases: |x> -> phases[x] |x>.
    struct Diagonal {
        std::vector<Complex> phases;
    };
    /// A gate list; each gate acts on a subset of the operator's wires.
    struct CircuitGate {
        std::vector<int> wires;
        Eigen::MatrixXcd matrix;
    };
    struct Circuit {
        std::vector<CircuitGate> gates;
    };

    static std::shared_ptr<const Operator> dense(Eigen::MatrixXcd matrix,
                                                 double tolerance = kExactTolerance);
    static std::shared_ptr<const Operator> permutation(int arity, std::vector<std::uint32_t> image);
    static std::shared_ptr<const Operator> diagonal(int arity, std::vector<Complex> phases);
    static std::shared_ptr<const Operator> circuit(int arity, std::vector<CircuitGate> gates);

    int arity() const { return arity_; }
    const auto &body() const { return body_; }

    /// Expands to a 2^arity square matrix.
    Eigen::MatrixXcd to_matrix() const;

   private:
    using Body = std::variant<Dense, Permutation, Diagonal, Circuit>;
    Operator(int arity, Body body) : arity_(arity), body_(std::move(body)) {}

    int arity_;
    Body body_;
};

/// Max-entry deviation of U^dagger U from the identity.
double unitarity_defect(const Eigen::MatrixXcd &u);

/// Reduced state of a set of qubits.
class DensityMatrix {
   public:
    /// Validates Hermiticity, unit trace and positivity within kExactTolerance.
    explicit DensityMatrix(Eigen::MatrixXcd entries);

    static DensityMatrix pure(const Eigen::VectorXcd &state);

    int qubit_count() const { return qubit_count_; }
    const Eigen::MatrixXcd &matrix() const { return entries_; }
    double purity() const;

   private:
    Eigen::MatrixXcd entries_;
    int qubit_count_;
};

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clamped to [0, 1].
double fidelity(const DensityMatrix &rho, const DensityMatrix &sigma);

/// Half the trace norm of rho - sigma, clamped to [0, 1].
double trace_distance(const DensityMatrix &rho, const DensityMatrix &sigma);

enum class Execution {
    /// Every gate is applied to the amplitudes as soon as it is requested.
    kEager,
    /// Gates are queued; adjacent exact inverse pairs cancel and a gate is
    /// only applied once a measurement or reduced state depends on it.
    kDeferred,
};

struct SystemOptions {
    std::size_t max_qubits = default_qubit_cap();
    Execution execution = Execution::kDeferred;
};

/// The joint pure state of every register held by every party.
///
/// Qubits are never removed: measured qubits stay live in their collapsed
/// basis state. Labels are allocated in increasing order; `state_vector`
/// lists amplitudes with the first allocated qubit as the most significant
/// bit.
///
/// Internally only qubits that have been touched by an applied operator are
/// stored densely; the rest are tracked as classical basis values.
class QuantumSystem {
   public:
    explicit QuantumSystem(SystemOptions options = {});

    std::size_t qubit_count() const { return qubits_.size(); }
    std::size_t max_qubits() const { return options_.max_qubits; }
    Execution execution() const { return options_.execution; }

    /// Allocates `basis_init.size()` qubits in the given basis state.
    std::vector<QubitId> alloc_register(std::string_view basis_init, Party owner);
    std::vector<QubitId> alloc_register(std::size_t count, Party owner);
    /// Allocates log2(state.size()) qubits holding `state` (unit norm).
    std::vector<QubitId> alloc_state(const Eigen::VectorXcd &state, Party owner);

    void apply(const std::shared_ptr<const Operator> &op, std::span<const QubitId> labels,
               bool dagger = false);
    /// Validates that `u` is unitary within kExactTolerance before applying.
    void apply_unitary(std::span<const QubitId> labels, const Eigen::MatrixXcd &u,
                       bool dagger = false);

    /// Computational-basis measurement; returns '0'/'1' per label in order.
    std::string measure(std::span<const QubitId> labels, Rng &rng);

    /// Two-outcome POVM {E, I - E}: rejects with probability Tr(E rho).
    /// The post-measurement state is sqrt(F) rho sqrt(F) / Tr(F rho) for the
    /// observed effect F. Returns true on the accept (I - E) outcome.
    bool measure_povm_accept(std::span<const QubitId> labels, const Eigen::MatrixXcd &reject_effect,
                             Rng &rng);

    /// Born probability of each computational outcome on `labels`, without collapse.
    std::vector<double> outcome_probabilities(std::span<const QubitId> labels);

    DensityMatrix reduced_density(std::span<const QubitId> labels);

    /// Moves `labels` from `from` to `to`; throws ProtocolViolation if `from`
    /// does not hold every one of them.
    void transfer(std::span<const QubitId> labels, Party from, Party to);
    Party owner(QubitId label) const;
    std::vector<QubitId> owned_by(Party party) const;

    /// Full amplitude vector. Flushes all pending gates.
    Eigen::VectorXcd state_vector();

    /// Throws UsageError on unknown or duplicate labels.
    void check_labels(std::span<const QubitId> labels) const;

    double norm_squared() const;
    std::size_t dense_qubit_count() const { return dense_positions_.size(); }
    std::size_t pending_gate_count() const { return pending_.size(); }

   private:
    struct QubitRecord {
        Party owner = Party::kNobody;
        int position = -1;  // bit position in amplitudes_, or -1 if classical
        std::uint8_t bit = 0;
    };
    struct PendingGate {
        std::shared_ptr<const Operator> op;
        std::vector<QubitId> labels;
        bool dagger;
    };

    std::vector<QubitId> reserve_labels(std::size_t count, Party owner);
    void materialize(QubitId label);
    void dematerialize(QubitId label, std::uint8_t bit);
    std::vector<int> positions_of(std::span<const QubitId> labels);
    void flush_lightcone(std::span<const QubitId> labels);
    void execute(const PendingGate &gate);
    void apply_matrix_at(const Eigen::MatrixXcd &m, const std::vector<int> &positions);

    SystemOptions options_;
    std::vector<QubitRecord> qubits_;
    std::vector<std::uint32_t> dense_positions_;  // position -> label value
    Eigen::VectorXcd amplitudes_;
    std::vector<PendingGate> pending_;
};

/// Random pure state drawn from the unitarily invariant measure.
Eigen::VectorXcd random_state(std::size_t dim, Rng &rng);

}  // namespace qmt

#endif  // QMT_QSTATE_H
