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

#ifndef QMT_HAMILTONIAN_H
#define QMT_HAMILTONIAN_H

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qmt/qstate.h"
#include "qmt/random.h"

namespace qmt {

/// Largest payload size for dense assembly and diagonalization.
inline constexpr int kMaxDenseHamiltonianQubits = 12;

enum class InstanceLabel { kYes, kNo, kUnknown };
enum class Classification { kYes, kNo, kOutsidePromise };

const char *label_name(InstanceLabel label);
const char *classification_name(Classification c);

enum class CliffordTGate { kH, kS, kT, kX, kCnot };

struct CircuitStep {
    CliffordTGate gate;
    std::vector<int> wires;
};

/// Local verifier circuit. Wires 0..k-1 are the term's qubits in order,
/// wires k..k+ancillas-1 are ancillas starting in |0>; wire k is the output.
struct VerifierCircuit {
    int ancillas = 1;
    std::vector<CircuitStep> steps;
};

struct LocalTerm {
    std::vector<int> qubits;  // 1-indexed; the first is the matrix MSB
    Eigen::MatrixXcd matrix;  // 0 <= H_i <= I
    std::optional<VerifierCircuit> circuit;
};

struct LocalHamiltonian {
    int num_qubits = 0;
    double alpha = 0;
    double beta = 0;
    int locality = 0;
    std::vector<LocalTerm> terms;
    InstanceLabel label = InstanceLabel::kUnknown;

    int term_count() const { return static_cast<int>(terms.size()); }

    /// Throws ValidationError naming the offending term.
    void validate() const;
};

/// Parses and validates an instance document (JSON).
LocalHamiltonian parse_instance(std::string_view document);
LocalHamiltonian load_instance(const std::filesystem::path &path);
std::string dump_instance(const LocalHamiltonian &instance);

/// Dense sum of all terms embedded on their qubits.
Eigen::MatrixXcd assemble(const LocalHamiltonian &instance);

struct GroundState {
    double energy = 0;
    Eigen::VectorXcd state;
    double power_iteration_energy = 0;
    int power_iterations = 0;
    double residual = 0;  // ||H v - energy v||
};

/// Smallest eigenvalue of a Hermitian positive semidefinite matrix by inverse
/// iteration on (H - shift I), reported as a Rayleigh quotient.
double inverse_power_ground_energy(const Eigen::MatrixXcd &hamiltonian, double shift = -0.05,
                                   int max_iterations = 200000, int *iterations = nullptr);

/// Exact ground energy and state; the dense eigensolver is cross-checked
/// against inverse iteration and a NumericalError is raised if they disagree
/// by more than 1e-8.
GroundState ground_energy(const LocalHamiltonian &instance);

Classification classify(const LocalHamiltonian &instance, double lambda_min);
Classification classify(const LocalHamiltonian &instance);

struct VerifierTerm {
    int index = 0;  // 1-indexed
    std::vector<int> qubits;
    Eigen::MatrixXcd reject_effect;  // H_i
    Eigen::MatrixXcd accept_effect;  // I - H_i
    const VerifierCircuit *circuit = nullptr;
};

VerifierTerm verifier_term(const LocalHamiltonian &instance, int index);
/// Uniform term index.
VerifierTerm sample_term(const LocalHamiltonian &instance, Rng &rng);

/// 1 - Tr(H_i rho) for rho on the qubits of term i.
double accept_probability(const LocalHamiltonian &instance, int index, const DensityMatrix &rho);

/// Mean over terms of accept_probability on the reduced states of `state`.
double expected_acceptance(const LocalHamiltonian &instance, const Eigen::VectorXcd &state);

/// Allocates the ancillas, runs the circuit and measures the output ancilla.
bool apply_verifier_circuit(QuantumSystem &system, const VerifierCircuit &circuit,
                            std::span<const QubitId> term_labels, Rng &rng);

// Instance library.
LocalHamiltonian pinning_instance(int qubits);
LocalHamiltonian frustrated_instance(int qubits, double alpha = 0.1, double beta = 0.5);
/// Nine identity terms plus one |1><1| term on four qubits: lambda_min/m = 0.9.
LocalHamiltonian calibrated_no_instance();
/// Rank-one projectors onto Haar-random two-qubit states on random qubit pairs.
LocalHamiltonian random_two_local_instance(int qubits, int terms, std::uint64_t seed);

}  // namespace qmt

#endif  // QMT_HAMILTONIAN_H
