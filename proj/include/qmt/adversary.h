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

#ifndef QMT_ADVERSARY_H
#define QMT_ADVERSARY_H

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "qmt/oracle.h"
#include "qmt/qstate.h"
#include "qmt/random.h"

namespace qmt {

/// Boolean function on 2b-bit strings; applied as |z> -> (-1)^f(z) |z>.
class PhaseFunction {
   public:
    PhaseFunction(int block_size, std::vector<std::uint8_t> table);

    static PhaseFunction parity(int block_size);
    static PhaseFunction zero(int block_size);
    static PhaseFunction random(int block_size, Rng &rng);

    int block_size() const { return block_size_; }
    const std::vector<std::uint8_t> &table() const { return table_; }
    std::shared_ptr<const Operator> as_operator() const;

   private:
    int block_size_;
    std::vector<std::uint8_t> table_;
};

/// Product state |+>^{2b}.
Eigen::VectorXcd plus_state(int qubits);

struct PhaseAttackResult {
    bool verifier_accepts = false;
    /// Between the revealed 2b-qubit state and the committed one; only on acceptance.
    std::optional<double> trace_distance;
};

/// Depth-one scheme: commit psi, send the root, apply the phase to the
/// retained data, send the data; the verifier undoes the oracle and checks
/// the root for 0^b.
PhaseAttackResult phase_attack_round(Oracle &oracle, const Eigen::VectorXcd &psi, const PhaseFunction &f, Rng &rng);

struct SwitchResult {
    Eigen::MatrixXcd w;  // on the first 2b qubits
    double predicted_overlap = 0;  // nuclear norm of M
    double achieved_fidelity = 0;  // |<B|(W x I)|A>|^2 by statevector
    /// ||(I x <0^b|) G^dagger (W x I) G |psi 0>||^2; needs G itself.
    std::optional<double> check_pass_probability;
};

/// W = V U^* from the SVD of M = A_mat B_mat^dagger, where A_mat and B_mat
/// reshape the 3b-qubit images |A> and |B> with rows on the first 2b qubits.
SwitchResult hjw_switch_from_images(const Eigen::VectorXcd &image_a, const Eigen::VectorXcd &image_b, int block_size);

/// Switch for a dense oracle matrix G on 3b qubits.
SwitchResult hjw_switch_operator(const Eigen::MatrixXcd &g, const Eigen::VectorXcd &psi, const Eigen::VectorXcd &phi,
                                 int block_size);

/// Images G(psi x 0^b) and G(phi x 0^b) for G Haar-distributed, drawn
/// directly as a Haar isometry on their span without forming G.
std::pair<Eigen::VectorXcd, Eigen::VectorXcd> haar_frame_images(const Eigen::VectorXcd &psi,
                                                                const Eigen::VectorXcd &phi, int block_size,
                                                                Rng &rng);

struct HjwAttackResult {
    bool check_pass = false;
    /// Fidelity of the surviving 2b-qubit state with phi; only when the check passes.
    std::optional<double> conditional_fidelity;
};

/// Depth-one scheme with the switch W applied to the retained data.
HjwAttackResult hjw_attack_round(Oracle &oracle, const Eigen::MatrixXcd &w, const Eigen::VectorXcd &psi,
                                 const Eigen::VectorXcd &phi, Rng &rng);

}  // namespace qmt

#endif  // QMT_ADVERSARY_H
