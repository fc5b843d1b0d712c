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

#ifndef QMT_ORACLE_H
#define QMT_ORACLE_H

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qmt/qstate.h"
#include "qmt/random.h"

namespace qmt {

/// Largest arity for which a dense 2^arity x 2^arity oracle is built.
inline constexpr int kMaxDenseOracleQubits = 12;
/// Largest block size for the explicit hash table of the XOR oracle.
inline constexpr int kMaxHashBlock = 6;

enum class OracleKind { kHaar, kRandomCircuit, kXorHash, kIdentity };

/// Backend choice. CLI names: `haar`, `circuit:<depth>`, `oh`, `identity`.
struct OracleSpec {
    OracleKind kind = OracleKind::kHaar;
    int depth = 0;  // random-circuit layers

    static OracleSpec parse(std::string_view text);
    std::string name() const;
};

enum class QueryDirection { kForward, kInverse };

struct QueryCounts {
    std::uint64_t forward = 0;
    std::uint64_t inverse = 0;
    std::uint64_t total() const { return forward + inverse; }
};

/// Haar-random unitary via Ginibre QR with the diagonal phase correction.
Eigen::MatrixXcd sample_haar_unitary(std::size_t dim, Rng &rng);

/// First `cols` columns of a Haar-random unitary of dimension `rows`.
Eigen::MatrixXcd sample_haar_isometry(std::size_t rows, std::size_t cols, Rng &rng);

/// The oracle G on 3b qubits and its inverse, with per-direction counters.
class Oracle {
   public:
    /// Same (spec, block_size, seed) always yields the same oracle.
    static Oracle build(const OracleSpec &spec, int block_size, std::uint64_t seed);
    /// Wraps an explicit unitary on 3b qubits (kind kHaar, seed 0).
    static Oracle from_unitary(const Eigen::MatrixXcd &u, int block_size);

    const OracleSpec &spec() const { return spec_; }
    int block_size() const { return block_size_; }
    int arity() const { return 3 * block_size_; }
    std::uint64_t seed() const { return seed_; }

    /// Applies G (forward) or G^dagger (inverse) to exactly 3b labels.
    void query(QuantumSystem &system, std::span<const QubitId> labels, QueryDirection direction);

    QueryCounts counts() const { return counts_; }

    /// Dense matrix of G; throws ResourceError above kMaxDenseOracleQubits.
    Eigen::MatrixXcd dense_matrix() const;

    /// h as a table indexed by the 2b-bit input; only for kXorHash.
    const std::vector<std::uint32_t> &hash_table() const { return hash_; }

    /// Underlying operator; null for the identity backend.
    const std::shared_ptr<const Operator> &op() const { return op_; }

   private:
    OracleSpec spec_;
    int block_size_ = 0;
    std::uint64_t seed_ = 0;
    std::shared_ptr<const Operator> op_;
    std::vector<std::uint32_t> hash_;
    QueryCounts counts_;
};

struct HaarStatistics {
    std::string kind;
    int qubits = 0;
    int samples = 0;
    double mean_abs2_u00 = 0;
    double stderr_abs2_u00 = 0;
    double mean_abs4_u00 = 0;
    double stderr_abs4_u00 = 0;
    double max_unitarity_defect = 0;
    /// E|Tr(U^dagger V)|^4 over disjoint sample pairs; the Haar value is 2.
    double frame_potential_t2 = 0;
    double stderr_frame_potential_t2 = 0;
    double haar_abs2_u00 = 0;  // 1 / D
    double haar_abs4_u00 = 0;  // 2 / (D (D + 1))
};

/// Monte Carlo moments of oracles of the given kind on `qubits` qubits.
HaarStatistics haar_statistics(const OracleSpec &spec, int qubits, int samples, std::uint64_t seed);

/// Dense unitary of the backend on an arbitrary number of qubits; used by
/// haar_statistics where the qubit count need not be a multiple of three.
Eigen::MatrixXcd sample_backend_unitary(const OracleSpec &spec, int qubits, Rng &rng);

}  // namespace qmt

#endif  // QMT_ORACLE_H
