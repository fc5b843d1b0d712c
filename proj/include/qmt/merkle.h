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

#ifndef QMT_MERKLE_H
#define QMT_MERKLE_H

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "qmt/oracle.h"
#include "qmt/qstate.h"

namespace qmt {

/// Tree node, numbered 1 (root) .. 2*leaf_count - 1 in heap order.
using Node = std::uint32_t;
using NodeSet = std::set<Node>;

/// Geometry of the perfect binary tree plus the register held at each node.
///
/// Node u is internal iff u < leaf_count; its children are 2u and 2u+1.
/// Block j (1-indexed) of the payload lives at leaf leaf_count + j - 1.
class MerkleLayout {
   public:
    MerkleLayout(int block_size, int leaf_count);

    int block_size() const { return block_size_; }
    int leaf_count() const { return leaf_count_; }
    int depth() const { return depth_; }
    int payload_qubits() const { return block_size_ * leaf_count_; }
    Node node_count() const { return static_cast<Node>(2 * leaf_count_ - 1); }

    bool is_leaf(Node u) const { return u >= static_cast<Node>(leaf_count_); }
    bool contains(Node u) const { return u >= 1 && u <= node_count(); }

    /// Throws ValidationError if labels are not block_size long or overlap
    /// another node's register.
    void set_register(Node u, std::vector<QubitId> labels);
    void erase_register(Node u) { registers_.erase(u); }
    bool has_register(Node u) const { return registers_.count(u) != 0; }
    const std::vector<QubitId> &register_of(Node u) const;
    const std::map<Node, std::vector<QubitId>> &registers() const { return registers_; }

    /// Concatenated labels of the given nodes in increasing node order.
    std::vector<QubitId> labels_of(const NodeSet &nodes) const;

   private:
    int block_size_;
    int leaf_count_;
    int depth_;
    std::map<Node, std::vector<QubitId>> registers_;
};

/// P_u: u and all its ancestors.
NodeSet ancestors(Node u, int leaf_count);

/// R_S: nodes on a root path of some u in S, plus the children of those nodes.
NodeSet frontier(const NodeSet &nodes, int leaf_count);

/// Internal nodes of the union of root paths of S; the nodes decommit checks.
NodeSet internal_ancestors(const NodeSet &nodes, int leaf_count);

/// W: leaves holding the given 1-indexed payload qubits.
NodeSet leaves_for_qubits(const std::set<int> &qubits, int block_size, int leaf_count);

/// Leaf register and offset holding 1-indexed payload qubit `qubit`.
std::pair<Node, int> locate_qubit(int qubit, int block_size, int leaf_count);

/// Runs the commitment: the payload fills the leaves block by block, then for
/// u = leaf_count-1 down to 1 a fresh |0^b> register is allocated and the
/// oracle is queried on (node 2u, node 2u+1, node u). Exactly leaf_count-1
/// forward queries. New registers belong to the owner of the payload.
MerkleLayout commit(QuantumSystem &system, Oracle &oracle, std::span<const QubitId> payload, int block_size);

struct DecommitResult {
    bool passed = false;
    /// Set when a check failed: the node whose register read non-zero.
    std::optional<Node> failed_node;
    std::string outcome;
    /// Registers of S on success.
    std::map<Node, std::vector<QubitId>> revealed;
    std::uint64_t inverse_queries = 0;

    explicit operator bool() const { return passed; }
};

/// Local decommitment of the nodes in S from the registers in `received`.
///
/// Visits internal ancestors of S root first: inverse query on
/// (2u, 2u+1, u), then measures node u and fails on a non-zero outcome.
/// Throws ProtocolViolation if a register of R_S is missing.
DecommitResult decommit(QuantumSystem &system, Oracle &oracle, const MerkleLayout &received, const NodeSet &nodes,
                        Rng &rng);

}  // namespace qmt

#endif  // QMT_MERKLE_H
