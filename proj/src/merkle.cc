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

#include "qmt/merkle.h"

#include <bit>

#include "qmt/error.h"

namespace qmt {

namespace {

void require_leaf_count(int leaf_count) {
    if (leaf_count < 2 || !std::has_single_bit(static_cast<unsigned>(leaf_count))) {
        throw ValidationError("leaf count must be a power of two >= 2");
    }
}

void require_node(Node u, int leaf_count) {
    if (u < 1 || u > static_cast<Node>(2 * leaf_count - 1)) {
        throw ValidationError("node " + std::to_string(u) + " outside the tree");
    }
}

// Oracle operand order: left child, right child, then the node itself.
std::vector<QubitId> oracle_operands(const MerkleLayout &layout, Node u) {
    std::vector<QubitId> out;
    for (Node v : {2 * u, 2 * u + 1, u}) {
        const auto &r = layout.register_of(v);
        out.insert(out.end(), r.begin(), r.end());
    }
    return out;
}

}  // namespace

MerkleLayout::MerkleLayout(int block_size, int leaf_count) : block_size_(block_size), leaf_count_(leaf_count) {
    if (block_size < 1) throw ValidationError("block size must be positive");
    require_leaf_count(leaf_count);
    depth_ = std::countr_zero(static_cast<unsigned>(leaf_count));
}

void MerkleLayout::set_register(Node u, std::vector<QubitId> labels) {
    require_node(u, leaf_count_);
    if (static_cast<int>(labels.size()) != block_size_) {
        throw ValidationError("node register must hold exactly b qubits");
    }
    for (const auto &[v, other] : registers_) {
        if (v == u) continue;
        for (auto q : labels) {
            for (auto o : other) {
                if (q == o) throw ValidationError("node registers must be disjoint");
            }
        }
    }
    registers_[u] = std::move(labels);
}

const std::vector<QubitId> &MerkleLayout::register_of(Node u) const {
    auto it = registers_.find(u);
    if (it == registers_.end()) throw ProtocolViolation("no register for node " + std::to_string(u));
    return it->second;
}

std::vector<QubitId> MerkleLayout::labels_of(const NodeSet &nodes) const {
    std::vector<QubitId> out;
    for (Node u : nodes) {
        const auto &r = register_of(u);
        out.insert(out.end(), r.begin(), r.end());
    }
    return out;
}

NodeSet ancestors(Node u, int leaf_count) {
    require_leaf_count(leaf_count);
    require_node(u, leaf_count);
    NodeSet path;
    for (; u >= 1; u /= 2) path.insert(u);
    return path;
}

NodeSet frontier(const NodeSet &nodes, int leaf_count) {
    if (nodes.empty()) throw ValidationError("frontier of an empty node set");
    NodeSet paths;
    for (Node u : nodes) paths.merge(ancestors(u, leaf_count));
    NodeSet out;
    const Node count = static_cast<Node>(2 * leaf_count - 1);
    for (Node v = 1; v <= count; ++v) {
        if (paths.count(v) || (v > 1 && paths.count(v / 2))) out.insert(v);
    }
    return out;
}

NodeSet internal_ancestors(const NodeSet &nodes, int leaf_count) {
    NodeSet out;
    for (Node u : nodes) {
        for (Node a : ancestors(u, leaf_count)) {
            if (a < static_cast<Node>(leaf_count)) out.insert(a);
        }
    }
    return out;
}

std::pair<Node, int> locate_qubit(int qubit, int block_size, int leaf_count) {
    if (qubit < 1 || qubit > block_size * leaf_count) {
        throw ValidationError("qubit index " + std::to_string(qubit) + " outside [1, N]");
    }
    return {static_cast<Node>(leaf_count + (qubit - 1) / block_size), (qubit - 1) % block_size};
}

NodeSet leaves_for_qubits(const std::set<int> &qubits, int block_size, int leaf_count) {
    NodeSet out;
    for (int q : qubits) out.insert(locate_qubit(q, block_size, leaf_count).first);
    return out;
}

MerkleLayout commit(QuantumSystem &system, Oracle &oracle, std::span<const QubitId> payload, int block_size) {
    if (block_size != oracle.block_size()) throw ValidationError("oracle arity must be 3b");
    if (payload.empty() || payload.size() % static_cast<std::size_t>(block_size) != 0) {
        throw ValidationError("payload must be a whole number of blocks");
    }
    const int leaves = static_cast<int>(payload.size()) / block_size;
    if (leaves < 2 || !std::has_single_bit(static_cast<unsigned>(leaves))) {
        throw ValidationError("payload must be padded to b * 2^d qubits with d >= 1");
    }
    system.check_labels(payload);
    MerkleLayout layout(block_size, leaves);
    const Party owner = system.owner(payload.front());
    for (int j = 0; j < leaves; ++j) {
        auto first = payload.begin() + static_cast<std::ptrdiff_t>(j) * block_size;
        layout.set_register(static_cast<Node>(leaves + j), std::vector<QubitId>(first, first + block_size));
    }
    for (Node u = static_cast<Node>(leaves - 1); u >= 1; --u) {
        layout.set_register(u, system.alloc_register(static_cast<std::size_t>(block_size), owner));
        oracle.query(system, oracle_operands(layout, u), QueryDirection::kForward);
    }
    return layout;
}

DecommitResult decommit(QuantumSystem &system, Oracle &oracle, const MerkleLayout &received, const NodeSet &nodes,
                        Rng &rng) {
    if (received.block_size() != oracle.block_size()) throw ValidationError("oracle arity must be 3b");
    const int leaves = received.leaf_count();
    const NodeSet needed = frontier(nodes, leaves);
    for (Node u : needed) {
        if (!received.has_register(u)) throw ProtocolViolation("missing register for node " + std::to_string(u));
    }
    DecommitResult result;
    const std::string zeros(static_cast<std::size_t>(received.block_size()), '0');
    // Internal ancestors only: a sibling's children are never received, so
    // the inverse query at a sibling would be undefined.
    for (Node u : internal_ancestors(nodes, leaves)) {
        const auto before = oracle.counts().inverse;
        oracle.query(system, oracle_operands(received, u), QueryDirection::kInverse);
        result.inverse_queries += oracle.counts().inverse - before;
        auto outcome = system.measure(received.register_of(u), rng);
        if (outcome != zeros) {
            result.failed_node = u;
            result.outcome = std::move(outcome);
            return result;
        }
    }
    result.passed = true;
    for (Node u : nodes) result.revealed[u] = received.register_of(u);
    return result;
}

}  // namespace qmt
