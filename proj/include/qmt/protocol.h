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

#ifndef QMT_PROTOCOL_H
#define QMT_PROTOCOL_H

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qmt/hamiltonian.h"
#include "qmt/merkle.h"
#include "qmt/oracle.h"
#include "qmt/qstate.h"
#include "qmt/random.h"

namespace qmt {

enum class VerifierMode { kPovm, kCircuit };

const char *verifier_mode_name(VerifierMode mode);

struct RoundConfig {
    int block_size = 2;
    /// 0 selects the smallest power of two (at least 2) that holds the instance.
    int leaf_count = 0;
    VerifierMode verifier = VerifierMode::kPovm;
    SystemOptions system;
};

int resolve_leaf_count(const LocalHamiltonian &instance, int block_size, int leaf_count);

struct RoundSeeds {
    std::uint64_t oracle = 0;
    std::uint64_t verifier = 0;
    std::uint64_t strategy = 0;

    static RoundSeeds derive(std::uint64_t master, std::uint64_t index);
};

/// Mutable view handed to adversary hooks. `layout` is the prover's own
/// node-to-register map; whatever it names at message 3 is what gets sent.
struct RoundContext {
    QuantumSystem &system;
    Oracle &oracle;
    MerkleLayout &layout;
    const LocalHamiltonian &instance;
    Rng &rng;
    std::optional<int> chosen_term;
};

using StateSource = std::function<Eigen::VectorXcd(const LocalHamiltonian &, Rng &)>;
using AdversaryHook = std::function<void(RoundContext &)>;

struct ProverStrategy {
    std::string name;
    /// Honest prover on an instance it cannot prove: it sends nothing.
    bool aborts = false;
    /// N-qubit state to commit; padding to b * leaf_count is added by the round.
    StateSource state;
    AdversaryHook before_message1;
    AdversaryHook before_message3;
    /// E_i[1 - Tr(H_i sigma)] when the committed state is fixed.
    std::optional<double> analytic_acceptance;
};

/// Commits the exact ground state; aborts unless the instance is a YES
/// instance (by label, or by classification when unlabeled).
ProverStrategy honest_strategy(const LocalHamiltonian &instance);
ProverStrategy semi_honest_strategy(const LocalHamiltonian &instance, Eigen::VectorXcd sigma,
                                    std::string name = "semi-honest");
ProverStrategy semi_honest_ground(const LocalHamiltonian &instance);
ProverStrategy semi_honest_zero(const LocalHamiltonian &instance);
/// A fresh random state each round, drawn from the strategy stream.
ProverStrategy semi_honest_random();
/// Strategy by CLI name: honest, semi-honest-ground, semi-honest-zero, semi-honest-random.
ProverStrategy strategy_by_name(const std::string &name, const LocalHamiltonian &instance);

struct QueryTally {
    std::uint64_t prover_forward = 0;
    std::uint64_t prover_inverse = 0;
    std::uint64_t verifier_forward = 0;
    std::uint64_t verifier_inverse = 0;
};

struct Transcript {
    RoundSeeds seeds;
    std::string strategy;
    bool prover_aborted = false;
    std::vector<QubitId> message1;
    int chosen_term = 0;
    NodeSet leaves;      // W_i
    NodeSet sent_nodes;  // R_{W_i} without the root
    std::vector<QubitId> message3;
    bool decommit_passed = false;
    std::optional<Node> fail_node;
    std::string fail_outcome;
    std::optional<bool> final_measurement;
    bool accepted = false;
    QueryTally queries;
    std::size_t qubits_sent = 0;
    std::size_t classical_bits = 0;
    NodeSet verifier_nodes;  // nodes whose registers the verifier holds after message 3
    std::size_t verifier_qubits = 0;
    std::string violation;
};

/// One execution of the three-message protocol against a caller-built oracle.
/// Ownership violations by the strategy end the round as a rejection.
Transcript run_round(const LocalHamiltonian &instance, Oracle &oracle, const ProverStrategy &strategy,
                     const RoundConfig &config, const RoundSeeds &seeds);

struct EstimateConfig {
    OracleSpec oracle;
    RoundConfig round;
    int trials = 1;
    std::uint64_t seed = 0;
    /// Use one oracle seed for every trial instead of a fresh draw per trial.
    std::optional<std::uint64_t> fixed_oracle_seed;
    int threads = 0;
};

struct AcceptanceEstimate {
    int trials = 0;
    int accepted = 0;
    double rate = 0;
    double standard_error = 0;
    double mean_prover_forward = 0;
    double mean_prover_inverse = 0;
    double mean_verifier_forward = 0;
    double mean_verifier_inverse = 0;
    double mean_qubits_sent = 0;
    double mean_classical_bits = 0;
    std::vector<Transcript> transcripts;  // by trial index
};

/// Fresh oracle per trial; trial t uses RoundSeeds::derive(seed, t).
AcceptanceEstimate estimate_acceptance(const LocalHamiltonian &instance, const ProverStrategy &strategy,
                                       const EstimateConfig &config);

struct RepeatConfig {
    OracleSpec oracle;
    RoundConfig round;
    int repetitions = 1;
    /// Defaults to 1 - (alpha + beta) / 2.
    std::optional<double> threshold;
    bool shared_oracle = false;
};

struct RepeatOutcome {
    int repetitions = 0;
    int accepted_rounds = 0;
    double threshold = 0;
    int required = 0;  // ceil(threshold * repetitions)
    bool accepted = false;
};

double default_threshold(const LocalHamiltonian &instance);

/// Independent rounds; round j uses RoundSeeds::derive(seed, j). Accepts iff
/// at least threshold * repetitions rounds accept.
RepeatOutcome sequential_repeat(const LocalHamiltonian &instance, const ProverStrategy &strategy,
                                const RepeatConfig &config, std::uint64_t seed);

/// P[Binomial(n, p) >= k].
double binomial_upper_tail(int n, double p, int k);

struct RoundtripResult {
    std::uint64_t oracle_seed = 0;
    double fidelity = 0;
    bool bot = false;
    std::optional<Node> fail_node;
    QueryCounts queries;
};

/// Commits a random payload on b * leaf_count qubits, decommits all leaves
/// and compares the revealed leaves with the payload.
RoundtripResult roundtrip_trial(const OracleSpec &spec, int block_size, int leaf_count, std::uint64_t seed,
                                std::uint64_t index, const SystemOptions &options);

}  // namespace qmt

#endif  // QMT_PROTOCOL_H
