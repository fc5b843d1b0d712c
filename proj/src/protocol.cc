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

#include "qmt/protocol.h"

#include <bit>
#include <cmath>
#include <set>

#include "qmt/error.h"
#include "qmt/parallel.h"

namespace qmt {

namespace {

std::size_t ceil_log2(std::size_t m) { return m <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(m - 1)); }

Eigen::VectorXcd zero_state(int qubits) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index{1} << qubits);
    v[0] = 1;
    return v;
}

QueryCounts minus(QueryCounts a, QueryCounts b) { return {a.forward - b.forward, a.inverse - b.inverse}; }

}  // namespace

const char *verifier_mode_name(VerifierMode mode) { return mode == VerifierMode::kPovm ? "povm" : "circuit"; }

int resolve_leaf_count(const LocalHamiltonian &instance, int block_size, int leaf_count) {
    if (block_size < 1) throw ValidationError("block size must be positive");
    const int blocks = (instance.num_qubits + block_size - 1) / block_size;
    if (leaf_count == 0) return std::max(2, static_cast<int>(std::bit_ceil(static_cast<unsigned>(blocks))));
    if (leaf_count < 2 || !std::has_single_bit(static_cast<unsigned>(leaf_count))) {
        throw ValidationError("ell must be a power of two >= 2");
    }
    if (leaf_count < blocks) {
        throw ValidationError("b * ell = " + std::to_string(block_size * leaf_count) + " is smaller than the " +
                              std::to_string(instance.num_qubits) + " instance qubits");
    }
    return leaf_count;
}

RoundSeeds RoundSeeds::derive(std::uint64_t master, std::uint64_t index) {
    return {derive_seed(master, Stream::kOracle, index), derive_seed(master, Stream::kVerifier, index),
            derive_seed(master, Stream::kStrategy, index)};
}

ProverStrategy semi_honest_strategy(const LocalHamiltonian &instance, Eigen::VectorXcd sigma, std::string name) {
    if (sigma.size() != (Eigen::Index{1} << instance.num_qubits)) {
        throw ValidationError("committed state must have 2^N amplitudes");
    }
    ProverStrategy s;
    s.name = std::move(name);
    s.analytic_acceptance = expected_acceptance(instance, sigma);
    s.state = [sigma = std::move(sigma)](const LocalHamiltonian &, Rng &) { return sigma; };
    return s;
}

ProverStrategy honest_strategy(const LocalHamiltonian &instance) {
    bool yes = instance.label == InstanceLabel::kYes;
    if (instance.label == InstanceLabel::kUnknown) yes = classify(instance) == Classification::kYes;
    if (!yes) {
        ProverStrategy s;
        s.name = "honest";
        s.aborts = true;
        s.analytic_acceptance = 0.0;
        return s;
    }
    return semi_honest_strategy(instance, ground_energy(instance).state, "honest");
}

ProverStrategy semi_honest_ground(const LocalHamiltonian &instance) {
    return semi_honest_strategy(instance, ground_energy(instance).state, "semi-honest-ground");
}

ProverStrategy semi_honest_zero(const LocalHamiltonian &instance) {
    return semi_honest_strategy(instance, zero_state(instance.num_qubits), "semi-honest-zero");
}

ProverStrategy semi_honest_random() {
    ProverStrategy s;
    s.name = "semi-honest-random";
    s.state = [](const LocalHamiltonian &h, Rng &rng) {
        return random_state(std::size_t{1} << h.num_qubits, rng);
    };
    return s;
}

ProverStrategy strategy_by_name(const std::string &name, const LocalHamiltonian &instance) {
    if (name == "honest") return honest_strategy(instance);
    if (name == "semi-honest-ground") return semi_honest_ground(instance);
    if (name == "semi-honest-zero") return semi_honest_zero(instance);
    if (name == "semi-honest-random") return semi_honest_random();
    throw ValidationError("unknown strategy '" + name +
                          "' (expected honest, semi-honest-ground, semi-honest-zero or semi-honest-random)");
}

Transcript run_round(const LocalHamiltonian &instance, Oracle &oracle, const ProverStrategy &strategy,
                     const RoundConfig &config, const RoundSeeds &seeds) {
    const int b = config.block_size;
    if (oracle.block_size() != b) throw ValidationError("oracle block size does not match the round");
    const int leaves = resolve_leaf_count(instance, b, config.leaf_count);
    Transcript t;
    t.seeds = seeds;
    t.strategy = strategy.name;
    if (strategy.aborts) {
        t.prover_aborted = true;
        return t;
    }
    if (!strategy.state) throw UsageError("strategy has no state source");

    Rng strategy_rng(seeds.strategy);
    Rng verifier_rng(seeds.verifier);
    QuantumSystem system(config.system);
    const Eigen::VectorXcd sigma = strategy.state(instance, strategy_rng);
    if (sigma.size() != (Eigen::Index{1} << instance.num_qubits)) {
        throw ValidationError("strategy produced a state of the wrong size");
    }
    auto payload = system.alloc_state(sigma, Party::kProver);
    const auto padding = static_cast<std::size_t>(b * leaves - instance.num_qubits);
    if (padding > 0) {
        auto extra = system.alloc_register(padding, Party::kProver);
        payload.insert(payload.end(), extra.begin(), extra.end());
    }

    const QueryCounts start = oracle.counts();
    std::optional<QueryCounts> verifier_start;
    MerkleLayout layout = commit(system, oracle, payload, b);
    RoundContext context{system, oracle, layout, instance, strategy_rng, std::nullopt};
    try {
        if (strategy.before_message1) strategy.before_message1(context);
        t.message1 = layout.register_of(1);
        system.transfer(t.message1, Party::kProver, Party::kVerifier);
        MerkleLayout received(b, leaves);
        received.set_register(1, t.message1);

        const VerifierTerm term = sample_term(instance, verifier_rng);
        t.chosen_term = term.index;
        t.classical_bits = ceil_log2(static_cast<std::size_t>(instance.term_count()));
        context.chosen_term = term.index;
        t.leaves = leaves_for_qubits(std::set<int>(term.qubits.begin(), term.qubits.end()), b, leaves);
        const NodeSet needed = frontier(t.leaves, leaves);

        if (strategy.before_message3) strategy.before_message3(context);
        verifier_start = oracle.counts();
        for (Node u : needed) {
            if (u == 1) continue;
            const auto &r = layout.register_of(u);
            system.transfer(r, Party::kProver, Party::kVerifier);
            received.set_register(u, r);
            t.sent_nodes.insert(u);
            t.message3.insert(t.message3.end(), r.begin(), r.end());
        }
        t.qubits_sent = t.message1.size() + t.message3.size();
        for (const auto &[u, r] : received.registers()) t.verifier_nodes.insert(u);
        t.verifier_qubits = system.owned_by(Party::kVerifier).size();

        const DecommitResult result = decommit(system, oracle, received, t.leaves, verifier_rng);
        t.decommit_passed = result.passed;
        if (result.passed) {
            std::vector<QubitId> support;
            for (int q : term.qubits) {
                const auto [leaf, offset] = locate_qubit(q, b, leaves);
                support.push_back(result.revealed.at(leaf)[static_cast<std::size_t>(offset)]);
            }
            if (config.verifier == VerifierMode::kCircuit) {
                if (!term.circuit) throw ValidationError("term " + std::to_string(term.index) + " has no circuit");
                t.final_measurement = apply_verifier_circuit(system, *term.circuit, support, verifier_rng);
            } else {
                t.final_measurement = system.measure_povm_accept(support, term.reject_effect, verifier_rng);
            }
            t.accepted = *t.final_measurement;
        } else {
            t.fail_node = result.failed_node;
            t.fail_outcome = result.outcome;
        }
    } catch (const ProtocolViolation &e) {
        t.violation = e.what();
        t.accepted = false;
    }
    const QueryCounts end = oracle.counts();
    const QueryCounts prover = minus(verifier_start.value_or(end), start);
    const QueryCounts verifier = minus(end, verifier_start.value_or(end));
    t.queries = {prover.forward, prover.inverse, verifier.forward, verifier.inverse};
    return t;
}

AcceptanceEstimate estimate_acceptance(const LocalHamiltonian &instance, const ProverStrategy &strategy,
                                       const EstimateConfig &config) {
    if (config.trials < 1) throw ValidationError("trials must be at least 1");
    AcceptanceEstimate est;
    est.trials = config.trials;
    est.transcripts.resize(static_cast<std::size_t>(config.trials));
    parallel_for(est.transcripts.size(), config.threads, [&](std::size_t i) {
        RoundSeeds seeds = RoundSeeds::derive(config.seed, i);
        if (config.fixed_oracle_seed) seeds.oracle = *config.fixed_oracle_seed;
        Oracle oracle = Oracle::build(config.oracle, config.round.block_size, seeds.oracle);
        est.transcripts[i] = run_round(instance, oracle, strategy, config.round, seeds);
    });
    for (const auto &t : est.transcripts) {
        est.accepted += t.accepted ? 1 : 0;
        est.mean_prover_forward += static_cast<double>(t.queries.prover_forward);
        est.mean_prover_inverse += static_cast<double>(t.queries.prover_inverse);
        est.mean_verifier_forward += static_cast<double>(t.queries.verifier_forward);
        est.mean_verifier_inverse += static_cast<double>(t.queries.verifier_inverse);
        est.mean_qubits_sent += static_cast<double>(t.qubits_sent);
        est.mean_classical_bits += static_cast<double>(t.classical_bits);
    }
    const double n = config.trials;
    est.rate = est.accepted / n;
    est.standard_error = std::sqrt(est.rate * (1 - est.rate) / n);
    for (double *m : {&est.mean_prover_forward, &est.mean_prover_inverse, &est.mean_verifier_forward,
                      &est.mean_verifier_inverse, &est.mean_qubits_sent, &est.mean_classical_bits}) {
        *m /= n;
    }
    return est;
}

double default_threshold(const LocalHamiltonian &instance) { return 1.0 - (instance.alpha + instance.beta) / 2.0; }

RepeatOutcome sequential_repeat(const LocalHamiltonian &instance, const ProverStrategy &strategy,
                                const RepeatConfig &config, std::uint64_t seed) {
    if (config.repetitions < 1) throw ValidationError("repetitions must be at least 1");
    RepeatOutcome out;
    out.repetitions = config.repetitions;
    out.threshold = config.threshold.value_or(default_threshold(instance));
    if (!(out.threshold > 0 && out.threshold <= 1)) throw ValidationError("threshold must be in (0, 1]");
    out.required = static_cast<int>(std::ceil(out.threshold * config.repetitions - 1e-12));
    std::optional<Oracle> shared;
    if (config.shared_oracle) {
        shared = Oracle::build(config.oracle, config.round.block_size, RoundSeeds::derive(seed, 0).oracle);
    }
    for (int j = 0; j < config.repetitions; ++j) {
        const RoundSeeds seeds = RoundSeeds::derive(seed, static_cast<std::uint64_t>(j));
        Transcript t;
        if (shared) {
            t = run_round(instance, *shared, strategy, config.round, seeds);
        } else {
            Oracle oracle = Oracle::build(config.oracle, config.round.block_size, seeds.oracle);
            t = run_round(instance, oracle, strategy, config.round, seeds);
        }
        out.accepted_rounds += t.accepted ? 1 : 0;
    }
    out.accepted = out.accepted_rounds >= out.required;
    return out;
}

double binomial_upper_tail(int n, double p, int k) {
    if (k <= 0) return 1.0;
    if (k > n) return 0.0;
    double total = 0;
    for (int j = k; j <= n; ++j) {
        const double log_term = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) +
                                (j > 0 ? j * std::log(p) : 0.0) + (n - j > 0 ? (n - j) * std::log1p(-p) : 0.0);
        total += std::exp(log_term);
    }
    return std::min(1.0, total);
}

RoundtripResult roundtrip_trial(const OracleSpec &spec, int block_size, int leaf_count, std::uint64_t seed,
                                std::uint64_t index, const SystemOptions &options) {
    RoundtripResult r;
    r.oracle_seed = derive_seed(seed, Stream::kOracle, index);
    Oracle oracle = Oracle::build(spec, block_size, r.oracle_seed);
    Rng payload_rng = make_rng(seed, Stream::kPayload, index);
    Rng verifier_rng = make_rng(seed, Stream::kVerifier, index);
    const int n = block_size * leaf_count;
    const Eigen::VectorXcd sigma = random_state(std::size_t{1} << n, payload_rng);
    QuantumSystem system(options);
    const auto payload = system.alloc_state(sigma, Party::kProver);
    const MerkleLayout layout = commit(system, oracle, payload, block_size);
    NodeSet all_leaves;
    for (int j = 0; j < leaf_count; ++j) all_leaves.insert(static_cast<Node>(leaf_count + j));
    const DecommitResult result = decommit(system, oracle, layout, all_leaves, verifier_rng);
    r.queries = oracle.counts();
    if (!result.passed) {
        r.bot = true;
        r.fail_node = result.failed_node;
        return r;
    }
    r.fidelity = fidelity(system.reduced_density(layout.labels_of(all_leaves)), DensityMatrix::pure(sigma));
    return r;
}

}  // namespace qmt
