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

#include "qmt/cli.h"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "qmt/adversary.h"
#include "qmt/error.h"
#include "qmt/hamiltonian.h"
#include "qmt/merkle.h"
#include "qmt/oracle.h"
#include "qmt/parallel.h"
#include "qmt/protocol.h"
#include "qmt/records.h"

#ifndef QMT_DATA_DIR
#define QMT_DATA_DIR ""
#endif

namespace qmt {

namespace {

struct Common {
    std::uint64_t seed = 1;
    std::string format = "csv";
    std::string output;
    int threads = 0;
    std::size_t max_qubits = 0;  // 0: environment or built-in default
};

void add_common(CLI::App *cmd, Common &c) {
    cmd->add_option("--seed", c.seed, "Master seed")->capture_default_str();
    cmd->add_option("--format", c.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}))->capture_default_str();
    cmd->add_option("--output", c.output, "Output file (default stdout)");
    cmd->add_option("--threads", c.threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    cmd->add_option("--max-qubits", c.max_qubits, "Qubit cap (overrides QMT_MAX_QUBITS)");
}

SystemOptions system_options(const Common &c, Execution execution) {
    SystemOptions o;
    if (c.max_qubits > 0) o.max_qubits = c.max_qubits;
    o.execution = execution;
    return o;
}

Execution parse_execution(const std::string &name) {
    if (name == "eager") return Execution::kEager;
    if (name == "deferred") return Execution::kDeferred;
    throw ValidationError("execution must be eager or deferred");
}

Record base_config(const std::string &command, const Common &c, const SystemOptions &options) {
    Record r = Record::object();
    r["command"] = command;
    r["seed"] = c.seed;
    r["format"] = c.format;
    r["threads"] = resolve_threads(c.threads);
    r["qubit_cap"] = options.max_qubits;
    r["execution"] = options.execution == Execution::kEager ? "eager" : "deferred";
    return r;
}

void write(const Common &c, const RecordSet &set) {
    const auto format = parse_format(c.format);
    if (c.output.empty() || c.output == "-") {
        emit_records(std::cout, format, set);
        std::cout.flush();
        return;
    }
    std::ofstream out(c.output, std::ios::binary);
    if (!out) throw Error("cannot open output file " + c.output);
    emit_records(out, format, set);
    if (!out) throw Error("failed writing " + c.output);
}

std::filesystem::path resolve_instance(const std::string &name) {
    std::filesystem::path p(name);
    if (std::filesystem::exists(p) || p.has_parent_path()) return p;
    std::filesystem::path shipped = std::filesystem::path(QMT_DATA_DIR) / p;
    return std::filesystem::exists(shipped) ? shipped : p;
}

void require_positive(int value, const char *name) {
    if (value < 1) throw ValidationError(std::string(name) + " must be positive");
}

double mean_of(double total, int n) { return n > 0 ? total / n : 0.0; }

double binomial_stderr(double p, int n) { return n > 0 ? std::sqrt(p * (1 - p) / n) : 0.0; }

Record optional_number(const std::optional<double> &v) { return v ? Record(*v) : Record(nullptr); }

// roundtrip ------------------------------------------------------------------

struct RoundtripArgs {
    Common common;
    int b = 2;
    int ell = 4;
    std::string oracle = "haar";
    int trials = 50;
    std::string execution = "eager";
};

RecordSet run_roundtrip(const RoundtripArgs &a) {
    require_positive(a.trials, "trials");
    const OracleSpec spec = OracleSpec::parse(a.oracle);
    const SystemOptions options = system_options(a.common, parse_execution(a.execution));
    MerkleLayout geometry(a.b, a.ell);
    RecordSet set;
    set.config = base_config("roundtrip", a.common, options);
    set.config["oracle"] = spec.name();
    set.config["b"] = a.b;
    set.config["ell"] = a.ell;
    set.config["trials"] = a.trials;
    set.columns = {"trial", "oracle_seed", "bot", "fail_node", "fidelity", "forward_queries", "inverse_queries"};

    std::vector<RoundtripResult> results(static_cast<std::size_t>(a.trials));
    parallel_for(results.size(), a.common.threads, [&](std::size_t i) {
        results[i] = roundtrip_trial(spec, a.b, a.ell, a.common.seed, i, options);
    });
    int bots = 0;
    double min_fidelity = 1.0;
    double forward = 0;
    double inverse = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto &r = results[i];
        Record row;
        row["trial"] = i;
        row["oracle_seed"] = r.oracle_seed;
        row["bot"] = r.bot;
        row["fail_node"] = r.fail_node ? Record(*r.fail_node) : Record(nullptr);
        row["fidelity"] = r.bot ? Record(nullptr) : Record(r.fidelity);
        row["forward_queries"] = r.queries.forward;
        row["inverse_queries"] = r.queries.inverse;
        set.rows.push_back(std::move(row));
        bots += r.bot ? 1 : 0;
        if (!r.bot) min_fidelity = std::min(min_fidelity, r.fidelity);
        forward += static_cast<double>(r.queries.forward);
        inverse += static_cast<double>(r.queries.inverse);
    }
    const double rate = 1.0 - static_cast<double>(bots) / a.trials;
    auto &s = set.summary;
    s["oracle"] = spec.name();
    s["b"] = a.b;
    s["ell"] = a.ell;
    s["trials"] = a.trials;
    s["bot_count"] = bots;
    s["acceptance_rate"] = rate;
    s["stderr"] = binomial_stderr(rate, a.trials);
    s["min_fidelity"] = bots == a.trials ? Record(nullptr) : Record(min_fidelity);
    s["mean_forward_queries"] = mean_of(forward, a.trials);
    s["mean_inverse_queries"] = mean_of(inverse, a.trials);
    s["mean_qubits_communicated"] = static_cast<double>(geometry.node_count()) * a.b;
    return set;
}

// run-protocol and repeat ------------------------------------------------------

struct ProtocolArgs {
    Common common;
    std::string instance;
    std::string strategy = "honest";
    std::string oracle = "haar";
    int b = 2;
    int ell = 0;
    int trials = 100;
    std::string verifier = "povm";
    std::optional<std::uint64_t> oracle_seed;
    std::string execution = "deferred";
    // repeat only
    int repetitions = 25;
    int meta_trials = 100;
    std::optional<double> threshold;
    bool shared_oracle = false;
};

VerifierMode parse_verifier(const std::string &name) {
    if (name == "povm") return VerifierMode::kPovm;
    if (name == "circuit") return VerifierMode::kCircuit;
    throw ValidationError("verifier must be povm or circuit");
}

RoundConfig round_config(const ProtocolArgs &a, const LocalHamiltonian &h) {
    RoundConfig rc;
    rc.block_size = a.b;
    rc.leaf_count = resolve_leaf_count(h, a.b, a.ell);
    rc.verifier = parse_verifier(a.verifier);
    rc.system = system_options(a.common, parse_execution(a.execution));
    return rc;
}

Record protocol_config(const char *command, const ProtocolArgs &a, const LocalHamiltonian &h, const OracleSpec &spec,
                       const RoundConfig &rc) {
    Record c = base_config(command, a.common, rc.system);
    c["instance"] = a.instance;
    c["n_qubits"] = h.num_qubits;
    c["m"] = h.term_count();
    c["label"] = label_name(h.label);
    c["strategy"] = a.strategy;
    c["oracle"] = spec.name();
    c["b"] = a.b;
    c["ell"] = rc.leaf_count;
    c["verifier"] = verifier_mode_name(rc.verifier);
    return c;
}

RecordSet run_protocol(const ProtocolArgs &a) {
    require_positive(a.trials, "trials");
    const LocalHamiltonian h = load_instance(resolve_instance(a.instance));
    const OracleSpec spec = OracleSpec::parse(a.oracle);
    EstimateConfig ec;
    ec.oracle = spec;
    ec.round = round_config(a, h);
    ec.trials = a.trials;
    ec.seed = a.common.seed;
    ec.fixed_oracle_seed = a.oracle_seed;
    ec.threads = a.common.threads;
    const ProverStrategy strategy = strategy_by_name(a.strategy, h);

    RecordSet set;
    set.config = protocol_config("run-protocol", a, h, spec, ec.round);
    set.config["trials"] = a.trials;
    set.config["oracle_seed"] = a.oracle_seed ? Record(*a.oracle_seed) : Record(nullptr);
    set.columns = {"seed",     "trial",       "i",        "decommit_pass", "fail_node",
                   "accepted", "qubits_sent", "prover_G", "prover_Ginv",   "verifier_Ginv"};
    const AcceptanceEstimate est = estimate_acceptance(h, strategy, ec);
    for (std::size_t t = 0; t < est.transcripts.size(); ++t) {
        const auto &tr = est.transcripts[t];
        Record row;
        row["seed"] = a.common.seed;
        row["trial"] = t;
        row["i"] = tr.chosen_term;
        row["decommit_pass"] = tr.decommit_passed;
        row["fail_node"] = tr.fail_node ? Record(*tr.fail_node) : Record(nullptr);
        row["accepted"] = tr.accepted;
        row["qubits_sent"] = tr.qubits_sent;
        row["prover_G"] = tr.queries.prover_forward;
        row["prover_Ginv"] = tr.queries.prover_inverse;
        row["verifier_Ginv"] = tr.queries.verifier_inverse;
        set.rows.push_back(std::move(row));
    }
    auto &s = set.summary;
    s["oracle"] = spec.name();
    s["b"] = a.b;
    s["ell"] = ec.round.leaf_count;
    s["trials"] = a.trials;
    s["accepted"] = est.accepted;
    s["acceptance_rate"] = est.rate;
    s["stderr"] = est.standard_error;
    s["expected_acceptance"] = optional_number(strategy.analytic_acceptance);
    s["mean_prover_G"] = est.mean_prover_forward;
    s["mean_prover_Ginv"] = est.mean_prover_inverse;
    s["mean_verifier_G"] = est.mean_verifier_forward;
    s["mean_verifier_Ginv"] = est.mean_verifier_inverse;
    s["mean_qubits_communicated"] = est.mean_qubits_sent;
    s["mean_classical_bits"] = est.mean_classical_bits;
    return set;
}

RecordSet run_repeat(const ProtocolArgs &a) {
    require_positive(a.repetitions, "repetitions");
    require_positive(a.meta_trials, "meta-trials");
    const LocalHamiltonian h = load_instance(resolve_instance(a.instance));
    const OracleSpec spec = OracleSpec::parse(a.oracle);
    RepeatConfig rc;
    rc.oracle = spec;
    rc.round = round_config(a, h);
    rc.repetitions = a.repetitions;
    rc.threshold = a.threshold;
    rc.shared_oracle = a.shared_oracle;
    const ProverStrategy strategy = strategy_by_name(a.strategy, h);

    RecordSet set;
    set.config = protocol_config("repeat", a, h, spec, rc.round);
    set.config["repetitions"] = a.repetitions;
    set.config["meta_trials"] = a.meta_trials;
    set.config["threshold"] = rc.threshold.value_or(default_threshold(h));
    set.config["oracle_mode"] = a.shared_oracle ? "shared" : "fresh";
    set.columns = {"meta", "accepted_rounds", "required", "accepted"};

    std::vector<RepeatOutcome> outcomes(static_cast<std::size_t>(a.meta_trials));
    parallel_for(outcomes.size(), a.common.threads, [&](std::size_t m) {
        outcomes[m] = sequential_repeat(h, strategy, rc, derive_seed(a.common.seed, Stream::kMeta, m));
    });
    int accepted = 0;
    double rounds = 0;
    for (std::size_t m = 0; m < outcomes.size(); ++m) {
        const auto &o = outcomes[m];
        Record row;
        row["meta"] = m;
        row["accepted_rounds"] = o.accepted_rounds;
        row["required"] = o.required;
        row["accepted"] = o.accepted;
        set.rows.push_back(std::move(row));
        accepted += o.accepted ? 1 : 0;
        rounds += o.accepted_rounds;
    }
    const double rate = static_cast<double>(accepted) / a.meta_trials;
    auto &s = set.summary;
    s["oracle"] = spec.name();
    s["b"] = a.b;
    s["ell"] = rc.round.leaf_count;
    s["repetitions"] = a.repetitions;
    s["meta_trials"] = a.meta_trials;
    s["threshold"] = outcomes.front().threshold;
    s["required"] = outcomes.front().required;
    s["oracle_mode"] = a.shared_oracle ? "shared" : "fresh";
    s["accepted"] = accepted;
    s["acceptance_rate"] = rate;
    s["stderr"] = binomial_stderr(rate, a.meta_trials);
    s["mean_accepted_rounds"] = rounds / a.meta_trials;
    s["per_round_expected_acceptance"] = optional_number(strategy.analytic_acceptance);
    if (strategy.analytic_acceptance) {
        s["predicted_acceptance"] =
            binomial_upper_tail(a.repetitions, *strategy.analytic_acceptance, outcomes.front().required);
    } else {
        s["predicted_acceptance"] = nullptr;
    }
    return set;
}

// attacks --------------------------------------------------------------------

struct PhaseArgs {
    Common common;
    int b = 2;
    std::string oracle = "oh";
    int trials = 500;
    std::string function = "parity";
    std::string state = "plus";
};

RecordSet run_attack_phase(const PhaseArgs &a) {
    require_positive(a.trials, "trials");
    const OracleSpec spec = OracleSpec::parse(a.oracle);
    RecordSet set;
    set.config = base_config("attack-phase", a.common, system_options(a.common, Execution::kDeferred));
    set.config["oracle"] = spec.name();
    set.config["b"] = a.b;
    set.config["ell"] = 2;
    set.config["trials"] = a.trials;
    set.config["function"] = a.function;
    set.config["state"] = a.state;
    set.columns = {"trial", "oracle_seed", "accepted", "trace_distance"};
    if (a.function != "parity" && a.function != "zero" && a.function != "random") {
        throw ValidationError("function must be parity, zero or random");
    }
    if (a.state != "plus" && a.state != "random") throw ValidationError("state must be plus or random");

    std::vector<PhaseAttackResult> results(static_cast<std::size_t>(a.trials));
    std::vector<std::uint64_t> seeds(results.size());
    parallel_for(results.size(), a.common.threads, [&](std::size_t t) {
        seeds[t] = derive_seed(a.common.seed, Stream::kOracle, t);
        Oracle oracle = Oracle::build(spec, a.b, seeds[t]);
        Rng strategy_rng = make_rng(a.common.seed, Stream::kStrategy, t);
        Rng payload_rng = make_rng(a.common.seed, Stream::kPayload, t);
        Rng verifier_rng = make_rng(a.common.seed, Stream::kVerifier, t);
        const PhaseFunction f = a.function == "parity" ? PhaseFunction::parity(a.b)
                                : a.function == "zero" ? PhaseFunction::zero(a.b)
                                                       : PhaseFunction::random(a.b, strategy_rng);
        const Eigen::VectorXcd psi =
            a.state == "plus" ? plus_state(2 * a.b) : random_state(std::size_t{1} << (2 * a.b), payload_rng);
        results[t] = phase_attack_round(oracle, psi, f, verifier_rng);
    });
    int accepted = 0;
    double distance = 0;
    for (std::size_t t = 0; t < results.size(); ++t) {
        Record row;
        row["trial"] = t;
        row["oracle_seed"] = seeds[t];
        row["accepted"] = results[t].verifier_accepts;
        row["trace_distance"] = optional_number(results[t].trace_distance);
        set.rows.push_back(std::move(row));
        if (results[t].verifier_accepts) {
            ++accepted;
            distance += *results[t].trace_distance;
        }
    }
    const double rate = static_cast<double>(accepted) / a.trials;
    auto &s = set.summary;
    s["oracle"] = spec.name();
    s["b"] = a.b;
    s["ell"] = 2;
    s["trials"] = a.trials;
    s["accepted"] = accepted;
    s["acceptance_rate"] = rate;
    s["stderr"] = binomial_stderr(rate, a.trials);
    s["mean_trace_distance_accepted"] = accepted ? Record(distance / accepted) : Record(nullptr);
    s["mean_prover_G"] = 1;
    s["mean_verifier_Ginv"] = 1;
    s["mean_qubits_communicated"] = 3 * a.b;
    return set;
}

struct HjwArgs {
    Common common;
    int b = 2;
    std::string oracle = "haar";
    int trials = 100;
    std::string mode = "auto";
};

RecordSet run_attack_hjw(const HjwArgs &a) {
    require_positive(a.trials, "trials");
    const OracleSpec spec = OracleSpec::parse(a.oracle);
    if (a.mode != "auto" && a.mode != "dense" && a.mode != "frame") {
        throw ValidationError("mode must be auto, dense or frame");
    }
    bool frame = a.mode == "frame" || (a.mode == "auto" && spec.kind == OracleKind::kHaar && a.b >= 4);
    if (frame && spec.kind != OracleKind::kHaar) throw ValidationError("frame mode needs the haar oracle");
    RecordSet set;
    set.config = base_config("attack-hjw", a.common, system_options(a.common, Execution::kDeferred));
    set.config["oracle"] = spec.name();
    set.config["b"] = a.b;
    set.config["ell"] = 2;
    set.config["trials"] = a.trials;
    set.config["mode"] = frame ? "frame" : "dense";
    set.config["access"] = "unbounded";
    set.columns = {"trial",  "oracle_seed", "predicted_overlap", "achieved_fidelity", "identity_residual",
                   "check_pass_probability", "check_pass", "conditional_fidelity"};

    struct Row {
        std::uint64_t seed = 0;
        SwitchResult sw;
        std::optional<HjwAttackResult> attack;
    };
    std::vector<Row> rows(static_cast<std::size_t>(a.trials));
    const auto dim = std::size_t{1} << (2 * a.b);
    parallel_for(rows.size(), a.common.threads, [&](std::size_t t) {
        Row &r = rows[t];
        r.seed = derive_seed(a.common.seed, Stream::kOracle, t);
        Rng payload_rng = make_rng(a.common.seed, Stream::kPayload, t);
        Rng verifier_rng = make_rng(a.common.seed, Stream::kVerifier, t);
        const Eigen::VectorXcd psi = random_state(dim, payload_rng);
        Eigen::VectorXcd phi = random_state(dim, payload_rng);
        phi -= psi.dot(phi) * psi;
        phi.normalize();
        if (frame) {
            Rng oracle_rng(r.seed);
            const auto [image_a, image_b] = haar_frame_images(psi, phi, a.b, oracle_rng);
            r.sw = hjw_switch_from_images(image_a, image_b, a.b);
        } else {
            Oracle oracle = Oracle::build(spec, a.b, r.seed);
            r.sw = hjw_switch_operator(oracle.dense_matrix(), psi, phi, a.b);
            r.attack = hjw_attack_round(oracle, r.sw.w, psi, phi, verifier_rng);
        }
    });
    double fidelity_sum = 0;
    double worst_residual = 0;
    int passes = 0;
    for (std::size_t t = 0; t < rows.size(); ++t) {
        const Row &r = rows[t];
        const double residual = std::abs(r.sw.achieved_fidelity - r.sw.predicted_overlap * r.sw.predicted_overlap);
        Record row;
        row["trial"] = t;
        row["oracle_seed"] = r.seed;
        row["predicted_overlap"] = r.sw.predicted_overlap;
        row["achieved_fidelity"] = r.sw.achieved_fidelity;
        row["identity_residual"] = residual;
        row["check_pass_probability"] = optional_number(r.sw.check_pass_probability);
        row["check_pass"] = r.attack ? Record(r.attack->check_pass) : Record(nullptr);
        row["conditional_fidelity"] = r.attack ? optional_number(r.attack->conditional_fidelity) : Record(nullptr);
        set.rows.push_back(std::move(row));
        fidelity_sum += r.sw.achieved_fidelity;
        worst_residual = std::max(worst_residual, residual);
        passes += (r.attack && r.attack->check_pass) ? 1 : 0;
    }
    const double mean = fidelity_sum / a.trials;
    double var = 0;
    for (const Row &r : rows) var += (r.sw.achieved_fidelity - mean) * (r.sw.achieved_fidelity - mean);
    if (a.trials > 1) var /= a.trials - 1;
    auto &s = set.summary;
    s["oracle"] = spec.name();
    s["b"] = a.b;
    s["ell"] = 2;
    s["trials"] = a.trials;
    s["access"] = "unbounded";
    s["mode"] = frame ? "frame" : "dense";
    s["mean_achieved_fidelity"] = mean;
    s["stderr"] = std::sqrt(var / a.trials);
    s["max_identity_residual"] = worst_residual;
    if (frame) {
        s["acceptance_rate"] = nullptr;
    } else {
        s["acceptance_rate"] = static_cast<double>(passes) / a.trials;
    }
    s["mean_prover_G"] = frame ? 0 : 1;
    s["mean_verifier_Ginv"] = frame ? 0 : 1;
    s["mean_qubits_communicated"] = 3 * a.b;
    return set;
}

// haar-stats, solve-instance, validate-instance ---------------------------------

struct HaarArgs {
    Common common;
    std::string oracle = "haar";
    int qubits = 2;
    int samples = 10000;
};

RecordSet run_haar_stats(const HaarArgs &a) {
    const OracleSpec spec = OracleSpec::parse(a.oracle);
    RecordSet set;
    set.config = base_config("haar-stats", a.common, system_options(a.common, Execution::kDeferred));
    set.config["oracle"] = spec.name();
    set.config["qubits"] = a.qubits;
    set.config["samples"] = a.samples;
    const HaarStatistics h = haar_statistics(spec, a.qubits, a.samples, a.common.seed);
    auto &s = set.summary;
    s["oracle"] = h.kind;
    s["qubits"] = h.qubits;
    s["samples"] = h.samples;
    s["mean_abs2_u00"] = h.mean_abs2_u00;
    s["stderr_abs2_u00"] = h.stderr_abs2_u00;
    s["haar_abs2_u00"] = h.haar_abs2_u00;
    s["mean_abs4_u00"] = h.mean_abs4_u00;
    s["stderr_abs4_u00"] = h.stderr_abs4_u00;
    s["haar_abs4_u00"] = h.haar_abs4_u00;
    s["frame_potential_t2"] = h.frame_potential_t2;
    s["stderr_frame_potential_t2"] = h.stderr_frame_potential_t2;
    s["max_unitarity_defect"] = h.max_unitarity_defect;
    return set;
}

struct InstanceArgs {
    Common common;
    std::string instance;
};

RecordSet run_solve(const InstanceArgs &a) {
    const LocalHamiltonian h = load_instance(resolve_instance(a.instance));
    RecordSet set;
    set.config = base_config("solve-instance", a.common, system_options(a.common, Execution::kDeferred));
    set.config["instance"] = a.instance;
    const GroundState g = ground_energy(h);
    auto &s = set.summary;
    s["n_qubits"] = h.num_qubits;
    s["m"] = h.term_count();
    s["k"] = h.locality;
    s["alpha"] = h.alpha;
    s["beta"] = h.beta;
    s["lambda_min"] = g.energy;
    s["lambda_min_over_m"] = g.energy / h.term_count();
    s["power_iteration_lambda_min"] = g.power_iteration_energy;
    s["power_iterations"] = g.power_iterations;
    s["residual"] = g.residual;
    s["classification"] = classification_name(classify(h, g.energy));
    s["label"] = label_name(h.label);
    return set;
}

RecordSet run_validate(const InstanceArgs &a) {
    const LocalHamiltonian h = load_instance(resolve_instance(a.instance));
    RecordSet set;
    set.config = base_config("validate-instance", a.common, system_options(a.common, Execution::kDeferred));
    set.config["instance"] = a.instance;
    auto &s = set.summary;
    s["valid"] = true;
    s["n_qubits"] = h.num_qubits;
    s["m"] = h.term_count();
    s["k"] = h.locality;
    s["label"] = label_name(h.label);
    return set;
}

}  // namespace

int run_main(int argc, char **argv) {
    CLI::App app{"Quantum Merkle tree and succinct argument simulator"};
    app.require_subcommand(1);

    RoundtripArgs roundtrip;
    auto *rt = app.add_subcommand("roundtrip", "Commit a random payload and decommit every leaf");
    add_common(rt, roundtrip.common);
    rt->add_option("--b", roundtrip.b, "Block size")->capture_default_str();
    rt->add_option("--ell", roundtrip.ell, "Leaf count")->capture_default_str();
    rt->add_option("--oracle", roundtrip.oracle, "haar, circuit:<depth>, oh or identity")->capture_default_str();
    rt->add_option("--trials", roundtrip.trials)->capture_default_str();
    rt->add_option("--execution", roundtrip.execution, "eager or deferred")->capture_default_str();

    ProtocolArgs protocol;
    auto *rp = app.add_subcommand("run-protocol", "Estimate the acceptance probability of one strategy");
    ProtocolArgs repeat;
    auto *rr = app.add_subcommand("repeat", "Sequential repetition with a threshold");
    for (auto [cmd, args] : {std::pair{rp, &protocol}, std::pair{rr, &repeat}}) {
        add_common(cmd, args->common);
        cmd->add_option("--instance", args->instance, "Instance file")->required();
        cmd->add_option("--strategy", args->strategy,
                        "honest, semi-honest-ground, semi-honest-zero or semi-honest-random")
            ->capture_default_str();
        cmd->add_option("--oracle", args->oracle)->capture_default_str();
        cmd->add_option("--b", args->b)->capture_default_str();
        cmd->add_option("--ell", args->ell, "Leaf count (0: smallest that fits)")->capture_default_str();
        cmd->add_option("--verifier", args->verifier, "povm or circuit")->capture_default_str();
        cmd->add_option("--execution", args->execution, "eager or deferred")->capture_default_str();
    }
    rp->add_option("--trials", protocol.trials)->capture_default_str();
    rp->add_option("--oracle-seed", protocol.oracle_seed, "Reuse one oracle seed for every trial");
    rr->add_option("--repetitions", repeat.repetitions)->capture_default_str();
    rr->add_option("--meta-trials", repeat.meta_trials)->capture_default_str();
    rr->add_option("--threshold", repeat.threshold, "Fraction of accepting rounds needed");
    rr->add_flag("--shared-oracle", repeat.shared_oracle, "One oracle for all repetitions");

    PhaseArgs phase;
    auto *ap = app.add_subcommand("attack-phase", "Phase attack on the depth-one scheme");
    add_common(ap, phase.common);
    ap->add_option("--b", phase.b)->capture_default_str();
    ap->add_option("--oracle", phase.oracle)->capture_default_str();
    ap->add_option("--trials", phase.trials)->capture_default_str();
    ap->add_option("--function", phase.function, "parity, zero or random")->capture_default_str();
    ap->add_option("--state", phase.state, "plus or random")->capture_default_str();

    HjwArgs hjw;
    auto *ah = app.add_subcommand("attack-hjw", "Switch attack on the depth-one scheme");
    add_common(ah, hjw.common);
    ah->add_option("--b", hjw.b)->capture_default_str();
    ah->add_option("--oracle", hjw.oracle)->capture_default_str();
    ah->add_option("--trials", hjw.trials)->capture_default_str();
    ah->add_option("--mode", hjw.mode, "auto, dense or frame")->capture_default_str();

    HaarArgs haar;
    auto *hs = app.add_subcommand("haar-stats", "Moments of sampled oracle unitaries");
    add_common(hs, haar.common);
    hs->add_option("--oracle", haar.oracle)->capture_default_str();
    hs->add_option("--qubits", haar.qubits)->capture_default_str();
    hs->add_option("--samples", haar.samples)->capture_default_str();

    InstanceArgs solve;
    auto *si = app.add_subcommand("solve-instance", "Ground energy and promise classification");
    add_common(si, solve.common);
    si->add_option("--instance", solve.instance)->required();

    InstanceArgs validate;
    auto *vi = app.add_subcommand("validate-instance", "Parse and validate an instance file");
    add_common(vi, validate.common);
    vi->add_option("--instance", validate.instance)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (rt->parsed()) write(roundtrip.common, run_roundtrip(roundtrip));
        if (rp->parsed()) write(protocol.common, run_protocol(protocol));
        if (rr->parsed()) write(repeat.common, run_repeat(repeat));
        if (ap->parsed()) write(phase.common, run_attack_phase(phase));
        if (ah->parsed()) write(hjw.common, run_attack_hjw(hjw));
        if (hs->parsed()) write(haar.common, run_haar_stats(haar));
        if (si->parsed()) write(solve.common, run_solve(solve));
        if (vi->parsed()) write(validate.common, run_validate(validate));
    } catch (const ValidationError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ResourceError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const UsageError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace qmt
