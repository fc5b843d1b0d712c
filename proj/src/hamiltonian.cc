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

#include "qmt/hamiltonian.h"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <random>
#include <set>
#include <sstream>

#include "qmt/error.h"
#include "qmt/oracle.h"

namespace qmt {

namespace {

using nlohmann::json;

constexpr double kPromiseSlack = 1e-9;

std::string term_prefix(std::size_t i) { return "term " + std::to_string(i + 1) + ": "; }

const char *gate_name(CliffordTGate g) {
    switch (g) {
        case CliffordTGate::kH:
            return "H";
        case CliffordTGate::kS:
            return "S";
        case CliffordTGate::kT:
            return "T";
        case CliffordTGate::kX:
            return "X";
        case CliffordTGate::kCnot:
            break;
    }
    return "CNOT";
}

int gate_arity(CliffordTGate g) { return g == CliffordTGate::kCnot ? 2 : 1; }

CliffordTGate parse_gate(const std::string &name) {
    if (name == "H") return CliffordTGate::kH;
    if (name == "S") return CliffordTGate::kS;
    if (name == "T") return CliffordTGate::kT;
    if (name == "X") return CliffordTGate::kX;
    if (name == "CNOT") return CliffordTGate::kCnot;
    throw ValidationError("gate '" + name + "' is not in the Clifford+T set {H, S, T, X, CNOT}");
}

const std::shared_ptr<const Operator> &gate_operator(CliffordTGate g) {
    static const auto ops = [] {
        const double r = 1.0 / std::sqrt(2.0);
        Eigen::MatrixXcd h(2, 2), s(2, 2), t(2, 2), x(2, 2), cx = Eigen::MatrixXcd::Zero(4, 4);
        h << r, r, r, -r;
        s << 1, 0, 0, Complex(0, 1);
        t << 1, 0, 0, std::polar(1.0, M_PI / 4);
        x << 0, 1, 1, 0;
        cx(0, 0) = cx(1, 1) = cx(2, 3) = cx(3, 2) = 1;
        return std::vector<std::shared_ptr<const Operator>>{Operator::dense(h), Operator::dense(s),
                                                            Operator::dense(t), Operator::dense(x),
                                                            Operator::dense(cx)};
    }();
    return ops[static_cast<std::size_t>(g)];
}

Eigen::MatrixXcd projector_one() {
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(2, 2);
    p(1, 1) = 1;
    return p;
}

Eigen::MatrixXcd projector_zero() {
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(2, 2);
    p(0, 0) = 1;
    return p;
}

}  // namespace

const char *label_name(InstanceLabel label) {
    switch (label) {
        case InstanceLabel::kYes:
            return "yes";
        case InstanceLabel::kNo:
            return "no";
        case InstanceLabel::kUnknown:
            break;
    }
    return "unknown";
}

const char *classification_name(Classification c) {
    switch (c) {
        case Classification::kYes:
            return "yes";
        case Classification::kNo:
            return "no";
        case Classification::kOutsidePromise:
            break;
    }
    return "outside_promise";
}

void LocalHamiltonian::validate() const {
    if (num_qubits < 1) throw ValidationError("n_qubits must be positive");
    if (!(alpha > 0 && alpha < beta && beta <= 1)) throw ValidationError("thresholds must satisfy 0 < alpha < beta <= 1");
    if (locality < 1) throw ValidationError("k must be positive");
    if (terms.empty()) throw ValidationError("instance needs at least one term");
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto &t = terms[i];
        const auto pre = term_prefix(i);
        if (t.qubits.empty() || static_cast<int>(t.qubits.size()) > locality) {
            throw ValidationError(pre + "support size must be in [1, k]");
        }
        std::set<int> seen;
        for (int q : t.qubits) {
            if (q < 1 || q > num_qubits) throw ValidationError(pre + "qubit index " + std::to_string(q) + " outside [1, N]");
            if (!seen.insert(q).second) throw ValidationError(pre + "repeated qubit index " + std::to_string(q));
        }
        const auto dim = Eigen::Index{1} << t.qubits.size();
        if (t.matrix.rows() != dim || t.matrix.cols() != dim) {
            throw ValidationError(pre + "matrix must be 2^|S| x 2^|S|");
        }
        if ((t.matrix - t.matrix.adjoint()).cwiseAbs().maxCoeff() > kExactTolerance) {
            throw ValidationError(pre + "matrix is not Hermitian");
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(t.matrix, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -kExactTolerance || es.eigenvalues().maxCoeff() > 1.0 + kExactTolerance) {
            throw ValidationError(pre + "eigenvalues must lie in [0, 1] (found range [" +
                                  std::to_string(es.eigenvalues().minCoeff()) + ", " +
                                  std::to_string(es.eigenvalues().maxCoeff()) + "])");
        }
        if (t.circuit) {
            const int wires = static_cast<int>(t.qubits.size()) + t.circuit->ancillas;
            if (t.circuit->ancillas < 1) throw ValidationError(pre + "circuit needs at least one ancilla");
            for (const auto &step : t.circuit->steps) {
                std::set<int> w(step.wires.begin(), step.wires.end());
                if (static_cast<int>(step.wires.size()) != gate_arity(step.gate) || w.size() != step.wires.size() ||
                    *w.begin() < 0 || *w.rbegin() >= wires) {
                    throw ValidationError(pre + "circuit gate " + gate_name(step.gate) + " has invalid wires");
                }
            }
        }
    }
}

LocalHamiltonian parse_instance(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error &e) {
        throw ValidationError(std::string("instance is not valid JSON: ") + e.what());
    }
    LocalHamiltonian h;
    auto field = [&](const json &obj, const char *name) -> const json & {
        if (!obj.is_object() || !obj.contains(name)) throw ValidationError(std::string("missing field '") + name + "'");
        return obj.at(name);
    };
    try {
        h.num_qubits = field(doc, "n_qubits").get<int>();
        h.alpha = field(doc, "alpha").get<double>();
        h.beta = field(doc, "beta").get<double>();
        h.locality = field(doc, "k").get<int>();
        if (doc.contains("label")) {
            auto l = doc.at("label").get<std::string>();
            if (l == "yes") {
                h.label = InstanceLabel::kYes;
            } else if (l == "no") {
                h.label = InstanceLabel::kNo;
            } else if (l == "unknown") {
                h.label = InstanceLabel::kUnknown;
            } else {
                throw ValidationError("label must be yes, no or unknown");
            }
        }
    } catch (const json::exception &e) {
        throw ValidationError(std::string("instance header has the wrong type: ") + e.what());
    }
    const auto &terms = field(doc, "terms");
    if (!terms.is_array()) throw ValidationError("'terms' must be an array");
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto pre = term_prefix(i);
        LocalTerm term;
        try {
            term.qubits = field(terms[i], "qubits").get<std::vector<int>>();
            const auto &rows = field(terms[i], "matrix");
            const auto n = static_cast<Eigen::Index>(rows.size());
            term.matrix.resize(n, n);
            for (Eigen::Index r = 0; r < n; ++r) {
                if (static_cast<Eigen::Index>(rows[r].size()) != n) throw ValidationError(pre + "matrix is not square");
                for (Eigen::Index c = 0; c < n; ++c) {
                    const auto &e = rows[r][c];
                    if (!e.is_array() || e.size() != 2) throw ValidationError(pre + "matrix entries must be [re, im]");
                    term.matrix(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
                }
            }
            if (terms[i].contains("circuit")) {
                const auto &c = terms[i].at("circuit");
                VerifierCircuit circuit;
                circuit.ancillas = field(c, "ancillas").get<int>();
                for (const auto &g : field(c, "gates")) {
                    circuit.steps.push_back({parse_gate(field(g, "gate").get<std::string>()),
                                             field(g, "wires").get<std::vector<int>>()});
                }
                term.circuit = std::move(circuit);
            }
        } catch (const json::exception &e) {
            throw ValidationError(pre + "wrong field type: " + e.what());
        }
        h.terms.push_back(std::move(term));
    }
    h.validate();
    return h;
}

LocalHamiltonian load_instance(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open instance file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_instance(buffer.str());
}

std::string dump_instance(const LocalHamiltonian &instance) {
    nlohmann::ordered_json doc;
    doc["n_qubits"] = instance.num_qubits;
    doc["alpha"] = instance.alpha;
    doc["beta"] = instance.beta;
    doc["k"] = instance.locality;
    doc["label"] = label_name(instance.label);
    auto terms = nlohmann::ordered_json::array();
    for (const auto &t : instance.terms) {
        nlohmann::ordered_json term;
        term["qubits"] = t.qubits;
        auto rows = nlohmann::ordered_json::array();
        for (Eigen::Index r = 0; r < t.matrix.rows(); ++r) {
            auto row = nlohmann::ordered_json::array();
            for (Eigen::Index c = 0; c < t.matrix.cols(); ++c) {
                row.push_back({t.matrix(r, c).real(), t.matrix(r, c).imag()});
            }
            rows.push_back(std::move(row));
        }
        term["matrix"] = std::move(rows);
        if (t.circuit) {
            nlohmann::ordered_json c;
            c["ancillas"] = t.circuit->ancillas;
            auto gates = nlohmann::ordered_json::array();
            for (const auto &s : t.circuit->steps) gates.push_back({{"gate", gate_name(s.gate)}, {"wires", s.wires}});
            c["gates"] = std::move(gates);
            term["circuit"] = std::move(c);
        }
        terms.push_back(std::move(term));
    }
    doc["terms"] = std::move(terms);
    return doc.dump(2) + "\n";
}

Eigen::MatrixXcd assemble(const LocalHamiltonian &instance) {
    const int n = instance.num_qubits;
    if (n > kMaxDenseHamiltonianQubits) throw ResourceError("dense assembly is limited to 12 qubits");
    const auto dim = std::size_t{1} << n;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (const auto &term : instance.terms) {
        const int k = static_cast<int>(term.qubits.size());
        // Qubit q (1-indexed) is bit n - q of the global index.
        std::size_t support_mask = 0;
        std::vector<int> bits(k);
        for (int j = 0; j < k; ++j) {
            bits[j] = n - term.qubits[j];
            support_mask |= std::size_t{1} << bits[j];
        }
        auto embed = [&](std::size_t outside, std::size_t local) {
            std::size_t x = outside;
            for (int j = 0; j < k; ++j) {
                if ((local >> (k - 1 - j)) & 1U) x |= std::size_t{1} << bits[j];
            }
            return x;
        };
        const std::size_t local_dim = std::size_t{1} << k;
        for (std::size_t outside = 0; outside < dim; ++outside) {
            if (outside & support_mask) continue;
            for (std::size_t a = 0; a < local_dim; ++a) {
                for (std::size_t b = 0; b < local_dim; ++b) {
                    h(static_cast<Eigen::Index>(embed(outside, a)), static_cast<Eigen::Index>(embed(outside, b))) +=
                        term.matrix(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
                }
            }
        }
    }
    return h;
}

double inverse_power_ground_energy(const Eigen::MatrixXcd &hamiltonian, double shift, int max_iterations,
                                   int *iterations) {
    const auto dim = hamiltonian.rows();
    Eigen::MatrixXcd shifted = hamiltonian - shift * Eigen::MatrixXcd::Identity(dim, dim);
    Eigen::LDLT<Eigen::MatrixXcd> solver(shifted);
    if (solver.info() != Eigen::Success || !solver.isPositive()) {
        throw NumericalError("inverse iteration: shift is not below the spectrum");
    }
    Rng rng(0x5eed);
    Eigen::VectorXcd v = random_state(static_cast<std::size_t>(dim), rng);
    double energy = (v.adjoint() * hamiltonian * v)(0, 0).real();
    int it = 0;
    int stable = 0;
    while (it < max_iterations) {
        ++it;
        Eigen::VectorXcd w = solver.solve(v);
        v = w / w.norm();
        double next = (v.adjoint() * hamiltonian * v)(0, 0).real();
        stable = std::abs(next - energy) < 1e-15 ? stable + 1 : 0;
        energy = next;
        if (stable >= 3) break;
    }
    if (iterations) *iterations = it;
    return energy;
}

GroundState ground_energy(const LocalHamiltonian &instance) {
    Eigen::MatrixXcd h = assemble(instance);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
    GroundState g;
    g.energy = es.eigenvalues()(0);
    g.state = es.eigenvectors().col(0);
    Eigen::Index pivot = 0;
    g.state.cwiseAbs().maxCoeff(&pivot);
    g.state *= std::conj(g.state[pivot]) / std::abs(g.state[pivot]);
    g.state /= g.state.norm();
    g.residual = (h * g.state - g.energy * g.state).norm();
    g.power_iteration_energy = inverse_power_ground_energy(h, -0.05, 200000, &g.power_iterations);
    if (std::abs(g.power_iteration_energy - g.energy) > 1e-8) {
        throw NumericalError("eigensolver and inverse iteration disagree: " + std::to_string(g.energy) + " vs " +
                             std::to_string(g.power_iteration_energy));
    }
    return g;
}

Classification classify(const LocalHamiltonian &instance, double lambda_min) {
    const double m = instance.term_count();
    if (lambda_min <= instance.alpha * m + kPromiseSlack) return Classification::kYes;
    if (lambda_min >= instance.beta * m - kPromiseSlack) return Classification::kNo;
    return Classification::kOutsidePromise;
}

Classification classify(const LocalHamiltonian &instance) { return classify(instance, ground_energy(instance).energy); }

VerifierTerm verifier_term(const LocalHamiltonian &instance, int index) {
    if (index < 1 || index > instance.term_count()) throw ValidationError("term index out of range");
    const auto &t = instance.terms[static_cast<std::size_t>(index - 1)];
    VerifierTerm v;
    v.index = index;
    v.qubits = t.qubits;
    v.reject_effect = t.matrix;
    v.accept_effect = Eigen::MatrixXcd::Identity(t.matrix.rows(), t.matrix.cols()) - t.matrix;
    v.circuit = t.circuit ? &*t.circuit : nullptr;
    return v;
}

VerifierTerm sample_term(const LocalHamiltonian &instance, Rng &rng) {
    if (instance.terms.empty()) throw ValidationError("instance has no terms");
    std::uniform_int_distribution<int> pick(1, instance.term_count());
    return verifier_term(instance, pick(rng));
}

double accept_probability(const LocalHamiltonian &instance, int index, const DensityMatrix &rho) {
    const auto term = verifier_term(instance, index);
    if (rho.matrix().rows() != term.reject_effect.rows()) throw ValidationError("accept_probability: dimension mismatch");
    return 1.0 - (term.reject_effect * rho.matrix()).trace().real();
}

double expected_acceptance(const LocalHamiltonian &instance, const Eigen::VectorXcd &state) {
    if (state.size() != (Eigen::Index{1} << instance.num_qubits)) {
        throw ValidationError("state size does not match the instance");
    }
    QuantumSystem system({static_cast<std::size_t>(instance.num_qubits), Execution::kEager});
    auto labels = system.alloc_state(state, Party::kNobody);
    double total = 0;
    for (int i = 1; i <= instance.term_count(); ++i) {
        std::vector<QubitId> support;
        for (int q : instance.terms[static_cast<std::size_t>(i - 1)].qubits) support.push_back(labels[q - 1]);
        total += accept_probability(instance, i, system.reduced_density(support));
    }
    return total / instance.term_count();
}

bool apply_verifier_circuit(QuantumSystem &system, const VerifierCircuit &circuit,
                            std::span<const QubitId> term_labels, Rng &rng) {
    if (circuit.ancillas < 1) throw ValidationError("circuit needs at least one ancilla");
    auto ancillas = system.alloc_register(static_cast<std::size_t>(circuit.ancillas), Party::kVerifier);
    std::vector<QubitId> wires(term_labels.begin(), term_labels.end());
    wires.insert(wires.end(), ancillas.begin(), ancillas.end());
    for (const auto &step : circuit.steps) {
        if (static_cast<int>(step.wires.size()) != gate_arity(step.gate)) {
            throw ValidationError(std::string("gate ") + gate_name(step.gate) + " has the wrong number of wires");
        }
        std::vector<QubitId> targets;
        for (int w : step.wires) {
            if (w < 0 || w >= static_cast<int>(wires.size())) throw ValidationError("circuit wire out of range");
            targets.push_back(wires[static_cast<std::size_t>(w)]);
        }
        system.apply(gate_operator(step.gate), targets);
    }
    const QubitId output = ancillas.front();
    return system.measure(std::span<const QubitId>(&output, 1), rng) == "1";
}

LocalHamiltonian pinning_instance(int qubits) {
    LocalHamiltonian h{qubits, 0.1, 0.9, 1, {}, InstanceLabel::kYes};
    for (int q = 1; q <= qubits; ++q) h.terms.push_back({{q}, projector_one(), std::nullopt});
    h.validate();
    return h;
}

LocalHamiltonian frustrated_instance(int qubits, double alpha, double beta) {
    LocalHamiltonian h{qubits, alpha, beta, 1, {}, InstanceLabel::kUnknown};
    for (int q = 1; q <= qubits; ++q) {
        h.terms.push_back({{q}, projector_zero(), std::nullopt});
        h.terms.push_back({{q}, projector_one(), std::nullopt});
    }
    h.validate();
    // Every state has energy m / 2.
    h.label = beta <= 0.5 ? InstanceLabel::kNo : InstanceLabel::kUnknown;
    return h;
}

LocalHamiltonian calibrated_no_instance() {
    LocalHamiltonian h{4, 0.1, 0.9, 1, {}, InstanceLabel::kNo};
    const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(2, 2);
    for (int q : {1, 2, 3, 4, 1, 2, 3, 4, 1}) h.terms.push_back({{q}, identity, std::nullopt});
    h.terms.push_back({{2}, projector_one(), std::nullopt});
    h.validate();
    return h;
}

LocalHamiltonian random_two_local_instance(int qubits, int terms, std::uint64_t seed) {
    if (qubits < 2 || terms < 1) throw ValidationError("random instance needs >= 2 qubits and >= 1 term");
    LocalHamiltonian h{qubits, 0.1, 0.9, 2, {}, InstanceLabel::kUnknown};
    Rng rng(seed);
    std::uniform_int_distribution<int> pick(1, qubits);
    for (int i = 0; i < terms; ++i) {
        int a = pick(rng);
        int b = pick(rng);
        while (b == a) b = pick(rng);
        Eigen::VectorXcd v = random_state(4, rng);
        Eigen::MatrixXcd p = v * v.adjoint();
        p = (0.5 * (p + p.adjoint())).eval();
        h.terms.push_back({{a, b}, p, std::nullopt});
    }
    h.validate();
    switch (classify(h)) {
        case Classification::kYes:
            h.label = InstanceLabel::kYes;
            break;
        case Classification::kNo:
            h.label = InstanceLabel::kNo;
            break;
        case Classification::kOutsidePromise:
            break;
    }
    return h;
}

}  // namespace qmt
