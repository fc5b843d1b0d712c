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

#include "qmt/oracle.h"

#include <cmath>
#include <random>

#include "qmt/error.h"

namespace qmt {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::shared_ptr<const Operator> brickwork_circuit(int qubits, int depth, Rng &rng) {
    std::vector<Operator::CircuitGate> gates;
    for (int layer = 0; layer < depth; ++layer) {
        for (int q = layer % 2; q + 1 < qubits; q += 2) {
            gates.push_back({{q, q + 1}, sample_haar_unitary(4, rng)});
        }
    }
    return Operator::circuit(qubits, std::move(gates));
}

struct Moments {
    double sum = 0;
    double sum_sq = 0;
    int n = 0;
    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++n;
    }
    double mean() const { return n ? sum / n : 0.0; }
    double stderr_of_mean() const {
        if (n < 2) return 0.0;
        double var = (sum_sq - sum * sum / n) / (n - 1);
        return std::sqrt(std::max(var, 0.0) / n);
    }
};

}  // namespace

OracleSpec OracleSpec::parse(std::string_view text) {
    if (text == "haar") return {OracleKind::kHaar, 0};
    if (text == "oh") return {OracleKind::kXorHash, 0};
    if (text == "identity") return {OracleKind::kIdentity, 0};
    constexpr std::string_view kCircuit = "circuit:";
    if (text.substr(0, kCircuit.size()) == kCircuit) {
        auto digits = std::string(text.substr(kCircuit.size()));
        std::size_t used = 0;
        int depth = 0;
        try {
            depth = std::stoi(digits, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used == 0 || used != digits.size() || depth < 1) {
            throw ValidationError("oracle: circuit depth must be a positive integer in '" + std::string(text) + "'");
        }
        return {OracleKind::kRandomCircuit, depth};
    }
    throw ValidationError("oracle: unknown kind '" + std::string(text) + "' (expected haar, circuit:<depth>, oh, identity)");
}

std::string OracleSpec::name() const {
    switch (kind) {
        case OracleKind::kHaar:
            return "haar";
        case OracleKind::kRandomCircuit:
            return "circuit:" + std::to_string(depth);
        case OracleKind::kXorHash:
            return "oh";
        case OracleKind::kIdentity:
            break;
    }
    return "identity";
}

Eigen::MatrixXcd sample_haar_isometry(std::size_t rows, std::size_t cols, Rng &rng) {
    if (cols == 0 || cols > rows) throw ValidationError("isometry needs 0 < cols <= rows");
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXcd ginibre(rows, cols);
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t r = 0; r < rows; ++r) ginibre(r, c) = Complex(normal(rng), normal(rng));
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(ginibre);
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(rows, cols);
    // Without this phase fix the QR factor is not Haar distributed.
    for (std::size_t c = 0; c < cols; ++c) {
        Complex d = qr.matrixQR()(c, c);
        double a = std::abs(d);
        q.col(c) *= a > 0 ? d / a : Complex(1.0);
    }
    return q;
}

Eigen::MatrixXcd sample_haar_unitary(std::size_t dim, Rng &rng) {
    if (!is_power_of_two(dim) || dim < 2) throw ValidationError("Haar dimension must be a power of two >= 2");
    if (dim > (std::size_t{1} << kMaxDenseOracleQubits)) throw ResourceError("Haar dimension above the dense cap");
    return sample_haar_isometry(dim, dim, rng);
}

Oracle Oracle::build(const OracleSpec &spec, int block_size, std::uint64_t seed) {
    if (block_size < 1) throw ValidationError("block size must be positive");
    Oracle o;
    o.spec_ = spec;
    o.block_size_ = block_size;
    o.seed_ = seed;
    const int lambda = 3 * block_size;
    Rng rng(seed);
    switch (spec.kind) {
        case OracleKind::kHaar:
            if (lambda > kMaxDenseOracleQubits) throw ResourceError("haar oracle above the dense cap (3b <= 12)");
            o.op_ = Operator::dense(sample_haar_unitary(std::size_t{1} << lambda, rng));
            break;
        case OracleKind::kRandomCircuit:
            if (spec.depth < 1) throw ValidationError("random circuit depth must be positive");
            o.op_ = brickwork_circuit(lambda, spec.depth, rng);
            break;
        case OracleKind::kXorHash: {
            if (block_size > kMaxHashBlock) throw ResourceError("oh oracle block size above table cap (b <= 6)");
            const std::uint32_t inputs = 1U << (2 * block_size);
            std::uniform_int_distribution<std::uint32_t> out(0, (1U << block_size) - 1);
            o.hash_.resize(inputs);
            for (auto &h : o.hash_) h = out(rng);
            std::vector<std::uint32_t> image(std::size_t{1} << lambda);
            for (std::uint32_t x = 0; x < inputs; ++x) {
                for (std::uint32_t y = 0; y < (1U << block_size); ++y) {
                    image[(x << block_size) | y] = (x << block_size) | (y ^ o.hash_[x]);
                }
            }
            o.op_ = Operator::permutation(lambda, std::move(image));
            break;
        }
        case OracleKind::kIdentity:
            break;
    }
    return o;
}

Oracle Oracle::from_unitary(const Eigen::MatrixXcd &u, int block_size) {
    if (block_size < 1 || u.rows() != (Eigen::Index{1} << (3 * block_size))) {
        throw ValidationError("oracle unitary must act on 3b qubits");
    }
    Oracle o;
    o.spec_ = {OracleKind::kHaar, 0};
    o.block_size_ = block_size;
    o.op_ = Operator::dense(u);
    return o;
}

void Oracle::query(QuantumSystem &system, std::span<const QubitId> labels, QueryDirection direction) {
    if (static_cast<int>(labels.size()) != arity()) {
        throw UsageError("oracle query needs " + std::to_string(arity()) + " qubits, got " +
                         std::to_string(labels.size()));
    }
    system.check_labels(labels);
    if (direction == QueryDirection::kForward) {
        ++counts_.forward;
    } else {
        ++counts_.inverse;
    }
    if (op_) system.apply(op_, labels, direction == QueryDirection::kInverse);
}

Eigen::MatrixXcd Oracle::dense_matrix() const {
    if (arity() > kMaxDenseOracleQubits) throw ResourceError("oracle too large for a dense matrix");
    if (!op_) return Eigen::MatrixXcd::Identity(Eigen::Index{1} << arity(), Eigen::Index{1} << arity());
    return op_->to_matrix();
}

Eigen::MatrixXcd sample_backend_unitary(const OracleSpec &spec, int qubits, Rng &rng) {
    if (qubits < 1 || qubits > kMaxDenseOracleQubits) throw ResourceError("qubit count outside the dense range");
    const auto dim = std::size_t{1} << qubits;
    switch (spec.kind) {
        case OracleKind::kHaar:
            return sample_haar_unitary(dim, rng);
        case OracleKind::kRandomCircuit:
            if (qubits < 2) throw ValidationError("random circuits need at least two qubits");
            return brickwork_circuit(qubits, spec.depth, rng)->to_matrix();
        case OracleKind::kXorHash: {
            if (qubits % 3 != 0) throw ValidationError("oh oracle needs a qubit count divisible by 3");
            return Oracle::build(spec, qubits / 3, rng()).dense_matrix();
        }
        case OracleKind::kIdentity:
            break;
    }
    return Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

HaarStatistics haar_statistics(const OracleSpec &spec, int qubits, int samples, std::uint64_t seed) {
    if (samples < 100) throw ValidationError("haar statistics need at least 100 samples");
    HaarStatistics report;
    report.kind = spec.name();
    report.qubits = qubits;
    report.samples = samples;
    const double dim = std::ldexp(1.0, qubits);
    report.haar_abs2_u00 = 1.0 / dim;
    report.haar_abs4_u00 = 2.0 / (dim * (dim + 1.0));

    Moments abs2, abs4, frame;
    Eigen::MatrixXcd previous;
    for (int s = 0; s < samples; ++s) {
        Rng rng = make_rng(seed, Stream::kOracle, static_cast<std::uint64_t>(s));
        Eigen::MatrixXcd u = sample_backend_unitary(spec, qubits, rng);
        double a = std::norm(u(0, 0));
        abs2.add(a);
        abs4.add(a * a);
        report.max_unitarity_defect = std::max(report.max_unitarity_defect, unitarity_defect(u));
        if (s % 2 == 1) {
            double overlap = std::norm((previous.adjoint() * u).trace());
            frame.add(overlap * overlap);
        }
        previous = std::move(u);
    }
    report.mean_abs2_u00 = abs2.mean();
    report.stderr_abs2_u00 = abs2.stderr_of_mean();
    report.mean_abs4_u00 = abs4.mean();
    report.stderr_abs4_u00 = abs4.stderr_of_mean();
    report.frame_potential_t2 = frame.mean();
    report.stderr_frame_potential_t2 = frame.stderr_of_mean();
    return report;
}

}  // namespace qmt
