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

// Regenerates the shipped instance files:
//   qmt_make_instances <output-dir>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "qmt/hamiltonian.h"

namespace {

void save(const std::filesystem::path &dir, const std::string &name, const qmt::LocalHamiltonian &h) {
    std::ofstream out(dir / (name + ".json"));
    out << qmt::dump_instance(h);
    if (!out) throw std::runtime_error("failed writing " + name);
    std::cout << name << ": n=" << h.num_qubits << " m=" << h.term_count() << " label=" << qmt::label_name(h.label)
              << '\n';
}

}  // namespace

int main(int argc, char **argv) {
    if (argc != 2) {
        std::cerr << "usage: qmt_make_instances <output-dir>\n";
        return 2;
    }
    const std::filesystem::path dir(argv[1]);
    std::filesystem::create_directories(dir);
    try {
        save(dir, "pinning_4q", qmt::pinning_instance(4));
        save(dir, "frustrated_4q", qmt::frustrated_instance(4));
        save(dir, "calibrated_no_4q", qmt::calibrated_no_instance());
        for (int s = 1; s <= 10; ++s) {
            save(dir, "random2local_6q_s" + std::to_string(s), qmt::random_two_local_instance(6, 8, s));
        }
    } catch (const std::exception &e) {
        std::cerr << e.what() << '\n';
        return 1;
    }
    return 0;
}
