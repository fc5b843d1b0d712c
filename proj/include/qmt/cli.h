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

#ifndef QMT_CLI_H
#define QMT_CLI_H

namespace qmt {

/// Entry point of the `qmt` tool. Exit codes: 0 success, 2 invalid input
/// or resource limits, 1 anything else.
int run_main(int argc, char **argv);

}  // namespace qmt

#endif  // QMT_CLI_H
