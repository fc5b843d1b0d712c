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

#ifndef QMT_RECORDS_H
#define QMT_RECORDS_H

#include <iosfwd>
#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

namespace qmt {

enum class OutputFormat { kCsv, kJsonl };

/// `csv` or `jsonl`.
OutputFormat parse_format(std::string_view name);

using Record = nlohmann::ordered_json;

/// One experiment's output: a config header, per-trial rows, a summary.
///
/// CSV layout:
///   # config {...}
///   col1,col2,...
///   v1,v2,...
///   # summary {...}
/// JSON lines: one object per line with "record" set to config, trial or
/// summary; trial objects hold exactly the declared columns.
struct RecordSet {
    Record config = Record::object();
    std::vector<std::string> columns;
    std::vector<Record> rows;
    Record summary = Record::object();
};

void emit_records(std::ostream &out, OutputFormat format, const RecordSet &records);

/// Inverse of emit_records. Unquoted CSV cells are read as JSON scalars when
/// they parse as one and as strings otherwise; empty cells are null.
RecordSet parse_records(std::istream &in, OutputFormat format);

}  // namespace qmt

#endif  // QMT_RECORDS_H
