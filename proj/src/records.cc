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

#include "qmt/records.h"

#include <istream>
#include <ostream>

#include "qmt/error.h"

namespace qmt {

namespace {

constexpr std::string_view kConfigPrefix = "# config ";
constexpr std::string_view kSummaryPrefix = "# summary ";

bool needs_quotes(const std::string &s) {
    if (s.empty()) return true;
    if (s.find_first_of(",\"\n\r") != std::string::npos) return true;
    // Strings that would read back as numbers, booleans or null.
    return Record::accept(s) && !Record::parse(s).is_structured();
}

std::string csv_cell(const Record &value) {
    if (value.is_null()) return "";
    if (!value.is_string()) return value.dump();
    const auto &s = value.get_ref<const std::string &>();
    if (!needs_quotes(s)) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::pair<std::string, bool>> split_csv(const std::string &line) {
    std::vector<std::pair<std::string, bool>> cells;
    std::string cell;
    bool quoted = false;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (c == '"') {
                in_quotes = false;
            } else {
                cell += c;
            }
        } else if (c == '"') {
            in_quotes = quoted = true;
        } else if (c == ',') {
            cells.emplace_back(std::move(cell), quoted);
            cell.clear();
            quoted = false;
        } else {
            cell += c;
        }
    }
    cells.emplace_back(std::move(cell), quoted);
    return cells;
}

Record read_cell(const std::string &text, bool quoted) {
    if (quoted) return text;
    if (text.empty()) return nullptr;
    if (Record::accept(text)) {
        Record v = Record::parse(text);
        if (!v.is_structured()) return v;
    }
    return text;
}

}  // namespace

OutputFormat parse_format(std::string_view name) {
    if (name == "csv") return OutputFormat::kCsv;
    if (name == "jsonl") return OutputFormat::kJsonl;
    throw ValidationError("format must be csv or jsonl");
}

void emit_records(std::ostream &out, OutputFormat format, const RecordSet &records) {
    auto ordered_row = [&](const Record &row) {
        Record r = Record::object();
        for (const auto &c : records.columns) r[c] = row.contains(c) ? row.at(c) : Record(nullptr);
        return r;
    };
    if (format == OutputFormat::kCsv) {
        out << kConfigPrefix << records.config.dump() << '\n';
        for (std::size_t i = 0; i < records.columns.size(); ++i) out << (i ? "," : "") << records.columns[i];
        out << '\n';
        for (const auto &row : records.rows) {
            const Record r = ordered_row(row);
            std::size_t i = 0;
            for (const auto &[key, value] : r.items()) out << (i++ ? "," : "") << csv_cell(value);
            out << '\n';
        }
        out << kSummaryPrefix << records.summary.dump() << '\n';
        return;
    }
    auto tagged = [](const char *kind, const Record &body) {
        Record r = Record::object();
        r["record"] = kind;
        for (const auto &[key, value] : body.items()) r[key] = value;
        return r;
    };
    out << tagged("config", records.config).dump() << '\n';
    for (const auto &row : records.rows) out << tagged("trial", ordered_row(row)).dump() << '\n';
    out << tagged("summary", records.summary).dump() << '\n';
}

RecordSet parse_records(std::istream &in, OutputFormat format) {
    RecordSet set;
    std::string line;
    if (format == OutputFormat::kCsv) {
        bool have_columns = false;
        while (std::getline(in, line)) {
            if (line.rfind(kConfigPrefix, 0) == 0) {
                set.config = Record::parse(line.substr(kConfigPrefix.size()));
            } else if (line.rfind(kSummaryPrefix, 0) == 0) {
                set.summary = Record::parse(line.substr(kSummaryPrefix.size()));
            } else if (!have_columns) {
                if (!line.empty()) {
                    for (auto &[name, quoted] : split_csv(line)) set.columns.push_back(name);
                }
                have_columns = true;
            } else {
                const auto cells = split_csv(line);
                if (cells.size() != set.columns.size()) throw ValidationError("CSV row has the wrong column count");
                Record row = Record::object();
                for (std::size_t i = 0; i < cells.size(); ++i) {
                    row[set.columns[i]] = read_cell(cells[i].first, cells[i].second);
                }
                set.rows.push_back(std::move(row));
            }
        }
        return set;
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Record r = Record::parse(line);
        const std::string kind = r.at("record").get<std::string>();
        r.erase("record");
        if (kind == "config") {
            set.config = std::move(r);
        } else if (kind == "summary") {
            set.summary = std::move(r);
        } else {
            if (set.columns.empty()) {
                for (const auto &[key, value] : r.items()) set.columns.push_back(key);
            }
            set.rows.push_back(std::move(r));
        }
    }
    return set;
}

}  // namespace qmt
