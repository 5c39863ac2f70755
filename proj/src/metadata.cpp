/*
Copyright 2026 The annet Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#include "annet/metadata.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <unordered_map>

namespace annet {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Row {
    std::size_t line;
    std::uint64_t node;
    std::string value;
};

std::string csv_error(std::size_t line, const std::string& what) {
    return "csv line " + std::to_string(line) + ": " + what;
}

// Two-column CSV reader. The value field may be double-quoted (with "" as an
// escaped quote); the node field is a plain integer.
std::vector<Row> read_rows(std::istream& in, std::string_view value_column) {
    std::vector<Row> rows;
    std::string raw;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string_view::npos) {
            throw InputError(csv_error(line_no, "expected two comma-separated fields"));
        }
        const std::string_view first = trim(line.substr(0, comma));
        std::string_view second = trim(line.substr(comma + 1));
        if (!header_seen) {
            header_seen = true;
            if (first != "node" || second != value_column) {
                throw InputError(csv_error(line_no, "expected header 'node," + std::string(value_column) + "'"));
            }
            continue;
        }
        std::string value;
        if (!second.empty() && second.front() == '"') {
            if (second.size() < 2 || second.back() != '"') {
                throw InputError(csv_error(line_no, "unterminated quoted field"));
            }
            second = second.substr(1, second.size() - 2);
            for (std::size_t i = 0; i < second.size(); ++i) {
                value.push_back(second[i]);
                if (second[i] == '"' && i + 1 < second.size() && second[i + 1] == '"') ++i;
            }
        } else {
            if (second.find(',') != std::string_view::npos) {
                throw InputError(csv_error(line_no, "too many fields"));
            }
            value = std::string(second);
        }
        std::uint64_t node = 0;
        const auto* end = first.data() + first.size();
        auto [ptr, ec] = std::from_chars(first.data(), end, node);
        if (first.empty() || ec != std::errc() || ptr != end) {
            throw InputError(csv_error(line_no, "invalid node id '" + std::string(first) + "'"));
        }
        rows.push_back({line_no, node, std::move(value)});
    }
    if (!header_seen) throw InputError("csv: missing header");
    return rows;
}

bool parse_real(std::string_view s, double& out) {
    // std::from_chars for double is not available on every toolchain we
    // target; strtod on a bounded copy is equivalent here.
    const std::string copy(s);
    char* end = nullptr;
    errno = 0;
    out = std::strtod(copy.c_str(), &end);
    return !copy.empty() && end == copy.c_str() + copy.size() && errno == 0 && std::isfinite(out);
}

}  // namespace

double RescaleTransform::apply(double raw) const {
    if (!(max > min)) return 0.5;
    return std::clamp((raw - min) / (max - min), 0.0, 1.0);
}

MetadataColumn MetadataColumn::discrete(std::vector<std::size_t> categories, std::vector<std::string> labels) {
    if (labels.empty()) throw InputError("discrete metadata needs at least one category");
    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!seen.emplace(labels[i], i).second) throw InputError("duplicate category label '" + labels[i] + "'");
    }
    for (std::size_t c : categories) {
        if (c >= labels.size()) throw InputError("category index out of range");
    }
    MetadataColumn col;
    col.kind_ = MetadataKind::discrete;
    col.size_ = categories.size();
    col.categories_ = std::move(categories);
    col.labels_ = std::move(labels);
    return col;
}

MetadataColumn MetadataColumn::ordered(std::vector<double> raw, std::vector<bool> missing) {
    if (raw.size() != missing.size()) throw InputError("ordered metadata: value/missing size mismatch");
    MetadataColumn col;
    col.kind_ = MetadataKind::ordered;
    col.size_ = raw.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (missing[i]) continue;
        if (!std::isfinite(raw[i])) throw InputError("ordered metadata: non-finite value at node " + std::to_string(i));
        lo = std::min(lo, raw[i]);
        hi = std::max(hi, raw[i]);
    }
    if (lo > hi) lo = hi = 0.0;  // all missing
    col.transform_ = {lo, hi};
    col.scaled_.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        col.scaled_[i] = missing[i] ? 0.5 : col.transform_.apply(raw[i]);
    }
    col.raw_ = std::move(raw);
    col.missing_ = std::move(missing);
    return col;
}

MetadataColumn MetadataColumn::constant(std::size_t node_count) {
    return discrete(std::vector<std::size_t>(node_count, 0), {"all"});
}

std::optional<std::size_t> MetadataColumn::find_category(std::string_view label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] == label) return i;
    }
    return std::nullopt;
}

MetadataColumn load_metadata(std::istream& in, MetadataKind kind, std::size_t node_count) {
    const std::vector<Row> rows = read_rows(in, "value");
    std::vector<std::size_t> row_line(node_count, 0);
    for (const Row& r : rows) {
        if (r.node >= node_count) {
            throw InputError(csv_error(r.line, "node " + std::to_string(r.node) + " out of range (n = " +
                                                   std::to_string(node_count) + ")"));
        }
        if (row_line[r.node] != 0) {
            throw InputError(csv_error(r.line, "duplicate row for node " + std::to_string(r.node) +
                                                   " (first on line " + std::to_string(row_line[r.node]) + ")"));
        }
        row_line[r.node] = r.line;
    }

    if (kind == MetadataKind::discrete) {
        std::vector<std::string> labels;
        std::unordered_map<std::string, std::size_t> index;
        auto category_of = [&](const std::string& label) {
            auto [it, inserted] = index.emplace(label, labels.size());
            if (inserted) labels.push_back(label);
            return it->second;
        };
        constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
        std::vector<std::size_t> categories(node_count, kUnset);
        for (const Row& r : rows) {
            categories[r.node] = category_of(r.value.empty() ? std::string(kMissingLabel) : r.value);
        }
        for (auto& c : categories) {
            if (c == kUnset) c = category_of(std::string(kMissingLabel));
        }
        if (labels.empty()) labels.emplace_back(kMissingLabel);
        return MetadataColumn::discrete(std::move(categories), std::move(labels));
    }

    std::vector<double> raw(node_count, 0.0);
    std::vector<bool> missing(node_count, true);
    for (const Row& r : rows) {
        if (r.value.empty()) continue;
        double x = 0.0;
        if (!parse_real(r.value, x)) throw InputError(csv_error(r.line, "cannot parse '" + r.value + "' as a real"));
        raw[r.node] = x;
        missing[r.node] = false;
    }
    return MetadataColumn::ordered(std::move(raw), std::move(missing));
}

std::vector<int> load_labels(std::istream& in) {
    const std::vector<Row> rows = read_rows(in, "label");
    std::map<std::uint64_t, const Row*> by_node;
    for (const Row& r : rows) {
        if (!by_node.emplace(r.node, &r).second) {
            throw InputError(csv_error(r.line, "duplicate row for node " + std::to_string(r.node)));
        }
    }
    const std::size_t n = by_node.empty() ? 0 : by_node.rbegin()->first + 1;
    if (by_node.size() != n) throw InputError("label file does not cover nodes 0.." + std::to_string(n - 1));
    std::unordered_map<std::string, int> index;
    std::vector<int> labels;
    labels.reserve(n);
    for (const auto& [node, row] : by_node) {
        auto [it, inserted] = index.emplace(row->value, static_cast<int>(index.size()));
        labels.push_back(it->second);
    }
    return labels;
}

void write_metadata(std::ostream& out, const MetadataColumn& column) {
    out << "node,value\n";
    for (std::size_t u = 0; u < column.size(); ++u) {
        out << u << ',';
        if (column.kind() == MetadataKind::discrete) {
            const std::string& label = column.labels()[column.category(u)];
            if (label != kMissingLabel) {
                if (label.find_first_of(",\"") != std::string::npos) {
                    out << '"';
                    for (char c : label) {
                        if (c == '"') out << '"';
                        out << c;
                    }
                    out << '"';
                } else {
                    out << label;
                }
            }
        } else if (!column.missing(u)) {
            out.precision(17);
            out << column.raw_value(u);
        }
        out << '\n';
    }
}

}  // namespace annet
