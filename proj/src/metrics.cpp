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
#include "annet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace annet {
namespace {

template <typename T>
std::vector<std::size_t> compact(std::span<const T> labels) {
    std::unordered_map<T, std::size_t> index;
    std::vector<std::size_t> out;
    out.reserve(labels.size());
    for (const T& label : labels) {
        auto [it, inserted] = index.emplace(label, index.size());
        out.push_back(it->second);
    }
    return out;
}

double plogp_bits(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

}  // namespace

template <typename A, typename B>
ContingencyTable::ContingencyTable(std::span<const A> a, std::span<const B> b) {
    if (a.size() != b.size()) throw InputError("labelings have different lengths");
    build(compact(a), compact(b));
}

template ContingencyTable::ContingencyTable(std::span<const std::size_t>, std::span<const std::size_t>);
template ContingencyTable::ContingencyTable(std::span<const int>, std::span<const int>);

void ContingencyTable::build(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    rows_ = a.empty() ? 0 : *std::max_element(a.begin(), a.end()) + 1;
    cols_ = b.empty() ? 0 : *std::max_element(b.begin(), b.end()) + 1;
    total_ = a.size();
    counts_.assign(rows_ * cols_, 0);
    for (std::size_t i = 0; i < a.size(); ++i) ++counts_[a[i] * cols_ + b[i]];
}

std::size_t ContingencyTable::row_sum(std::size_t i) const {
    std::size_t sum = 0;
    for (std::size_t j = 0; j < cols_; ++j) sum += count(i, j);
    return sum;
}

std::size_t ContingencyTable::col_sum(std::size_t j) const {
    std::size_t sum = 0;
    for (std::size_t i = 0; i < rows_; ++i) sum += count(i, j);
    return sum;
}

double entropy_bits(std::span<const std::size_t> labels) {
    if (labels.empty()) return 0.0;
    const std::vector<std::size_t> c = compact(labels);
    std::vector<std::size_t> counts(*std::max_element(c.begin(), c.end()) + 1, 0);
    for (std::size_t x : c) ++counts[x];
    double h = 0.0;
    const auto n = static_cast<double>(labels.size());
    for (std::size_t count : counts) h -= plogp_bits(static_cast<double>(count) / n);
    return h;
}

namespace {

double nmi_from_table(const ContingencyTable& table) {
    if (table.total() == 0) throw InputError("nmi of empty labelings");
    const auto n = static_cast<double>(table.total());
    double ha = 0.0;
    double hb = 0.0;
    for (std::size_t i = 0; i < table.rows(); ++i) ha -= plogp_bits(static_cast<double>(table.row_sum(i)) / n);
    for (std::size_t j = 0; j < table.cols(); ++j) hb -= plogp_bits(static_cast<double>(table.col_sum(j)) / n);
    double joint = 0.0;
    for (std::size_t i = 0; i < table.rows(); ++i) {
        for (std::size_t j = 0; j < table.cols(); ++j) joint -= plogp_bits(static_cast<double>(table.count(i, j)) / n);
    }
    const double lower = std::min(ha, hb);
    if (lower <= 0.0) return 0.0;
    const double mutual = ha + hb - joint;
    return std::clamp(mutual / lower, 0.0, 1.0);
}

}  // namespace

double nmi(std::span<const std::size_t> a, std::span<const std::size_t> b) {
    return nmi_from_table(ContingencyTable(a, b));
}

double nmi(std::span<const int> a, std::span<const int> b) { return nmi_from_table(ContingencyTable(a, b)); }

double conditional_entropy_model(const DiscretePrior& prior, const MetadataColumn& metadata) {
    if (metadata.kind() != MetadataKind::discrete) throw InputError("conditional entropy needs discrete metadata");
    if (prior.category_count() != metadata.category_count()) {
        throw InputError("prior and metadata disagree on the number of categories");
    }
    if (metadata.size() == 0) return 0.0;
    double h = 0.0;
    for (std::size_t u = 0; u < metadata.size(); ++u) {
        const std::size_t x = metadata.category(u);
        for (std::size_t s = 0; s < prior.k(); ++s) h -= plogp_bits(prior.gamma(s, x));
    }
    return h / static_cast<double>(metadata.size());
}

double fraction_correct(std::span<const std::size_t> assignment, std::span<const std::size_t> truth, std::size_t k) {
    if (assignment.size() != truth.size()) throw InputError("labelings have different lengths");
    if (k == 0 || k > 10) throw InputError("fraction_correct supports 1 <= k <= 10; use nmi for larger k");
    if (assignment.empty()) return 0.0;
    std::vector<std::size_t> counts(k * k, 0);
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] >= k || truth[i] >= k) throw InputError("label outside [0, k)");
        ++counts[assignment[i] * k + truth[i]];
    }
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::size_t best = 0;
    do {
        std::size_t matched = 0;
        for (std::size_t s = 0; s < k; ++s) matched += counts[s * k + perm[s]];
        best = std::max(best, matched);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(assignment.size());
}

}  // namespace annet
