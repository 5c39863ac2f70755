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
#pragma once

#include <span>
#include <vector>

#include "annet/metadata.hpp"
#include "annet/prior.hpp"

namespace annet {

/// Joint counts of two labelings. Labels are compacted to 0..k-1 in order of
/// first appearance.
class ContingencyTable {
public:
    template <typename A, typename B>
    ContingencyTable(std::span<const A> a, std::span<const B> b);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t total() const { return total_; }
    std::size_t count(std::size_t i, std::size_t j) const { return counts_[i * cols_ + j]; }
    std::size_t row_sum(std::size_t i) const;
    std::size_t col_sum(std::size_t j) const;

private:
    void build(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t total_ = 0;
    std::vector<std::size_t> counts_;
};

/// Shannon entropy in bits of a labeling.
double entropy_bits(std::span<const std::size_t> labels);

/// Mutual information divided by the smaller of the two entropies (bits).
/// Zero when either labeling is constant. Throws InputError on length
/// mismatch or empty input.
double nmi(std::span<const std::size_t> a, std::span<const std::size_t> b);
double nmi(std::span<const int> a, std::span<const int> b);

/// -(1/n) sum_u sum_s gamma(s, x_u) log2 gamma(s, x_u).
double conditional_entropy_model(const DiscretePrior& prior, const MetadataColumn& metadata);

/// Largest fraction of matching nodes over all relabelings of the
/// assignment's communities. Labels must lie in [0, k); k <= 10.
double fraction_correct(std::span<const std::size_t> assignment, std::span<const std::size_t> truth, std::size_t k);

}  // namespace annet
