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

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "annet/common.hpp"

namespace annet {

enum class MetadataKind { discrete, ordered };

/// Label of the category that collects nodes without a metadata value.
inline constexpr std::string_view kMissingLabel = "missing";

/// Affine map from raw ordered values onto [0, 1].
struct RescaleTransform {
    double min = 0.0;
    double max = 0.0;

    /// Maps a raw value into [0, 1], clamping values outside the training
    /// range. A degenerate range (min == max) maps everything to 0.5.
    double apply(double raw) const;
};

/// Per-node annotation accompanying a graph.
///
/// Discrete columns store a category index in [0, K) per node together with
/// the label of each category; ordered columns store the raw value, its
/// rescaled image in [0, 1] and a missing flag.
class MetadataColumn {
public:
    MetadataColumn() = default;

    /// Discrete column from category indices and their labels. Labels must be
    /// unique and every index must be < labels.size().
    static MetadataColumn discrete(std::vector<std::size_t> categories, std::vector<std::string> labels);

    /// Ordered column; min/max are taken over non-missing values.
    static MetadataColumn ordered(std::vector<double> raw, std::vector<bool> missing);

    /// Single-category column; equivalent to fitting without metadata.
    static MetadataColumn constant(std::size_t node_count);

    MetadataKind kind() const { return kind_; }
    std::size_t size() const { return size_; }

    // Discrete accessors.
    std::size_t category_count() const { return labels_.size(); }
    std::size_t category(std::size_t node) const { return categories_[node]; }
    const std::vector<std::size_t>& categories() const { return categories_; }
    const std::vector<std::string>& labels() const { return labels_; }
    std::optional<std::size_t> find_category(std::string_view label) const;

    // Ordered accessors.
    double value(std::size_t node) const { return scaled_[node]; }
    double raw_value(std::size_t node) const { return raw_[node]; }
    bool missing(std::size_t node) const { return missing_[node]; }
    const RescaleTransform& transform() const { return transform_; }

private:
    MetadataKind kind_ = MetadataKind::discrete;
    std::size_t size_ = 0;
    std::vector<std::size_t> categories_;
    std::vector<std::string> labels_;
    std::vector<double> raw_;
    std::vector<double> scaled_;
    std::vector<bool> missing_;
    RescaleTransform transform_;
};

/// Reads a `node,value` CSV (header required) for a graph with `node_count`
/// nodes. Discrete: labels become categories in order of first appearance;
/// empty or absent values go to the "missing" category. Ordered: values are
/// parsed as reals and min-max rescaled; empty or absent values are flagged
/// missing.
MetadataColumn load_metadata(std::istream& in, MetadataKind kind, std::size_t node_count);

/// Reads a `node,label` CSV into integer labels (labels mapped to indices in
/// order of first appearance). Every node in [0, n) must appear exactly once,
/// where n is one more than the largest node id.
std::vector<int> load_labels(std::istream& in);

/// Writes `node,value` rows; missing values are written as empty fields.
void write_metadata(std::ostream& out, const MetadataColumn& column);

}  // namespace annet
