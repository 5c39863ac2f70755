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
#include <span>
#include <utility>
#include <vector>

#include "annet/common.hpp"

namespace annet {

struct Edge {
    NodeId u;
    NodeId v;
    bool operator==(const Edge&) const = default;
};

/// Immutable undirected simple graph in compressed sparse row form.
///
/// Every undirected edge {u, v} occupies two directed slots, one in the
/// neighbor list of each endpoint. Slots are the natural index for per
/// directed edge state such as belief propagation messages; `reverse(e)`
/// maps the slot of u->v to the slot of v->u and `edge_of(e)` maps a slot to
/// the undirected edge id. Undirected edges are numbered in lexicographic
/// order of (min, max) endpoint.
class Graph {
public:
    Graph() = default;

    /// Builds and validates a graph. Rejects self-loops, duplicate edges and
    /// endpoints >= node_count with InputError.
    static Graph from_edges(std::size_t node_count, std::span<const Edge> edges);

    std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t edge_count() const { return edges_.size(); }
    std::size_t slot_count() const { return targets_.size(); }

    std::size_t degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }
    std::span<const std::size_t> degrees() const { return degrees_; }

    /// Directed slots of u are [slot_begin(u), slot_end(u)).
    std::size_t slot_begin(NodeId u) const { return offsets_[u]; }
    std::size_t slot_end(NodeId u) const { return offsets_[u + 1]; }

    NodeId target(std::size_t slot) const { return targets_[slot]; }
    std::size_t reverse(std::size_t slot) const { return reverse_[slot]; }
    EdgeId edge_of(std::size_t slot) const { return edge_of_[slot]; }

    /// Sorted neighbor list.
    std::span<const NodeId> neighbors(NodeId u) const {
        return {targets_.data() + offsets_[u], degree(u)};
    }

    /// Undirected edges with u < v, sorted.
    std::span<const Edge> edges() const { return edges_; }

    std::size_t max_degree() const;

private:
    std::vector<std::size_t> offsets_;
    std::vector<NodeId> targets_;
    std::vector<std::size_t> reverse_;
    std::vector<EdgeId> edge_of_;
    std::vector<std::size_t> degrees_;
    std::vector<Edge> edges_;
};

struct EdgeListOptions {
    /// Lower bound on the node count; trailing isolated nodes beyond the
    /// largest id mentioned in the file need this (or a `# nodes N` line).
    std::size_t min_nodes = 0;
};

/// Reads "u v" lines with 0-based ids. Lines starting with '#' are comments;
/// a comment of the form "# nodes N" raises the node count to at least N.
/// Errors carry the offending line number.
Graph load_edge_list(std::istream& in, const EdgeListOptions& options = {});

/// Writes the graph in the format read by load_edge_list, including a
/// "# nodes N" header so isolated trailing nodes survive a round trip.
void write_edge_list(std::ostream& out, const Graph& graph);

}  // namespace annet
