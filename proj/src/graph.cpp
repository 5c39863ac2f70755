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
#include "annet/graph.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

namespace annet {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_id(std::string_view token, std::uint64_t& out) {
    if (token.empty()) return false;
    const auto* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, out);
    return ec == std::errc() && ptr == end;
}

std::string line_error(std::size_t line, const std::string& what) {
    return "edge list line " + std::to_string(line) + ": " + what;
}

}  // namespace

Graph Graph::from_edges(std::size_t node_count, std::span<const Edge> edges) {
    if (node_count > std::numeric_limits<NodeId>::max()) {
        throw InputError("graph too large: " + std::to_string(node_count) + " nodes");
    }
    std::vector<Edge> sorted;
    sorted.reserve(edges.size());
    for (const Edge& e : edges) {
        if (e.u == e.v) throw InputError("self-loop at node " + std::to_string(e.u));
        if (e.u >= node_count || e.v >= node_count) {
            throw InputError("edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                             ") exceeds node count " + std::to_string(node_count));
        }
        sorted.push_back({std::min(e.u, e.v), std::max(e.u, e.v)});
    }
    std::sort(sorted.begin(), sorted.end(), [](const Edge& a, const Edge& b) {
        return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i] == sorted[i - 1]) {
            throw InputError("duplicate edge (" + std::to_string(sorted[i].u) + ", " +
                             std::to_string(sorted[i].v) + ")");
        }
    }

    Graph g;
    g.edges_ = std::move(sorted);
    g.degrees_.assign(node_count, 0);
    for (const Edge& e : g.edges_) {
        ++g.degrees_[e.u];
        ++g.degrees_[e.v];
    }
    g.offsets_.assign(node_count + 1, 0);
    for (std::size_t u = 0; u < node_count; ++u) g.offsets_[u + 1] = g.offsets_[u] + g.degrees_[u];

    const std::size_t slots = 2 * g.edges_.size();
    g.targets_.resize(slots);
    g.edge_of_.resize(slots);
    g.reverse_.resize(slots);
    std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
    // Edges are sorted by (u, v). Placing every lower neighbor before any
    // upper neighbor keeps each list sorted.
    std::vector<std::size_t> slot_u(g.edges_.size()), slot_v(g.edges_.size());
    // Lower neighbors: for edge (u, v) with u < v, u is a lower neighbor of v.
    for (std::size_t id = 0; id < g.edges_.size(); ++id) {
        const Edge& e = g.edges_[id];
        slot_v[id] = fill[e.v]++;
        g.targets_[slot_v[id]] = e.u;
        g.edge_of_[slot_v[id]] = static_cast<EdgeId>(id);
    }
    for (std::size_t id = 0; id < g.edges_.size(); ++id) {
        const Edge& e = g.edges_[id];
        slot_u[id] = fill[e.u]++;
        g.targets_[slot_u[id]] = e.v;
        g.edge_of_[slot_u[id]] = static_cast<EdgeId>(id);
    }
    for (std::size_t id = 0; id < g.edges_.size(); ++id) {
        g.reverse_[slot_u[id]] = slot_v[id];
        g.reverse_[slot_v[id]] = slot_u[id];
    }
    return g;
}

std::size_t Graph::max_degree() const {
    return degrees_.empty() ? 0 : *std::max_element(degrees_.begin(), degrees_.end());
}

Graph load_edge_list(std::istream& in, const EdgeListOptions& options) {
    std::vector<Edge> edges;
    std::vector<std::size_t> line_of;
    std::size_t node_count = options.min_nodes;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '#') {
            std::istringstream directive{std::string(line.substr(1))};
            std::string key;
            std::uint64_t value = 0;
            if (directive >> key && key == "nodes" && directive >> value) {
                node_count = std::max<std::size_t>(node_count, value);
            }
            continue;
        }
        const auto split = line.find_first_of(" \t");
        std::uint64_t u = 0;
        std::uint64_t v = 0;
        if (split == std::string_view::npos || !parse_id(line.substr(0, split), u) ||
            !parse_id(trim(line.substr(split)), v)) {
            throw InputError(line_error(line_no, "expected two non-negative integer ids, got '" +
                                                     std::string(line) + "'"));
        }
        if (u == v) throw InputError(line_error(line_no, "self-loop at node " + std::to_string(u)));
        if (std::max(u, v) >= std::numeric_limits<NodeId>::max()) {
            throw InputError(line_error(line_no, "node id too large"));
        }
        edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
        line_of.push_back(line_no);
        node_count = std::max<std::size_t>(node_count, std::max(u, v) + 1);
    }

    // Report duplicates with the line of the second occurrence.
    std::vector<std::size_t> order(edges.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto key = [&](std::size_t i) {
        return std::pair{std::min(edges[i].u, edges[i].v), std::max(edges[i].u, edges[i].v)};
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (key(order[i]) == key(order[i - 1])) {
            const auto [a, b] = key(order[i]);
            throw InputError(line_error(line_of[order[i]],
                                        "duplicate edge (" + std::to_string(a) + ", " +
                                            std::to_string(b) + "), first seen on line " +
                                            std::to_string(line_of[order[i - 1]])));
        }
    }
    return Graph::from_edges(node_count, edges);
}

void write_edge_list(std::ostream& out, const Graph& graph) {
    out << "# nodes " << graph.node_count() << '\n';
    for (const Edge& e : graph.edges()) out << e.u << ' ' << e.v << '\n';
}

}  // namespace annet
