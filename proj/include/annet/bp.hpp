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

#include <cstdint>
#include <span>
#include <vector>

#include "annet/common.hpp"
#include "annet/graph.hpp"
#include "annet/prior.hpp"

namespace annet {

/// Posterior marginals. `node` is n x k. `edge` holds one k x k block per
/// undirected edge (graph.edges() order), oriented so that entry (s, t) is
/// the joint probability of the lower-numbered endpoint in s and the higher
/// one in t.
struct Marginals {
    Matrix node;
    Matrix edge;

    std::size_t k() const { return node.cols(); }
    double edge_joint(EdgeId e, std::size_t s, std::size_t t) const { return edge(e, s * k() + t); }
    std::span<const double> edge_block(EdgeId e) const { return edge.row(e); }
};

/// Belief propagation state.
///
/// `cavity` row `slot` is the message eta^{u->v} for the directed slot u->v
/// of the graph. `beliefs` are the current node marginals and `field` holds
/// H_s = sum_t theta_st sum_w d_w q_t^w, so that the non-edge field acting on
/// node u is h_s(u) = d_u H_s.
struct Messages {
    Matrix cavity;
    Matrix beliefs;
    std::vector<double> field;

    std::size_t k() const { return beliefs.cols(); }
};

enum class BpNumerics {
    automatic,  ///< log space when k >= 8 or some |log theta| > 30
    linear,
    log,
};

struct BpOptions {
    int max_steps = 20;
    double tol = 1e-6;
    /// Weight of the previous message in each update; 0 disables damping.
    double damping = 0.0;
    BpNumerics numerics = BpNumerics::automatic;
};

struct BpResult {
    Marginals marginals;
    int sweeps = 0;
    bool converged = false;
    double max_delta = 0.0;
};

/// Every message starts at its sender's prior, multiplied entrywise by
/// 1 + noise * U(-1, 1) and renormalized. Beliefs start at the priors.
Messages init_messages(const Graph& graph, const Matrix& prior_values, std::uint64_t seed, double noise = 0.1);

/// One asynchronous pass over the nodes in index order. For each node u the
/// outgoing messages
///   eta^{u->v}_s ~ prior_s(u) exp(-h_s(u)) prod_{w in N(u)\v} sum_t theta_st eta^{w->u}_t
/// are written back immediately, and u's belief is refreshed. The field is
/// rebuilt from the beliefs at the start of the pass and then updated in O(k^2)
/// after each node's belief changes. Returns the
/// largest absolute change of any message entry.
double bp_sweep(const Graph& graph, const BlockAffinity& theta, const Matrix& prior_values, Messages& messages,
                BpNumerics numerics = BpNumerics::automatic, double damping = 0.0);

/// Node and edge marginals implied by the current messages.
Marginals compute_marginals(const Graph& graph, const BlockAffinity& theta, const Matrix& prior_values,
                            Messages& messages, BpNumerics numerics = BpNumerics::automatic);

/// Sweeps until the largest message change falls below options.tol or
/// options.max_steps sweeps have run. Non-convergence is reported through
/// BpResult::converged, not thrown.
BpResult run_bp(const Graph& graph, const BlockAffinity& theta, const Matrix& prior_values, Messages& messages,
                const BpOptions& options = {});

/// Fresh start from init_messages(seed).
BpResult run_bp(const Graph& graph, const BlockAffinity& theta, const Matrix& prior_values, std::uint64_t seed,
                const BpOptions& options = {});

struct ExactPosterior {
    Marginals marginals;
    /// log sum_s P(A | theta, s) P(s | prior) under the full Bernoulli model.
    double log_likelihood = 0.0;
};

/// Brute-force posterior by enumerating all k^n assignments with the full
/// Bernoulli likelihood prod_{u<v} p_uv^a_uv (1 - p_uv)^(1 - a_uv),
/// p_uv = d_u d_v theta(s_u, s_v). Intended as a test oracle; refuses
/// instances with k^n > 2^24 and parameters that make some p_uv >= 1.
ExactPosterior exact_marginals(const Graph& graph, const BlockAffinity& theta, const Matrix& prior_values);

}  // namespace annet
