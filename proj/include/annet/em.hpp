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
#include <optional>
#include <vector>

#include "annet/bp.hpp"
#include "annet/graph.hpp"
#include "annet/metadata.hpp"
#include "annet/prior.hpp"

namespace annet {

struct FitConfig {
    std::size_t k = 2;
    int restarts = 10;
    int max_em_steps = 100;
    int max_bp_steps = 20;
    double bp_tol = 1e-6;
    /// EM stops once the largest parameter change (theta relative to its
    /// largest entry, gamma absolute) falls below this.
    double em_tol = 1e-6;
    /// Squared extrapolation of (theta, gamma) after every two EM
    /// steps. Plain EM relaxes slowly along near-flat likelihood directions
    /// such as community-size asymmetry.
    bool accelerate = true;
    std::uint64_t seed = 1;
    int bernstein_degree = 4;
    /// Forces restarts to run on one thread.
    bool reproducible = false;
    std::size_t threads = 1;
    InnerLoopOptions inner;
    BpNumerics numerics = BpNumerics::automatic;

    /// Throws InputError when a count is < 1 or a tolerance is not positive.
    void validate() const;
};

struct RestartSummary {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    double log_likelihood = 0.0;
    bool converged = false;
    int em_steps = 0;
};

struct FitResult {
    BlockAffinity theta;
    Prior prior;
    Marginals marginals;
    std::vector<std::size_t> assignment;
    double log_likelihood = 0.0;
    bool converged = false;
    int em_steps = 0;
    std::size_t restart_index = 0;
    /// NMI between the assignment and discrete metadata; empty for ordered
    /// metadata.
    std::optional<double> nmi_vs_metadata;
    std::vector<RestartSummary> restarts;
    /// Bethe log-likelihood after every EM step of the selected restart.
    std::vector<double> likelihood_trace;
};

struct ThetaUpdate {
    BlockAffinity theta;
    /// Communities with zero expected degree mass; their rows and columns
    /// are set to kThetaFloor.
    std::vector<std::size_t> empty_communities;
    /// sum_st theta_st D_s D_t before flooring, D_s = sum_u d_u q_s^u. Equals
    /// 2m whenever no community is empty.
    double mass = 0.0;
};

/// theta_st = sum_uv a_uv q_st^uv / (D_s D_t), floored at kThetaFloor.
ThetaUpdate m_step_theta(const Graph& graph, const Marginals& marginals);

/// Components of the Bethe log-likelihood (natural logs, constants that
/// depend only on the graph dropped).
struct BetheTerms {
    double edge_energy = 0.0;    ///< 1/2 sum_st log theta_st sum_uv a_uv q_st^uv
    double prior_energy = 0.0;   ///< sum_us q_s^u log P(s | x_u)
    double edge_entropy = 0.0;   ///< -1/2 sum_uv a_uv sum_st q_st^uv log q_st^uv
    double node_entropy = 0.0;   ///< sum_u (d_u - 1) sum_s q_s^u log q_s^u
    /// sum_us P(s | x_u) log P(s | x_u). Not part of total(); coincides with
    /// prior_energy for discrete metadata when gamma is the M-step optimum
    /// for the same marginals.
    double prior_self = 0.0;

    double total() const { return edge_energy + prior_energy + edge_entropy + node_entropy; }
};

BetheTerms bethe_terms(const Graph& graph, const BlockAffinity& theta, const Matrix& prior_values,
                       const Marginals& marginals);

/// Bethe estimate of log P(A | theta, prior) with graph-only constants
/// dropped; comparable across runs on the same graph only.
double bethe_log_likelihood(const Graph& graph, const BlockAffinity& theta, const Matrix& prior_values,
                            const Marginals& marginals);
double bethe_log_likelihood(const Graph& graph, const BlockAffinity& theta, const Prior& prior,
                            const Marginals& marginals, const MetadataColumn& metadata);

/// Per-node argmax; ties go to the lowest community index.
std::vector<std::size_t> hard_assignment(const Matrix& node_marginals);

/// One EM run from the random start derived from (config.seed, index).
FitResult fit_restart(const Graph& graph, const MetadataColumn& metadata, const FitConfig& config,
                      std::size_t index);

/// Runs config.restarts independent EM runs and returns the converged run
/// with the highest Bethe log-likelihood (lowest index on ties). When no run
/// converges the best run overall is returned with converged = false.
FitResult fit(const Graph& graph, const MetadataColumn& metadata, const FitConfig& config);

struct Prediction {
    std::vector<double> probabilities;
    /// Set when the value was unknown and the uniform distribution was used.
    bool fallback = false;
};

/// Community probabilities for a node known only by its metadata category;
/// an unknown category (nullopt or out of range) yields the uniform
/// distribution with fallback set.
Prediction predict_from_metadata(const DiscretePrior& prior, std::optional<std::size_t> category);

/// Same for ordered metadata; `raw` is mapped through the training transform
/// and clamped into [0, 1].
Prediction predict_from_metadata(const BernsteinPrior& prior, const RescaleTransform& transform, double raw);

}  // namespace annet
