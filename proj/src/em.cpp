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
#include "annet/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "annet/metrics.hpp"
#include "annet/parallel.hpp"
#include "annet/random.hpp"

namespace annet {
namespace {

// Upper ends of the uniform relative boost on each diagonal affinity at
// start. Even restarts start near neutral, which keeps the metadata prior in
// charge early on; odd restarts start assortative enough for BP to leave the
// uninformative fixed point when the structure is only moderately strong.
constexpr double kNeutralBoost = 0.5;
constexpr double kAssortativeBoost = 3.0;

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

Prior random_prior(std::size_t k, const MetadataColumn& metadata, int degree, Rng& rng) {
    Prior prior = uniform_prior(k, metadata, degree);
    Matrix& gamma = std::visit([](auto& p) -> Matrix& { return p.gamma; }, prior);
    for (std::size_t c = 0; c < gamma.cols(); ++c) {
        double sum = 0.0;
        for (std::size_t s = 0; s < k; ++s) {
            gamma(s, c) = -std::log1p(-rng.uniform());
            sum += gamma(s, c);
        }
        for (std::size_t s = 0; s < k; ++s) gamma(s, c) /= sum;
    }
    return prior;
}

BlockAffinity random_theta(std::size_t k, std::size_t edges, std::size_t restart, Rng& rng) {
    const double base = 1.0 / static_cast<double>(std::max<std::size_t>(2 * edges, 1));
    BlockAffinity theta(k, base);
    const double spread = restart % 2 == 0 ? kNeutralBoost : kAssortativeBoost;
    for (std::size_t s = 0; s < k; ++s) theta.theta(s, s) = base * (1.0 + rng.uniform(0.0, spread));
    return theta;
}

const Matrix& gamma_of(const Prior& prior) {
    return std::visit([](const auto& p) -> const Matrix& { return p.gamma; }, prior);
}

Matrix& gamma_of(Prior& prior) {
    return std::visit([](auto& p) -> Matrix& { return p.gamma; }, prior);
}

/// theta * scale followed by gamma, the coordinates used for extrapolation.
/// Scaling theta by 2m puts both blocks on a unit scale.
std::vector<double> flat_parameters(const BlockAffinity& theta, const Prior& prior, double scale) {
    std::vector<double> out;
    for (double v : theta.theta.data()) out.push_back(v * scale);
    const auto& gamma = gamma_of(prior).data();
    out.insert(out.end(), gamma.begin(), gamma.end());
    return out;
}

/// Inverse of flat_parameters, projected back to valid parameters: theta is
/// floored and each gamma column is clipped at zero and renormalized.
void set_flat_parameters(const std::vector<double>& values, double scale, BlockAffinity& theta, Prior& prior) {
    std::size_t i = 0;
    for (double& v : theta.theta.data()) v = std::max(values[i++] / scale, kThetaFloor);
    Matrix& gamma = gamma_of(prior);
    for (double& v : gamma.data()) v = std::max(values[i++], 0.0);
    for (std::size_t c = 0; c < gamma.cols(); ++c) {
        double sum = 0.0;
        for (std::size_t s = 0; s < gamma.rows(); ++s) sum += gamma(s, c);
        for (std::size_t s = 0; s < gamma.rows(); ++s) {
            gamma(s, c) = sum > 0.0 ? gamma(s, c) / sum : 1.0 / static_cast<double>(gamma.rows());
        }
    }
}

double parameter_change(const BlockAffinity& old_theta, const BlockAffinity& new_theta, const Prior& old_prior,
                        const Prior& new_prior) {
    const auto& a = old_theta.theta.data();
    const auto& b = new_theta.theta.data();
    const double scale = std::max(*std::max_element(b.begin(), b.end()), kThetaFloor);
    double change = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) change = std::max(change, std::abs(a[i] - b[i]) / scale);
    const auto& g0 = gamma_of(old_prior).data();
    const auto& g1 = gamma_of(new_prior).data();
    for (std::size_t i = 0; i < g0.size(); ++i) change = std::max(change, std::abs(g0[i] - g1[i]));
    return change;
}

void check_fit_inputs(const Graph& graph, const MetadataColumn& metadata, const FitConfig& config) {
    config.validate();
    if (metadata.size() != graph.node_count()) {
        throw InputError("metadata has " + std::to_string(metadata.size()) + " nodes, graph has " +
                         std::to_string(graph.node_count()));
    }
    if (config.k > graph.node_count()) {
        throw InputError("k = " + std::to_string(config.k) + " exceeds node count " +
                         std::to_string(graph.node_count()));
    }
}

}  // namespace

void FitConfig::validate() const {
    if (k < 1) throw InputError("k must be at least 1");
    if (restarts < 1) throw InputError("restarts must be at least 1");
    if (max_em_steps < 1) throw InputError("max_em_steps must be at least 1");
    if (max_bp_steps < 1) throw InputError("max_bp_steps must be at least 1");
    if (!(bp_tol > 0.0) || !(em_tol > 0.0)) throw InputError("tolerances must be positive");
    if (bernstein_degree < 0) throw InputError("Bernstein degree must be non-negative");
    if (threads < 1) throw InputError("threads must be at least 1");
}

ThetaUpdate m_step_theta(const Graph& graph, const Marginals& marginals) {
    const std::size_t k = marginals.k();
    if (marginals.node.rows() != graph.node_count() || marginals.edge.rows() != graph.edge_count()) {
        throw InputError("marginals do not match graph");
    }
    Matrix counts(k, k, 0.0);
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
        for (std::size_t s = 0; s < k; ++s) {
            for (std::size_t t = 0; t < k; ++t) {
                const double q = marginals.edge_joint(e, s, t);
                counts(s, t) += q;
                counts(t, s) += q;
            }
        }
    }
    std::vector<double> mass(k, 0.0);
    for (NodeId u = 0; u < graph.node_count(); ++u) {
        const auto d = static_cast<double>(graph.degree(u));
        for (std::size_t s = 0; s < k; ++s) mass[s] += d * marginals.node(u, s);
    }

    ThetaUpdate update{BlockAffinity(k, kThetaFloor), {}, 0.0};
    for (std::size_t s = 0; s < k; ++s) {
        if (!(mass[s] > 0.0)) update.empty_communities.push_back(s);
    }
    for (std::size_t s = 0; s < k; ++s) {
        for (std::size_t t = 0; t < k; ++t) {
            if (!(mass[s] > 0.0) || !(mass[t] > 0.0)) continue;
            const double value = 0.5 * (counts(s, t) + counts(t, s)) / (mass[s] * mass[t]);
            update.mass += value * mass[s] * mass[t];
            update.theta.theta(s, t) = std::max(value, kThetaFloor);
        }
    }
    return update;
}

BetheTerms bethe_terms(const Graph& graph, const BlockAffinity& theta, const Matrix& prior_values,
                       const Marginals& marginals) {
    const std::size_t k = marginals.k();
    if (theta.k() != k || prior_values.cols() != k || prior_values.rows() != graph.node_count() ||
        marginals.node.rows() != graph.node_count() || marginals.edge.rows() != graph.edge_count()) {
        throw InputError("bethe_terms: inconsistent dimensions");
    }
    BetheTerms terms;
    for (EdgeId e = 0; e < graph.edge_count(); ++e) {
        for (std::size_t s = 0; s < k; ++s) {
            for (std::size_t t = 0; t < k; ++t) {
                const double q = marginals.edge_joint(e, s, t);
                if (q <= 0.0) continue;
                // Each undirected edge appears twice in sum_uv; with theta
                // symmetric both orientations contribute the same amount.
                terms.edge_energy += q * std::log(theta(s, t));
                terms.edge_entropy -= q * std::log(q);
            }
        }
    }
    for (NodeId u = 0; u < graph.node_count(); ++u) {
        const double weight = static_cast<double>(graph.degree(u)) - 1.0;
        for (std::size_t s = 0; s < k; ++s) {
            const double q = marginals.node(u, s);
            const double p = prior_values(u, s);
            terms.node_entropy += weight * xlogx(q);
            terms.prior_self += xlogx(p);
            if (q > 0.0) terms.prior_energy += q * std::log(p);
        }
    }
    return terms;
}

double bethe_log_likelihood(const Graph& graph, const BlockAffinity& theta, const Matrix& prior_values,
                            const Marginals& marginals) {
    return bethe_terms(graph, theta, prior_values, marginals).total();
}

double bethe_log_likelihood(const Graph& graph, const BlockAffinity& theta, const Prior& prior,
                            const Marginals& marginals, const MetadataColumn& metadata) {
    return bethe_log_likelihood(graph, theta, prior_values(prior, metadata), marginals);
}

std::vector<std::size_t> hard_assignment(const Matrix& node_marginals) {
    std::vector<std::size_t> out(node_marginals.rows());
    for (std::size_t u = 0; u < out.size(); ++u) out[u] = argmax(node_marginals.row(u));
    return out;
}

FitResult fit_restart(const Graph& graph, const MetadataColumn& metadata, const FitConfig& config,
                      std::size_t index) {
    check_fit_inputs(graph, metadata, config);
    const std::uint64_t seed = derive_seed(config.seed, index);
    Rng rng(seed);

    FitResult result;
    result.restart_index = index;
    result.prior = random_prior(config.k, metadata, config.bernstein_degree, rng);
    result.theta = random_theta(config.k, graph.edge_count(), index, rng);
    Messages messages = init_messages(graph, prior_values(result.prior, metadata), rng.engine()());

    const BpOptions bp_options{config.max_bp_steps, config.bp_tol, 0.0, config.numerics};
    // Parameters the next E-step starts from; after an extrapolation these
    // are not the output of an M-step.
    BlockAffinity theta = result.theta;
    Prior prior = result.prior;
    const double theta_scale = 2.0 * static_cast<double>(std::max<std::size_t>(graph.edge_count(), 1));
    // Applies one EM step to (theta, prior), records it, and reports whether
    // the step moved the parameters by less than em_tol.
    auto step = [&]() {
        const Matrix priors = prior_values(prior, metadata);
        BpResult bp = run_bp(graph, theta, priors, messages, bp_options);
        ThetaUpdate theta_update = m_step_theta(graph, bp.marginals);
        Prior next_prior;
        if (std::holds_alternative<DiscretePrior>(prior)) {
            next_prior = m_step_gamma_discrete(bp.marginals.node, metadata);
        } else {
            next_prior = m_step_gamma_ordered(bp.marginals.node, metadata, std::get<BernsteinPrior>(prior), config.inner)
                             .prior;
        }
        const double change = parameter_change(theta, theta_update.theta, prior, next_prior);
        result.theta = std::move(theta_update.theta);
        result.prior = std::move(next_prior);
        result.marginals = std::move(bp.marginals);
        ++result.em_steps;
        result.log_likelihood =
            bethe_log_likelihood(graph, result.theta, prior_values(result.prior, metadata), result.marginals);
        result.likelihood_trace.push_back(result.log_likelihood);
        theta = result.theta;
        prior = result.prior;
        result.converged = change < config.em_tol;
        return result.converged;
    };

    while (result.em_steps < config.max_em_steps) {
        const std::vector<double> start = flat_parameters(theta, prior, theta_scale);
        if (step() || result.em_steps >= config.max_em_steps) break;
        if (!config.accelerate) continue;
        const std::vector<double> first = flat_parameters(theta, prior, theta_scale);
        if (step() || result.em_steps >= config.max_em_steps) break;
        const std::vector<double> second = flat_parameters(theta, prior, theta_scale);
        // Squared extrapolation along the last two EM moves.
        double r2 = 0.0;
        double v2 = 0.0;
        for (std::size_t i = 0; i < start.size(); ++i) {
            const double r = first[i] - start[i];
            const double v = second[i] - 2.0 * first[i] + start[i];
            r2 += r * r;
            v2 += v * v;
        }
        if (!(v2 > 0.0) || !(r2 > 0.0)) continue;
        const double alpha = std::min(-std::sqrt(r2 / v2), -1.0);
        std::vector<double> jump(start.size());
        for (std::size_t i = 0; i < start.size(); ++i) {
            const double r = first[i] - start[i];
            const double v = second[i] - 2.0 * first[i] + start[i];
            jump[i] = start[i] - 2.0 * alpha * r + alpha * alpha * v;
        }
        if (std::all_of(jump.begin(), jump.end(), [](double x) { return std::isfinite(x); })) {
            set_flat_parameters(jump, theta_scale, theta, prior);
        }
    }
    if (!std::isfinite(result.log_likelihood)) throw NumericalError("log-likelihood is not finite");

    result.assignment = hard_assignment(result.marginals.node);
    if (metadata.kind() == MetadataKind::discrete) {
        result.nmi_vs_metadata = nmi(std::span<const std::size_t>(result.assignment),
                                     std::span<const std::size_t>(metadata.categories()));
    }
    result.restarts.push_back({index, seed, result.log_likelihood, result.converged, result.em_steps});
    return result;
}

FitResult fit(const Graph& graph, const MetadataColumn& metadata, const FitConfig& config) {
    check_fit_inputs(graph, metadata, config);
    const auto count = static_cast<std::size_t>(config.restarts);
    std::vector<FitResult> runs(count);
    std::vector<std::string> failures(count);
    parallel_for(count, config.reproducible ? 1 : config.threads, [&](std::size_t r) {
        try {
            runs[r] = fit_restart(graph, metadata, config, r);
        } catch (const NumericalError& e) {
            // A degenerate start is a failed restart, not a failed fit.
            failures[r] = e.what();
            runs[r].restart_index = r;
            runs[r].log_likelihood = -std::numeric_limits<double>::infinity();
            runs[r].restarts.push_back({r, derive_seed(config.seed, r), runs[r].log_likelihood, false, 0});
        }
    });

    std::optional<std::size_t> best;
    for (std::size_t r = 0; r < count; ++r) {
        if (!runs[r].converged) continue;
        if (!best || runs[r].log_likelihood > runs[*best].log_likelihood) best = r;
    }
    if (!best) {
        for (std::size_t r = 0; r < count; ++r) {
            if (!failures[r].empty()) continue;
            if (!best || runs[r].log_likelihood > runs[*best].log_likelihood) best = r;
        }
    }
    if (!best) throw NumericalError("every restart failed: " + failures.front());
    std::vector<RestartSummary> summaries;
    for (const FitResult& run : runs) summaries.push_back(run.restarts.front());
    FitResult chosen = std::move(runs[*best]);
    chosen.restarts = std::move(summaries);
    return chosen;
}

Prediction predict_from_metadata(const DiscretePrior& prior, std::optional<std::size_t> category) {
    if (!category || *category >= prior.category_count()) {
        return {std::vector<double>(prior.k(), 1.0 / static_cast<double>(prior.k())), true};
    }
    return {eval_prior(prior, *category), false};
}

Prediction predict_from_metadata(const BernsteinPrior& prior, const RescaleTransform& transform, double raw) {
    if (!std::isfinite(raw)) throw InputError("ordered metadata value must be finite");
    return {eval_prior(prior, transform.apply(raw)), false};
}

}  // namespace annet
