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
#include "annet/bp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "annet/random.hpp"

namespace annet {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kRescaleBelow = 1e-200;

void check_inputs(const Graph& graph, const BlockAffinity& theta, const Matrix& prior_values) {
    if (prior_values.rows() != graph.node_count()) throw InputError("prior table does not match node count");
    if (theta.k() != prior_values.cols()) throw InputError("theta and prior table disagree on k");
    if (theta.k() == 0) throw InputError("k must be at least 1");
}

void check_state(const Graph& graph, const Messages& messages, std::size_t k) {
    if (messages.cavity.rows() != graph.slot_count() || messages.beliefs.rows() != graph.node_count() ||
        messages.k() != k || (graph.slot_count() > 0 && messages.cavity.cols() != k)) {
        throw InputError("message state does not match graph");
    }
}

bool use_log_space(const BlockAffinity& theta, BpNumerics numerics) {
    if (numerics != BpNumerics::automatic) return numerics == BpNumerics::log;
    if (theta.k() >= 8) return true;
    for (double v : theta.theta.data()) {
        if (!(v > 0.0) || std::abs(std::log(v)) > 30.0) return true;
    }
    return false;
}

/// Degree-weighted belief mass per community.
std::vector<double> community_mass(const Graph& graph, const Messages& messages, std::size_t k) {
    std::vector<double> mass(k, 0.0);
    for (NodeId w = 0; w < graph.node_count(); ++w) {
        const auto d = static_cast<double>(graph.degree(w));
        if (d == 0.0) continue;
        for (std::size_t t = 0; t < k; ++t) mass[t] += d * messages.beliefs(w, t);
    }
    return mass;
}

void field_from_mass(const BlockAffinity& theta, const std::vector<double>& mass, Messages& messages) {
    const std::size_t k = theta.k();
    messages.field.assign(k, 0.0);
    for (std::size_t s = 0; s < k; ++s) {
        for (std::size_t t = 0; t < k; ++t) messages.field[s] += theta(s, t) * mass[t];
    }
}

void refresh_field(const Graph& graph, const BlockAffinity& theta, Messages& messages) {
    field_from_mass(theta, community_mass(graph, messages, theta.k()), messages);
}

void softmax_in_place(std::span<double> logs) {
    const double top = *std::max_element(logs.begin(), logs.end());
    if (top == kNegInf || !std::isfinite(top)) {
        throw NumericalError("belief propagation produced an all-zero message (degenerate theta?)");
    }
    double sum = 0.0;
    for (double& x : logs) {
        x = std::exp(x - top);
        sum += x;
    }
    for (double& x : logs) x /= sum;
}

void normalize_checked(std::span<double> v) {
    const double sum = normalize(v);
    if (!(sum > 0.0) || !std::isfinite(sum)) {
        throw NumericalError("belief propagation produced an all-zero message (degenerate theta?)");
    }
}

/// Combines the prior, the field and every incoming factor of one node.
/// Factors that are exactly zero are counted rather than multiplied so that
/// cavities can still be formed by division.
class NodeCombiner {
public:
    NodeCombiner(std::size_t k, bool log_space) : k_(k), log_space_(log_space), total_(k), zeros_(k) {}

    void gather(const Graph& graph, const BlockAffinity& theta, const Matrix& prior_values, const Messages& messages,
                NodeId u) {
        const std::size_t begin = graph.slot_begin(u);
        const std::size_t degree = graph.slot_end(u) - begin;
        factors_.resize(degree * k_);
        const auto d = static_cast<double>(degree);
        double min_field = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < k_; ++s) min_field = std::min(min_field, d * messages.field[s]);
        std::fill(zeros_.begin(), zeros_.end(), 0);
        for (std::size_t s = 0; s < k_; ++s) {
            const double field = -(d * messages.field[s] - min_field);
            const double p = prior_values(u, s);
            total_[s] = log_space_ ? (p > 0.0 ? std::log(p) : kNegInf) + field : p * std::exp(field);
        }
        for (std::size_t i = 0; i < degree; ++i) {
            const auto incoming = messages.cavity.row(graph.reverse(begin + i));
            double* f = factors_.data() + i * k_;
            double top = 0.0;
            for (std::size_t s = 0; s < k_; ++s) {
                double acc = 0.0;
                for (std::size_t t = 0; t < k_; ++t) acc += theta(s, t) * incoming[t];
                f[s] = acc;
                top = std::max(top, acc);
            }
            for (std::size_t s = 0; s < k_; ++s) {
                const double scaled = top > 0.0 ? f[s] / top : 0.0;
                if (scaled > 0.0) {
                    if (log_space_) {
                        f[s] = std::log(scaled);
                        total_[s] += f[s];
                    } else {
                        f[s] = scaled;
                        total_[s] *= scaled;
                    }
                } else {
                    f[s] = log_space_ ? kNegInf : 0.0;
                    ++zeros_[s];
                }
            }
            if (!log_space_) {
                const double big = *std::max_element(total_.begin(), total_.end());
                if (big > 0.0 && big < kRescaleBelow) {
                    for (double& x : total_) x /= big;
                }
            }
        }
    }

    /// Message to the i-th neighbor (all factors except the i-th), normalized.
    void cavity(std::size_t i, std::span<double> out) const {
        const double* f = factors_.data() + i * k_;
        for (std::size_t s = 0; s < k_; ++s) {
            const bool excluded_zero = log_space_ ? f[s] == kNegInf : f[s] == 0.0;
            if (zeros_[s] == 0) {
                out[s] = log_space_ ? total_[s] - f[s] : total_[s] / f[s];
            } else if (zeros_[s] == 1 && excluded_zero) {
                out[s] = total_[s];
            } else {
                out[s] = log_space_ ? kNegInf : 0.0;
            }
        }
        finish(out);
    }

    /// Node belief (all factors), normalized.
    void belief(std::span<double> out) const {
        for (std::size_t s = 0; s < k_; ++s) {
            out[s] = zeros_[s] == 0 ? total_[s] : (log_space_ ? kNegInf : 0.0);
        }
        finish(out);
    }

private:
    void finish(std::span<double> out) const {
        if (log_space_) {
            softmax_in_place(out);
        } else {
            normalize_checked(out);
        }
    }

    std::size_t k_;
    bool log_space_;
    std::vector<double> total_;
    std::vector<int> zeros_;
    std::vector<double> factors_;
};

void isolated_belief(const Matrix& prior_values, NodeId u, std::span<double> out) {
    for (std::size_t s = 0; s < out.size(); ++s) out[s] = prior_values(u, s);
    normalize_checked(out);
}

}  // namespace

Messages init_messages(const Graph& graph, const Matrix& prior_values, std::uint64_t seed, double noise) {
    if (prior_values.rows() != graph.node_count()) throw InputError("prior table does not match node count");
    const std::size_t k = prior_values.cols();
    Messages messages{Matrix(graph.slot_count(), k), prior_values, std::vector<double>(k, 0.0)};
    Rng rng(seed);
    for (NodeId u = 0; u < graph.node_count(); ++u) {
        for (std::size_t e = graph.slot_begin(u); e < graph.slot_end(u); ++e) {
            auto msg = messages.cavity.row(e);
            for (std::size_t s = 0; s < k; ++s) {
                const double jitter = noise > 0.0 ? 1.0 + noise * rng.uniform(-1.0, 1.0) : 1.0;
                msg[s] = prior_values(u, s) * jitter;
            }
            normalize_checked(msg);
        }
    }
    return messages;
}

double bp_sweep(const Graph& graph, const BlockAffinity& theta, const Matrix& prior_values, Messages& messages,
                BpNumerics numerics, double damping) {
    check_inputs(graph, theta, prior_values);
    const std::size_t k = theta.k();
    check_state(graph, messages, k);
    std::vector<double> mass = community_mass(graph, messages, k);
    field_from_mass(theta, mass, messages);

    const bool log_space = use_log_space(theta, numerics);
    NodeCombiner combiner(k, log_space);
    NodeCombiner fallback(k, true);
    std::vector<double> outgoing;
    std::vector<double> belief(k);
    // Fills `outgoing` and `belief` for node u. Linear arithmetic can
    // underflow to an all-zero vector; such nodes are redone in log space.
    auto combine = [&](NodeId u) {
        const std::size_t degree = graph.degree(u);
        outgoing.resize(degree * k);
        auto run = [&](NodeCombiner& c) {
            c.gather(graph, theta, prior_values, messages, u);
            for (std::size_t i = 0; i < degree; ++i) c.cavity(i, {outgoing.data() + i * k, k});
            c.belief(belief);
        };
        if (log_space) {
            run(combiner);
            return;
        }
        try {
            run(combiner);
        } catch (const NumericalError&) {
            run(fallback);
        }
    };

    double max_delta = 0.0;
    for (NodeId u = 0; u < graph.node_count(); ++u) {
        if (graph.degree(u) == 0) {
            isolated_belief(prior_values, u, messages.beliefs.row(u));
            continue;
        }
        combine(u);
        const std::size_t begin = graph.slot_begin(u);
        for (std::size_t i = 0; i < graph.degree(u); ++i) {
            auto msg = messages.cavity.row(begin + i);
            for (std::size_t s = 0; s < k; ++s) {
                const double fresh = outgoing[i * k + s];
                const double next = damping > 0.0 ? (1.0 - damping) * fresh + damping * msg[s] : fresh;
                max_delta = std::max(max_delta, std::abs(next - msg[s]));
                msg[s] = next;
            }
        }
        // Keep the field in step with the belief just written; a field frozen
        // for the whole pass lets every node flee the heavier community at once.
        auto stored = messages.beliefs.row(u);
        const auto d = static_cast<double>(graph.degree(u));
        for (std::size_t s = 0; s < k; ++s) mass[s] += d * (belief[s] - stored[s]);
        std::copy(belief.begin(), belief.end(), stored.begin());
        field_from_mass(theta, mass, messages);
    }
    return max_delta;
}

Marginals compute_marginals(const Graph& graph, const BlockAffinity& theta, const Matrix& prior_values,
                            Messages& messages, BpNumerics numerics) {
    check_inputs(graph, theta, prior_values);
    const std::size_t k = theta.k();
    check_state(graph, messages, k);
    refresh_field(graph, theta, messages);

    Marginals out{Matrix(graph.node_count(), k), Matrix(graph.edge_count(), k * k)};
    const bool log_space = use_log_space(theta, numerics);
    NodeCombiner combiner(k, log_space);
    NodeCombiner fallback(k, true);
    for (NodeId u = 0; u < graph.node_count(); ++u) {
        if (graph.degree(u) == 0) {
            isolated_belief(prior_values, u, out.node.row(u));
        } else {
            try {
                combiner.gather(graph, theta, prior_values, messages, u);
                combiner.belief(out.node.row(u));
            } catch (const NumericalError&) {
                if (log_space) throw;
                fallback.gather(graph, theta, prior_values, messages, u);
                fallback.belief(out.node.row(u));
            }
        }
        auto belief = messages.beliefs.row(u);
        std::copy(out.node.row(u).begin(), out.node.row(u).end(), belief.begin());
    }

    for (NodeId u = 0; u < graph.node_count(); ++u) {
        for (std::size_t e = graph.slot_begin(u); e < graph.slot_end(u); ++e) {
            if (graph.target(e) < u) continue;
            const auto forward = messages.cavity.row(e);
            const auto backward = messages.cavity.row(graph.reverse(e));
            auto block = out.edge.row(graph.edge_of(e));
            for (std::size_t s = 0; s < k; ++s) {
                for (std::size_t t = 0; t < k; ++t) block[s * k + t] = theta(s, t) * forward[s] * backward[t];
            }
            normalize_checked(block);
        }
    }
    return out;
}

BpResult run_bp(const Graph& graph, const BlockAffinity& theta, const Matrix& prior_values, Messages& messages,
                const BpOptions& options) {
    if (options.max_steps < 1) throw InputError("max_steps must be at least 1");
    if (!(options.tol > 0.0)) throw InputError("tolerance must be positive");
    BpResult result;
    for (int step = 0; step < options.max_steps; ++step) {
        result.max_delta = bp_sweep(graph, theta, prior_values, messages, options.numerics, options.damping);
        ++result.sweeps;
        if (result.max_delta < options.tol) {
            result.converged = true;
            break;
        }
    }
    result.marginals = compute_marginals(graph, theta, prior_values, messages, options.numerics);
    return result;
}

BpResult run_bp(const Graph& graph, const BlockAffinity& theta, const Matrix& prior_values, std::uint64_t seed,
                const BpOptions& options) {
    Messages messages = init_messages(graph, prior_values, seed);
    return run_bp(graph, theta, prior_values, messages, options);
}

ExactPosterior exact_marginals(const Graph& graph, const BlockAffinity& theta, const Matrix& prior_values) {
    check_inputs(graph, theta, prior_values);
    const std::size_t n = graph.node_count();
    const std::size_t k = theta.k();
    double states = 1.0;
    for (std::size_t i = 0; i < n; ++i) states *= static_cast<double>(k);
    if (states > static_cast<double>(1u << 24)) throw InputError("exact enumeration limited to k^n <= 2^24");
    const auto total = static_cast<std::size_t>(states);

    // Per node pair log-factor tables: pair (u, v), u < v, entry s * k + t.
    const std::size_t pairs = n * (n - (n > 0 ? 1 : 0)) / 2;
    std::vector<double> pair_log(pairs * k * k);
    std::vector<std::size_t> pair_index(n * n, 0);
    {
        std::size_t idx = 0;
        for (NodeId u = 0; u < n; ++u) {
            const auto nbrs = graph.neighbors(u);
            for (NodeId v = u + 1; v < n; ++v, ++idx) {
                pair_index[u * n + v] = idx;
                const bool adjacent = std::binary_search(nbrs.begin(), nbrs.end(), v);
                const double dd = static_cast<double>(graph.degree(u)) * static_cast<double>(graph.degree(v));
                for (std::size_t s = 0; s < k; ++s) {
                    for (std::size_t t = 0; t < k; ++t) {
                        const double p = dd * theta(s, t);
                        if (!(p < 1.0) || p < 0.0) throw InputError("edge probability outside [0, 1)");
                        pair_log[idx * k * k + s * k + t] =
                            adjacent ? (p > 0.0 ? std::log(p) : kNegInf) : std::log1p(-p);
                    }
                }
            }
        }
    }
    Matrix log_prior(n, k);
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t s = 0; s < k; ++s) {
            log_prior(u, s) = prior_values(u, s) > 0.0 ? std::log(prior_values(u, s)) : kNegInf;
        }
    }

    std::vector<std::size_t> assignment(n, 0);
    auto decode = [&](std::size_t code) {
        for (std::size_t u = 0; u < n; ++u) {
            assignment[u] = code % k;
            code /= k;
        }
    };
    auto log_weight = [&] {
        double w = 0.0;
        for (std::size_t u = 0; u < n; ++u) w += log_prior(u, assignment[u]);
        if (w == kNegInf) return w;
        for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t v = u + 1; v < n; ++v) {
                w += pair_log[pair_index[u * n + v] * k * k + assignment[u] * k + assignment[v]];
            }
        }
        return w;
    };

    double top = kNegInf;
    for (std::size_t code = 0; code < total; ++code) {
        decode(code);
        top = std::max(top, log_weight());
    }
    if (top == kNegInf) throw NumericalError("every assignment has zero probability");

    ExactPosterior out{{Matrix(n, k, 0.0), Matrix(graph.edge_count(), k * k, 0.0)}, 0.0};
    double z = 0.0;
    for (std::size_t code = 0; code < total; ++code) {
        decode(code);
        const double w = std::exp(log_weight() - top);
        if (w == 0.0) continue;
        z += w;
        for (std::size_t u = 0; u < n; ++u) out.marginals.node(u, assignment[u]) += w;
        const auto edges = graph.edges();
        for (std::size_t e = 0; e < edges.size(); ++e) {
            out.marginals.edge(e, assignment[edges[e].u] * k + assignment[edges[e].v]) += w;
        }
    }
    for (double& x : out.marginals.node.data()) x /= z;
    for (double& x : out.marginals.edge.data()) x /= z;
    out.log_likelihood = top + std::log(z);
    return out;
}

}  // namespace annet
