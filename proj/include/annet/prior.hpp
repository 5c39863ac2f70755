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

#include <variant>
#include <vector>

#include "annet/common.hpp"
#include "annet/metadata.hpp"

namespace annet {

/// Lower bound applied to every block affinity after an M-step so that
/// log(theta) stays finite.
inline constexpr double kThetaFloor = 1e-12;

/// Symmetric k x k matrix of degree-corrected edge propensities: an edge
/// between u and v appears with probability d_u d_v theta(s_u, s_v).
struct BlockAffinity {
    Matrix theta;

    BlockAffinity() = default;
    explicit BlockAffinity(std::size_t k, double fill = 0.0) : theta(k, k, fill) {}
    explicit BlockAffinity(Matrix m);

    std::size_t k() const { return theta.rows(); }
    double operator()(std::size_t s, std::size_t t) const { return theta(s, t); }
};

/// P(s | x) for discrete metadata: gamma(s, x), each column a distribution.
struct DiscretePrior {
    Matrix gamma;  // k x K

    std::size_t k() const { return gamma.rows(); }
    std::size_t category_count() const { return gamma.cols(); }
};

/// P(s | x) = sum_j gamma(s, j) B_j(x) on x in [0, 1], with B_j the
/// degree-N Bernstein polynomials. Columns of gamma are distributions, which
/// makes P(. | x) a distribution for every x.
struct BernsteinPrior {
    Matrix gamma;  // k x (N + 1)

    std::size_t k() const { return gamma.rows(); }
    int degree() const { return static_cast<int>(gamma.cols()) - 1; }
};

using Prior = std::variant<DiscretePrior, BernsteinPrior>;

std::size_t community_count(const Prior& prior);

/// B_j(x) = C(N, j) x^j (1 - x)^(N - j) for j = 0..N. Throws
/// std::domain_error for x outside [0, 1] or N < 0.
std::vector<double> bernstein_basis(int degree, double x);

/// P(. | category). Throws InputError if the category is out of range.
std::vector<double> eval_prior(const DiscretePrior& prior, std::size_t category);

/// P(. | x) for x in [0, 1].
std::vector<double> eval_prior(const BernsteinPrior& prior, double x);

/// n x k table of P(s | x_u) for every node. Nodes with a missing ordered
/// value get the uniform distribution.
Matrix prior_values(const Prior& prior, const MetadataColumn& metadata);

/// Uniform prior of the kind matching `metadata`.
Prior uniform_prior(std::size_t k, const MetadataColumn& metadata, int bernstein_degree);

/// Closed-form optimum gamma(s, x) = mean of q_s^u over nodes with x_u = x.
/// Categories with no members get 1/k.
DiscretePrior m_step_gamma_discrete(const Matrix& node_marginals, const MetadataColumn& metadata);

struct InnerLoopOptions {
    double tol = 1e-8;
    int max_iterations = 200;
};

struct OrderedMStep {
    BernsteinPrior prior;
    int iterations = 0;
    bool converged = false;
    /// Objective sum_us q_s^u log P(s | x_u) before the first and after each
    /// iteration (size iterations + 1).
    std::vector<double> objective_trace;
};

/// Maximizes sum_us q_s^u log sum_j gamma(s, j) B_j(x_u) over the Bernstein
/// coefficients by alternating the responsibilities
///   Q_j^{su} = gamma(s, j) B_j(x_u) / sum_i gamma(s, i) B_i(x_u)
/// with gamma(s, j) = sum_u q_s^u Q_j^{su} / sum_tu q_t^u Q_j^{tu},
/// starting from `init`. Stops when the largest coefficient change drops
/// below options.tol. Nodes with missing values do not contribute.
OrderedMStep m_step_gamma_ordered(const Matrix& node_marginals, const MetadataColumn& metadata,
                                  const BernsteinPrior& init, const InnerLoopOptions& options = {});

/// The objective maximized by m_step_gamma_ordered.
double bernstein_objective(const Matrix& node_marginals, const MetadataColumn& metadata,
                           const BernsteinPrior& prior);

}  // namespace annet
