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
#include <gtest/gtest.h>

#include <cmath>

#include "annet/prior.hpp"
#include "annet/random.hpp"
#include "support/oracles.hpp"

namespace annet {
namespace {

MetadataColumn categories(std::vector<std::size_t> x, std::size_t count) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < count; ++i) labels.push_back("c" + std::to_string(i));
    return MetadataColumn::discrete(std::move(x), std::move(labels));
}

MetadataColumn ordered(std::vector<double> x) {
    return MetadataColumn::ordered(x, std::vector<bool>(x.size(), false));
}

TEST(Bernstein, LinearCase) {
    const auto b = bernstein_basis(1, 0.5);
    ASSERT_EQ(b.size(), 2u);
    EXPECT_DOUBLE_EQ(b[0], 0.5);
    EXPECT_DOUBLE_EQ(b[1], 0.5);
}

TEST(Bernstein, Endpoint) {
    EXPECT_EQ(bernstein_basis(3, 0.0), (std::vector<double>{1.0, 0.0, 0.0, 0.0}));
    EXPECT_EQ(bernstein_basis(3, 1.0), (std::vector<double>{0.0, 0.0, 0.0, 1.0}));
    EXPECT_EQ(bernstein_basis(0, 0.7), (std::vector<double>{1.0}));
}

TEST(Bernstein, MatchesExactRationalEvaluation) {
    // x = 3/10: C(4, j) 3^j 7^(4-j) / 10^4.
    const auto b = bernstein_basis(4, 0.3);
    const auto exact = testing::bernstein_exact(4, 3, 10);
    const std::vector<double> by_hand{2401.0 / 10000, 4116.0 / 10000, 2646.0 / 10000, 756.0 / 10000, 81.0 / 10000};
    double sum = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
        EXPECT_NEAR(b[j], exact[j], 1e-15);
        EXPECT_NEAR(exact[j], by_hand[j], 1e-15);
        sum += b[j];
    }
    EXPECT_NEAR(sum, 1.0, 1e-15);
}

TEST(Bernstein, RejectsBadArguments) {
    EXPECT_THROW(bernstein_basis(2, -0.1), std::domain_error);
    EXPECT_THROW(bernstein_basis(2, 1.1), std::domain_error);
    EXPECT_THROW(bernstein_basis(-1, 0.5), std::domain_error);
    EXPECT_THROW(bernstein_basis(2, std::nan("")), std::domain_error);
}

TEST(BernsteinProperty, SumRuleAndRangeAgainstRationals) {
    for (int degree = 0; degree <= 8; ++degree) {
        for (std::uint64_t num = 0; num <= 16; ++num) {
            const auto b = bernstein_basis(degree, static_cast<double>(num) / 16.0);
            const auto exact = testing::bernstein_exact(degree, num, 16);
            double sum = 0.0;
            for (std::size_t j = 0; j < b.size(); ++j) {
                EXPECT_GE(b[j], 0.0);
                EXPECT_LE(b[j], 1.0);
                EXPECT_NEAR(b[j], exact[j], 1e-14);
                sum += b[j];
            }
            EXPECT_NEAR(sum, 1.0, 1e-14);
        }
    }
}

TEST(EvalPrior, DiscreteIdentity) {
    const DiscretePrior identity{Matrix(2, 2, 0.0)};
    DiscretePrior p = identity;
    p.gamma(0, 0) = p.gamma(1, 1) = 1.0;
    EXPECT_EQ(eval_prior(p, 0), (std::vector<double>{1.0, 0.0}));
    EXPECT_EQ(eval_prior(p, 1), (std::vector<double>{0.0, 1.0}));
    EXPECT_THROW(eval_prior(p, 2), InputError);
}

TEST(EvalPrior, BernsteinConstantExpansion) {
    const BernsteinPrior p{Matrix(3, 5, 1.0 / 3.0)};
    for (double x : {0.0, 0.2, 0.77, 1.0}) {
        for (double v : eval_prior(p, x)) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
    }
}

TEST(EvalPrior, BernsteinLinearInterpolation) {
    BernsteinPrior p{Matrix(2, 2, 0.0)};
    p.gamma(0, 0) = p.gamma(1, 1) = 1.0;
    const auto v = eval_prior(p, 0.25);
    EXPECT_DOUBLE_EQ(v[0], 0.75);
    EXPECT_DOUBLE_EQ(v[1], 0.25);
}

// Property: columns that are distributions give P(. | x) in [0, 1] summing
// to one for every x.
TEST(EvalPriorProperty, RandomCoefficientsGiveDistributions) {
    Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 1 + rng.below(4);
        const std::size_t degree = rng.below(7);
        const Matrix columns = testing::random_stochastic(degree + 1, k, rng, 0.0);
        BernsteinPrior p{Matrix(k, degree + 1)};
        for (std::size_t j = 0; j <= degree; ++j) {
            for (std::size_t s = 0; s < k; ++s) p.gamma(s, j) = columns(j, s);
        }
        const auto v = eval_prior(p, rng.uniform());
        double sum = 0.0;
        for (double x : v) {
            EXPECT_GE(x, 0.0);
            EXPECT_LE(x, 1.0 + 1e-15);
            sum += x;
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
    }
}

TEST(PriorValues, MissingOrderedNodesUniform) {
    const auto col = MetadataColumn::ordered({0.0, 1.0, 5.0}, {false, false, true});
    BernsteinPrior p{Matrix(2, 2, 0.0)};
    p.gamma(0, 0) = p.gamma(1, 1) = 1.0;
    const Matrix v = prior_values(p, col);
    EXPECT_DOUBLE_EQ(v(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(v(1, 1), 1.0);
    EXPECT_DOUBLE_EQ(v(2, 0), 0.5);
    EXPECT_DOUBLE_EQ(v(2, 1), 0.5);
}

TEST(GammaDiscrete, OneHotMatchingMetadataGivesIdentity) {
    Matrix q(4, 2, 0.0);
    q(0, 0) = q(1, 1) = q(2, 0) = q(3, 1) = 1.0;
    const auto g = m_step_gamma_discrete(q, categories({0, 1, 0, 1}, 2));
    EXPECT_EQ(g.gamma(0, 0), 1.0);
    EXPECT_EQ(g.gamma(1, 0), 0.0);
    EXPECT_EQ(g.gamma(0, 1), 0.0);
    EXPECT_EQ(g.gamma(1, 1), 1.0);
}

TEST(GammaDiscrete, UniformMarginals) {
    const auto g = m_step_gamma_discrete(Matrix(5, 3, 1.0 / 3.0), categories({0, 1, 1, 0, 1}, 2));
    for (double v : g.gamma.data()) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
}

TEST(GammaDiscrete, CategoryMeans) {
    Matrix q(3, 2);
    q(0, 0) = 0.9, q(0, 1) = 0.1;
    q(1, 0) = 0.6, q(1, 1) = 0.4;
    q(2, 0) = 0.2, q(2, 1) = 0.8;
    const auto g = m_step_gamma_discrete(q, categories({0, 0, 1}, 2));
    EXPECT_NEAR(g.gamma(0, 0), 0.75, 1e-15);
    EXPECT_NEAR(g.gamma(1, 0), 0.25, 1e-15);
    EXPECT_NEAR(g.gamma(0, 1), 0.2, 1e-15);
    EXPECT_NEAR(g.gamma(1, 1), 0.8, 1e-15);
}

TEST(GammaDiscrete, EmptyCategoryUniform) {
    const auto g = m_step_gamma_discrete(Matrix(2, 4, 0.25), categories({0, 0}, 3));
    for (std::size_t s = 0; s < 4; ++s) EXPECT_DOUBLE_EQ(g.gamma(s, 2), 0.25);
}

TEST(GammaDiscrete, DimensionMismatch) {
    EXPECT_THROW(m_step_gamma_discrete(Matrix(3, 2, 0.5), categories({0, 1}, 2)), InputError);
}

// Property: the closed form maximizes sum_us q_s^u log gamma(s, x_u) with
// columns on the simplex. Oracle: coordinate golden-section search over
// softmax logits of each column.
TEST(GammaDiscreteProperty, MatchesNumericalMaximizer) {
    Rng rng(33);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 1 + rng.below(6);
        const std::size_t k = 2 + rng.below(2);
        const std::size_t K = 1 + rng.below(3);
        std::vector<std::size_t> x(n);
        for (auto& v : x) v = rng.below(K);
        const Matrix q = testing::random_stochastic(n, k, rng);
        const auto meta = categories(x, K);
        const auto closed = m_step_gamma_discrete(q, meta);

        for (std::size_t c = 0; c < K; ++c) {
            bool used = false;
            for (std::size_t u = 0; u < n; ++u) used = used || x[u] == c;
            if (!used) continue;
            auto objective = [&](const std::vector<double>& z) {
                double norm = 0.0;
                for (double zi : z) norm += std::exp(zi);
                double total = 0.0;
                for (std::size_t u = 0; u < n; ++u) {
                    if (x[u] != c) continue;
                    for (std::size_t s = 0; s < k; ++s) total += q(u, s) * (z[s] - std::log(norm));
                }
                return total;
            };
            std::vector<double> z = testing::coordinate_max(objective, std::vector<double>(k, 0.0), -30.0, 30.0);
            double norm = 0.0;
            for (double zi : z) norm += std::exp(zi);
            for (std::size_t s = 0; s < k; ++s) EXPECT_NEAR(closed.gamma(s, c), std::exp(z[s]) / norm, 1e-6);
        }
    }
}

TEST(GammaOrdered, XIndependentMarginals) {
    Rng rng(4);
    std::vector<double> x(200);
    for (auto& v : x) v = rng.uniform();
    Matrix q(200, 3);
    for (std::size_t u = 0; u < 200; ++u) q(u, 0) = 0.5, q(u, 1) = 0.3, q(u, 2) = 0.2;
    const Matrix start = testing::random_stochastic(5, 3, rng);
    BernsteinPrior init{Matrix(3, 5)};
    for (std::size_t j = 0; j < 5; ++j) {
        for (std::size_t s = 0; s < 3; ++s) init.gamma(s, j) = start(j, s);
    }
    const auto out = m_step_gamma_ordered(q, ordered(x), init, {1e-12, 5000});
    for (std::size_t j = 0; j < 5; ++j) {
        EXPECT_NEAR(out.prior.gamma(0, j), 0.5, 1e-4);
        EXPECT_NEAR(out.prior.gamma(1, j), 0.3, 1e-4);
        EXPECT_NEAR(out.prior.gamma(2, j), 0.2, 1e-4);
    }
}

TEST(GammaOrdered, SingleNodeAllMassToOneCommunity) {
    Matrix q(1, 2);
    q(0, 0) = 1.0;
    q(0, 1) = 0.0;
    const auto meta = MetadataColumn::ordered({0.3}, {false});
    const auto out = m_step_gamma_ordered(q, meta, BernsteinPrior{Matrix(2, 3, 0.5)}, {1e-10, 2000});
    // A single value rescales to 0.5, where every B_j is positive.
    for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_NEAR(out.prior.gamma(0, j), 1.0, 1e-6);
        EXPECT_NEAR(out.prior.gamma(1, j), 0.0, 1e-6);
    }
}

TEST(GammaOrdered, RecoversLinearPrior) {
    // Hard labels drawn from P(0 | x) = x.
    Rng rng(2024);
    const std::size_t n = 2000;
    std::vector<double> x(n);
    Matrix q(n, 2, 0.0);
    for (std::size_t u = 0; u < n; ++u) {
        x[u] = rng.uniform();
        q(u, rng.uniform() < x[u] ? 0 : 1) = 1.0;
    }
    const auto meta = ordered(x);
    const auto out = m_step_gamma_ordered(q, meta, BernsteinPrior{Matrix(2, 2, 0.5)});
    EXPECT_NEAR(out.prior.gamma(0, 0), 0.0, 0.05);
    EXPECT_NEAR(out.prior.gamma(0, 1), 1.0, 0.05);
    EXPECT_NEAR(out.prior.gamma(1, 0), 1.0, 0.05);
    EXPECT_NEAR(out.prior.gamma(1, 1), 0.0, 0.05);
}

TEST(GammaOrdered, MissingNodesExcluded) {
    Rng rng(8);
    const std::size_t n = 30;
    std::vector<double> x(n + 1);
    std::vector<bool> missing(n + 1, false);
    for (auto& v : x) v = rng.uniform();
    missing[n] = true;
    Matrix q = testing::random_stochastic(n + 1, 2, rng);
    const auto with_missing = MetadataColumn::ordered(x, missing);
    const auto out = m_step_gamma_ordered(q, with_missing, BernsteinPrior{Matrix(2, 4, 0.5)});
    q(n, 0) = 1.0 - q(n, 0);
    q(n, 1) = 1.0 - q(n, 1);
    const auto perturbed = m_step_gamma_ordered(q, with_missing, BernsteinPrior{Matrix(2, 4, 0.5)});
    EXPECT_EQ(out.prior.gamma, perturbed.prior.gamma);
}

TEST(GammaOrdered, RejectsWrongKind) {
    EXPECT_THROW(m_step_gamma_ordered(Matrix(2, 2, 0.5), categories({0, 1}, 2), BernsteinPrior{Matrix(2, 2, 0.5)}),
                 InputError);
}

// Properties: columns stay on the simplex and the objective never drops.
TEST(GammaOrderedProperty, InvariantsAndMonotoneObjective) {
    Rng rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 5 + rng.below(100);
        const std::size_t k = 2 + rng.below(3);
        const std::size_t degree = rng.below(6);
        std::vector<double> x(n);
        for (auto& v : x) v = rng.uniform(-3.0, 7.0);
        const Matrix q = testing::random_stochastic(n, k, rng, 0.0);
        const Matrix start = testing::random_stochastic(degree + 1, k, rng);
        BernsteinPrior init{Matrix(k, degree + 1)};
        for (std::size_t j = 0; j <= degree; ++j) {
            for (std::size_t s = 0; s < k; ++s) init.gamma(s, j) = start(j, s);
        }
        const auto meta = ordered(x);
        const auto out = m_step_gamma_ordered(q, meta, init);
        for (std::size_t j = 0; j <= degree; ++j) {
            double sum = 0.0;
            for (std::size_t s = 0; s < k; ++s) {
                EXPECT_GE(out.prior.gamma(s, j), 0.0);
                EXPECT_LE(out.prior.gamma(s, j), 1.0);
                sum += out.prior.gamma(s, j);
            }
            EXPECT_NEAR(sum, 1.0, 1e-12);
        }
        ASSERT_EQ(out.objective_trace.size(), static_cast<std::size_t>(out.iterations) + 1);
        for (std::size_t i = 1; i < out.objective_trace.size(); ++i) {
            EXPECT_GE(out.objective_trace[i], out.objective_trace[i - 1] - 1e-12);
        }
        EXPECT_NEAR(out.objective_trace.back(), bernstein_objective(q, meta, out.prior), 1e-9);
    }
}

}  // namespace
}  // namespace annet
