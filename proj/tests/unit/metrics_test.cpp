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

#include "annet/metrics.hpp"
#include "annet/random.hpp"

namespace annet {
namespace {

using Labels = std::vector<std::size_t>;

double nmi_of(const Labels& a, const Labels& b) { return nmi(std::span<const std::size_t>(a), std::span<const std::size_t>(b)); }

// Binary entropy in bits, evaluated independently of the library.
double h2(double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

TEST(Contingency, CountsSumToTotal) {
    const Labels a{0, 0, 1, 1, 2};
    const Labels b{5, 3, 3, 3, 5};
    const ContingencyTable t{std::span<const std::size_t>(a), std::span<const std::size_t>(b)};
    EXPECT_EQ(t.rows(), 3u);
    EXPECT_EQ(t.cols(), 2u);
    std::size_t sum = 0;
    for (std::size_t i = 0; i < t.rows(); ++i) {
        for (std::size_t j = 0; j < t.cols(); ++j) sum += t.count(i, j);
    }
    EXPECT_EQ(sum, 5u);
    EXPECT_EQ(t.total(), 5u);
    EXPECT_EQ(t.row_sum(0), 2u);
    EXPECT_EQ(t.col_sum(0), 2u);  // label 5 appears first
}

TEST(Nmi, IdenticalLabelings) { EXPECT_DOUBLE_EQ(nmi_of({0, 0, 1, 1, 0}, {0, 0, 1, 1, 0}), 1.0); }

TEST(Nmi, HandComputedExample) {
    // a = [1,1,2,2], b = [1,1,1,2]: I = H(a) - H(a|b) = 1 - 3/4 h2(1/3).
    const double expected = (1.0 - 0.75 * h2(1.0 / 3.0)) / h2(0.25);
    EXPECT_NEAR(expected, 0.3837, 1e-4);
    EXPECT_NEAR(nmi_of({0, 0, 1, 1}, {0, 0, 0, 1}), expected, 1e-12);
}

TEST(Nmi, ConstantLabelingIsZero) {
    EXPECT_EQ(nmi_of({0, 1, 0, 1}, {3, 3, 3, 3}), 0.0);
    EXPECT_EQ(nmi_of({2}, {2}), 0.0);
}

TEST(Nmi, Errors) {
    EXPECT_THROW(nmi_of({0, 1}, {0}), InputError);
    EXPECT_THROW(nmi_of({}, {}), InputError);
}

TEST(Nmi, IntegerLabels) {
    const std::vector<int> a{-1, -1, 4, 4};
    const std::vector<int> b{7, 7, 9, 9};
    EXPECT_DOUBLE_EQ(nmi(std::span<const int>(a), std::span<const int>(b)), 1.0);
}

TEST(NmiProperty, SymmetricAndRelabelInvariant) {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.below(60);
        const std::size_t ka = 1 + rng.below(4);
        const std::size_t kb = 1 + rng.below(4);
        Labels a(n), b(n), a_relabel(n);
        for (std::size_t u = 0; u < n; ++u) {
            a[u] = rng.below(ka);
            b[u] = rng.below(kb);
            a_relabel[u] = 10 * (ka - a[u]);
        }
        const double v = nmi_of(a, b);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        EXPECT_NEAR(v, nmi_of(b, a), 1e-12);
        EXPECT_NEAR(v, nmi_of(a_relabel, b), 1e-12);
    }
}

TEST(NmiProperty, IndependentRandomLabelingsNearZero) {
    Rng rng(1000);
    for (int trial = 0; trial < 20; ++trial) {
        Labels a(1000), b(1000);
        for (std::size_t u = 0; u < 1000; ++u) a[u] = rng.below(2), b[u] = rng.below(2);
        EXPECT_LT(nmi_of(a, b), 0.05);
    }
}

TEST(ConditionalEntropy, Examples) {
    const MetadataColumn meta = MetadataColumn::discrete({0, 1, 1, 0, 1}, {"a", "b"});
    DiscretePrior identity{Matrix(2, 2, 0.0)};
    identity.gamma(0, 0) = identity.gamma(1, 1) = 1.0;
    EXPECT_EQ(conditional_entropy_model(identity, meta), 0.0);
    EXPECT_NEAR(conditional_entropy_model(DiscretePrior{Matrix(3, 2, 1.0 / 3.0)}, meta), std::log2(3.0), 1e-12);
    DiscretePrior skew{Matrix(2, 2)};
    skew.gamma(0, 0) = skew.gamma(0, 1) = 0.75;
    skew.gamma(1, 0) = skew.gamma(1, 1) = 0.25;
    EXPECT_NEAR(conditional_entropy_model(skew, meta), 0.8113, 1e-4);
    EXPECT_NEAR(conditional_entropy_model(skew, meta), h2(0.25), 1e-12);
    EXPECT_THROW(conditional_entropy_model(DiscretePrior{Matrix(2, 3, 0.5)}, meta), InputError);
}

TEST(ConditionalEntropyProperty, DecreasesTowardOneHot) {
    const MetadataColumn meta = MetadataColumn::discrete({0, 0, 0}, {"a"});
    double previous = 2.0;
    for (double p = 0.5; p <= 1.0 + 1e-12; p += 0.05) {
        DiscretePrior prior{Matrix(2, 1)};
        prior.gamma(0, 0) = std::min(p, 1.0);
        prior.gamma(1, 0) = 1.0 - prior.gamma(0, 0);
        const double h = conditional_entropy_model(prior, meta);
        EXPECT_LE(h, previous + 1e-15);
        EXPECT_GE(h, 0.0);
        EXPECT_LE(h, 1.0);
        previous = h;
    }
}

TEST(FractionCorrect, Examples) {
    const Labels truth{0, 0, 1, 1};
    EXPECT_EQ(fraction_correct(truth, truth, 2), 1.0);
    EXPECT_EQ(fraction_correct(Labels{1, 1, 0, 0}, truth, 2), 1.0);
    EXPECT_EQ(fraction_correct(Labels{0, 1, 1, 1}, truth, 2), 0.75);
}

TEST(FractionCorrect, ThreeGroupPermutation) {
    const Labels truth{0, 0, 1, 1, 2, 2};
    EXPECT_EQ(fraction_correct(Labels{2, 2, 0, 0, 1, 1}, truth, 3), 1.0);
    EXPECT_NEAR(fraction_correct(Labels{2, 2, 0, 1, 1, 1}, truth, 3), 5.0 / 6.0, 1e-15);
}

TEST(FractionCorrect, Errors) {
    EXPECT_THROW(fraction_correct(Labels{0}, Labels{0}, 11), InputError);
    EXPECT_THROW(fraction_correct(Labels{0, 3}, Labels{0, 1}, 2), InputError);
    EXPECT_THROW(fraction_correct(Labels{0}, Labels{0, 1}, 2), InputError);
}

TEST(FractionCorrectProperty, RandomAssignmentsNearChance) {
    Rng rng(8);
    for (std::size_t k = 2; k <= 4; ++k) {
        Labels truth(3000), guess(3000);
        for (std::size_t u = 0; u < 3000; ++u) truth[u] = u % k, guess[u] = rng.below(k);
        const double acc = fraction_correct(guess, truth, k);
        EXPECT_GE(acc, 1.0 / static_cast<double>(k) - 0.01);
        EXPECT_LE(acc, 1.0 / static_cast<double>(k) + 0.05);
    }
}

}  // namespace
}  // namespace annet
