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
#include "annet/prior.hpp"

#include <cmath>
#include <stdexcept>

namespace annet {
namespace {

void check_marginals(const Matrix& q, const MetadataColumn& metadata) {
    if (q.rows() != metadata.size()) {
        throw InputError("marginals have " + std::to_string(q.rows()) + " rows but metadata has " +
                         std::to_string(metadata.size()) + " nodes");
    }
    if (q.cols() == 0) throw InputError("marginals have zero communities");
}

}  // namespace

BlockAffinity::BlockAffinity(Matrix m) : theta(std::move(m)) {
    if (theta.rows() != theta.cols()) throw InputError("block affinity must be square");
}

std::size_t community_count(const Prior& prior) {
    return std::visit([](const auto& p) { return p.k(); }, prior);
}

std::vector<double> bernstein_basis(int degree, double x) {
    if (degree < 0) throw std::domain_error("Bernstein degree must be non-negative");
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("Bernstein argument outside [0, 1]");
    const auto n = static_cast<std::size_t>(degree);
    std::vector<double> b(n + 1);
    // Powers by repeated multiplication; exact at the endpoints.
    std::vector<double> xp(n + 1, 1.0), yp(n + 1, 1.0);
    for (std::size_t j = 1; j <= n; ++j) {
        xp[j] = xp[j - 1] * x;
        yp[j] = yp[j - 1] * (1.0 - x);
    }
    double binom = 1.0;
    for (std::size_t j = 0; j <= n; ++j) {
        b[j] = binom * xp[j] * yp[n - j];
        binom = binom * static_cast<double>(n - j) / static_cast<double>(j + 1);
    }
    return b;
}

std::vector<double> eval_prior(const DiscretePrior& prior, std::size_t category) {
    if (category >= prior.category_count()) {
        throw InputError("category " + std::to_string(category) + " out of range (K = " +
                         std::to_string(prior.category_count()) + ")");
    }
    std::vector<double> p(prior.k());
    for (std::size_t s = 0; s < p.size(); ++s) p[s] = prior.gamma(s, category);
    return p;
}

std::vector<double> eval_prior(const BernsteinPrior& prior, double x) {
    const std::vector<double> basis = bernstein_basis(prior.degree(), x);
    std::vector<double> p(prior.k(), 0.0);
    for (std::size_t s = 0; s < p.size(); ++s) {
        for (std::size_t j = 0; j < basis.size(); ++j) p[s] += prior.gamma(s, j) * basis[j];
    }
    return p;
}

Matrix prior_values(const Prior& prior, const MetadataColumn& metadata) {
    const std::size_t k = community_count(prior);
    Matrix values(metadata.size(), k);
    if (const auto* discrete = std::get_if<DiscretePrior>(&prior)) {
        if (metadata.kind() != MetadataKind::discrete) throw InputError("discrete prior needs discrete metadata");
        if (discrete->category_count() != metadata.category_count()) {
            throw InputError("prior has " + std::to_string(discrete->category_count()) +
                             " categories, metadata has " + std::to_string(metadata.category_count()));
        }
        for (std::size_t u = 0; u < metadata.size(); ++u) {
            const std::size_t x = metadata.category(u);
            for (std::size_t s = 0; s < k; ++s) values(u, s) = discrete->gamma(s, x);
        }
        return values;
    }
    const auto& bernstein = std::get<BernsteinPrior>(prior);
    if (metadata.kind() != MetadataKind::ordered) throw InputError("Bernstein prior needs ordered metadata");
    for (std::size_t u = 0; u < metadata.size(); ++u) {
        if (metadata.missing(u)) {
            for (std::size_t s = 0; s < k; ++s) values(u, s) = 1.0 / static_cast<double>(k);
            continue;
        }
        const std::vector<double> p = eval_prior(bernstein, metadata.value(u));
        for (std::size_t s = 0; s < k; ++s) values(u, s) = p[s];
    }
    return values;
}

Prior uniform_prior(std::size_t k, const MetadataColumn& metadata, int bernstein_degree) {
    const double w = 1.0 / static_cast<double>(k);
    if (metadata.kind() == MetadataKind::discrete) {
        return DiscretePrior{Matrix(k, metadata.category_count(), w)};
    }
    if (bernstein_degree < 0) throw InputError("Bernstein degree must be non-negative");
    return BernsteinPrior{Matrix(k, static_cast<std::size_t>(bernstein_degree) + 1, w)};
}

DiscretePrior m_step_gamma_discrete(const Matrix& node_marginals, const MetadataColumn& metadata) {
    check_marginals(node_marginals, metadata);
    if (metadata.kind() != MetadataKind::discrete) throw InputError("m_step_gamma_discrete needs discrete metadata");
    const std::size_t k = node_marginals.cols();
    const std::size_t categories = metadata.category_count();
    Matrix sums(k, categories, 0.0);
    std::vector<double> counts(categories, 0.0);
    for (std::size_t u = 0; u < metadata.size(); ++u) {
        const std::size_t x = metadata.category(u);
        counts[x] += 1.0;
        for (std::size_t s = 0; s < k; ++s) sums(s, x) += node_marginals(u, s);
    }
    DiscretePrior prior{Matrix(k, categories)};
    for (std::size_t x = 0; x < categories; ++x) {
        for (std::size_t s = 0; s < k; ++s) {
            prior.gamma(s, x) = counts[x] > 0.0 ? sums(s, x) / counts[x] : 1.0 / static_cast<double>(k);
        }
    }
    return prior;
}

double bernstein_objective(const Matrix& node_marginals, const MetadataColumn& metadata,
                           const BernsteinPrior& prior) {
    check_marginals(node_marginals, metadata);
    double total = 0.0;
    for (std::size_t u = 0; u < metadata.size(); ++u) {
        if (metadata.missing(u)) continue;
        const std::vector<double> p = eval_prior(prior, metadata.value(u));
        for (std::size_t s = 0; s < p.size(); ++s) {
            const double q = node_marginals(u, s);
            if (q > 0.0) total += q * std::log(p[s]);
        }
    }
    return total;
}

OrderedMStep m_step_gamma_ordered(const Matrix& node_marginals, const MetadataColumn& metadata,
                                  const BernsteinPrior& init, const InnerLoopOptions& options) {
    check_marginals(node_marginals, metadata);
    if (metadata.kind() != MetadataKind::ordered) throw InputError("m_step_gamma_ordered needs ordered metadata");
    if (init.gamma.cols() == 0) throw InputError("Bernstein degree must be non-negative");
    if (init.k() != node_marginals.cols()) throw InputError("prior and marginals disagree on k");
    const std::size_t k = init.k();
    const std::size_t basis_size = init.gamma.cols();
    const int degree = init.degree();

    // Basis values are fixed across iterations; cache them for present nodes.
    std::vector<std::size_t> present;
    for (std::size_t u = 0; u < metadata.size(); ++u) {
        if (!metadata.missing(u)) present.push_back(u);
    }
    Matrix basis(present.size(), basis_size);
    for (std::size_t i = 0; i < present.size(); ++i) {
        const std::vector<double> b = bernstein_basis(degree, metadata.value(present[i]));
        std::copy(b.begin(), b.end(), basis.row(i).begin());
    }

    auto objective = [&](const Matrix& gamma) {
        double total = 0.0;
        for (std::size_t i = 0; i < present.size(); ++i) {
            for (std::size_t s = 0; s < k; ++s) {
                const double q = node_marginals(present[i], s);
                if (q <= 0.0) continue;
                double p = 0.0;
                for (std::size_t j = 0; j < basis_size; ++j) p += gamma(s, j) * basis(i, j);
                total += q * std::log(p);
            }
        }
        return total;
    };

    OrderedMStep result{init, 0, false, {}};
    Matrix& gamma = result.prior.gamma;
    result.objective_trace.push_back(objective(gamma));
    Matrix numer(k, basis_size);
    std::vector<double> denom(basis_size);
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        std::fill(numer.data().begin(), numer.data().end(), 0.0);
        std::fill(denom.begin(), denom.end(), 0.0);
        for (std::size_t i = 0; i < present.size(); ++i) {
            const std::size_t u = present[i];
            for (std::size_t s = 0; s < k; ++s) {
                const double q = node_marginals(u, s);
                if (q <= 0.0) continue;
                double p = 0.0;
                for (std::size_t j = 0; j < basis_size; ++j) p += gamma(s, j) * basis(i, j);
                if (p <= 0.0) continue;
                for (std::size_t j = 0; j < basis_size; ++j) {
                    const double weight = q * gamma(s, j) * basis(i, j) / p;
                    numer(s, j) += weight;
                    denom[j] += weight;
                }
            }
        }
        double change = 0.0;
        for (std::size_t j = 0; j < basis_size; ++j) {
            // A basis function no node loads on leaves its column unconstrained.
            if (denom[j] <= 0.0) continue;
            for (std::size_t s = 0; s < k; ++s) {
                const double updated = numer(s, j) / denom[j];
                change = std::max(change, std::abs(updated - gamma(s, j)));
                gamma(s, j) = updated;
            }
        }
        ++result.iterations;
        result.objective_trace.push_back(objective(gamma));
        if (change < options.tol) {
            result.converged = true;
            break;
        }
    }
    return result;
}

}  // namespace annet
