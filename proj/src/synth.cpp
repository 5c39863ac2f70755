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
#include "annet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "annet/metrics.hpp"
#include "annet/parallel.hpp"
#include "annet/random.hpp"

namespace annet {
namespace {

// Gap to the next success in a run of Bernoulli(p) trials.
std::uint64_t geometric_skip(Rng& rng, double log_q) {
    const double r = rng.uniform();
    const double skip = std::floor(std::log1p(-r) / log_q);
    return skip >= 0x1.0p50 ? (std::uint64_t{1} << 50) : static_cast<std::uint64_t>(skip);
}

void sample_within(const std::vector<NodeId>& members, double p, Rng& rng, std::vector<Edge>& out) {
    if (p <= 0.0 || members.size() < 2) return;
    const double log_q = std::log1p(-p);
    // Batagelj-Brandes walk over the strict lower triangle.
    std::uint64_t v = 1;
    std::int64_t w = -1;
    const std::uint64_t size = members.size();
    while (v < size) {
        w += 1 + static_cast<std::int64_t>(p >= 1.0 ? 0 : geometric_skip(rng, log_q));
        while (w >= static_cast<std::int64_t>(v) && v < size) {
            w -= static_cast<std::int64_t>(v);
            ++v;
        }
        if (v < size) out.push_back({members[v], members[static_cast<std::size_t>(w)]});
    }
}

void sample_between(const std::vector<NodeId>& a, const std::vector<NodeId>& b, double p, Rng& rng,
                    std::vector<Edge>& out) {
    if (p <= 0.0 || a.empty() || b.empty()) return;
    const double log_q = std::log1p(-p);
    const std::uint64_t total = static_cast<std::uint64_t>(a.size()) * b.size();
    std::uint64_t i = p >= 1.0 ? 0 : geometric_skip(rng, log_q);
    while (i < total) {
        out.push_back({a[i / b.size()], b[i % b.size()]});
        i += 1 + (p >= 1.0 ? 0 : geometric_skip(rng, log_q));
    }
}

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mean = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

PlantedGraph generate_sbm(std::size_t n, std::size_t k, double c_in, double c_out, std::uint64_t seed) {
    if (k < 1 || k > n) throw InputError("generate_sbm needs 1 <= k <= n");
    if (!(c_out >= 0.0) || !(c_in >= c_out)) throw InputError("generate_sbm needs 0 <= c_out <= c_in");
    const double p_in = c_in / static_cast<double>(n);
    const double p_out = c_out / static_cast<double>(n);
    if (p_in > 1.0 || p_out > 1.0) throw InputError("edge probability exceeds 1 (c_in must be < n)");

    Rng rng(seed);
    PlantedGraph out;
    out.truth.resize(n);
    for (std::size_t u = 0, group = 0; group < k; ++group) {
        const std::size_t size = n / k + (group < n % k ? 1 : 0);
        for (std::size_t i = 0; i < size; ++i) out.truth[u++] = group;
    }
    for (std::size_t i = n; i > 1; --i) std::swap(out.truth[i - 1], out.truth[rng.below(i)]);

    std::vector<std::vector<NodeId>> members(k);
    for (std::size_t u = 0; u < n; ++u) members[out.truth[u]].push_back(static_cast<NodeId>(u));
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>((c_in + (k - 1) * c_out) * n / (2 * k) * 1.1) + 16);
    for (std::size_t a = 0; a < k; ++a) {
        sample_within(members[a], p_in, rng, edges);
        for (std::size_t b = a + 1; b < k; ++b) sample_between(members[a], members[b], p_out, rng, edges);
    }
    out.graph = Graph::from_edges(n, edges);
    return out;
}

MetadataColumn generate_metadata(std::span<const std::size_t> truth, double match_rate, std::size_t categories,
                                 std::uint64_t seed) {
    if (!(match_rate >= 0.0 && match_rate <= 1.0)) throw InputError("match rate must lie in [0, 1]");
    if (categories < 1) throw InputError("need at least one metadata category");
    if (categories < 2 && match_rate < 1.0) throw InputError("a match rate below 1 needs at least two categories");
    for (std::size_t t : truth) {
        if (t >= categories) throw InputError("number of categories is smaller than the number of communities");
    }
    Rng rng(seed);
    std::vector<std::size_t> values(truth.size());
    for (std::size_t u = 0; u < truth.size(); ++u) {
        if (rng.uniform() < match_rate) {
            values[u] = truth[u];
        } else {
            const std::size_t other = rng.below(categories - 1);
            values[u] = other < truth[u] ? other : other + 1;
        }
    }
    std::vector<std::string> labels(categories);
    for (std::size_t c = 0; c < categories; ++c) labels[c] = std::to_string(c);
    return MetadataColumn::discrete(std::move(values), std::move(labels));
}

double detectability_threshold(double c_in, double c_out) {
    const double total = c_in + c_out;
    return total > 0.0 ? std::sqrt(2.0 * total) : 0.0;
}

std::vector<Fig1aRow> benchmark_fig1a(const Fig1aOptions& options) {
    if (options.reps < 1) throw InputError("reps must be at least 1");
    for (double diff : options.differences) {
        if (diff < 0.0 || diff > 2.0 * options.mean_degree) {
            throw InputError("c_in - c_out must lie in [0, 2 * mean degree]");
        }
    }
    FitConfig config = options.fit;
    config.k = 2;
    config.threads = 1;

    const std::size_t cells = options.match_rates.size() * options.differences.size();
    const auto reps = static_cast<std::size_t>(options.reps);
    std::vector<double> accuracy(cells * reps);
    parallel_for(cells * reps, options.threads, [&](std::size_t job) {
        const std::size_t cell = job / reps;
        const double rho = options.match_rates[cell / options.differences.size()];
        const double diff = options.differences[cell % options.differences.size()];
        const double c_in = options.mean_degree + diff / 2.0;
        const double c_out = options.mean_degree - diff / 2.0;
        const std::uint64_t seed = derive_seed(options.seed, job);
        const PlantedGraph planted = generate_sbm(options.n, 2, c_in, c_out, derive_seed(seed, 0));
        const MetadataColumn metadata = generate_metadata(planted.truth, rho, 2, derive_seed(seed, 1));
        FitConfig job_config = config;
        job_config.seed = derive_seed(seed, 2);
        const FitResult result = fit(planted.graph, metadata, job_config);
        accuracy[job] = fraction_correct(result.assignment, planted.truth, 2);
    });

    std::vector<Fig1aRow> rows;
    for (std::size_t cell = 0; cell < cells; ++cell) {
        Fig1aRow row;
        row.match_rate = options.match_rates[cell / options.differences.size()];
        row.difference = options.differences[cell % options.differences.size()];
        row.accuracies.assign(accuracy.begin() + static_cast<std::ptrdiff_t>(cell * reps),
                              accuracy.begin() + static_cast<std::ptrdiff_t>((cell + 1) * reps));
        row.mean_accuracy = mean_of(row.accuracies);
        row.stderr_accuracy = stderr_of(row.accuracies);
        row.reps = options.reps;
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_fig1a_csv(std::ostream& out, const std::vector<Fig1aRow>& rows) {
    out << "rho,diff,mean_acc,stderr,reps\n";
    out.precision(10);
    for (const Fig1aRow& row : rows) {
        out << row.match_rate << ',' << row.difference << ',' << row.mean_accuracy << ',' << row.stderr_accuracy
            << ',' << row.reps << '\n';
    }
}

Fig1bResult benchmark_fig1b(const Fig1bOptions& options) {
    if (options.reps < 1) throw InputError("reps must be at least 1");
    FitConfig config = options.fit;
    config.k = 2;
    config.threads = 1;
    const auto reps = static_cast<std::size_t>(options.reps);

    Fig1bResult result;
    result.accuracy_with.resize(reps);
    result.accuracy_without.resize(reps);
    // Jobs 2r and 2r + 1 share rep r's network and differ only in metadata.
    parallel_for(2 * reps, options.threads, [&](std::size_t job) {
        const std::size_t rep = job / 2;
        const bool with_metadata = job % 2 == 0;
        const std::uint64_t seed = derive_seed(options.seed, rep);
        const PlantedGraph planted = generate_sbm(options.n, 4, options.c_in, options.c_out, derive_seed(seed, 0));
        std::vector<std::size_t> target(options.n);
        for (std::size_t u = 0; u < options.n; ++u) target[u] = planted.truth[u] / 2;
        const MetadataColumn metadata = with_metadata
                                            ? generate_metadata(target, options.match_rate, 2, derive_seed(seed, 1))
                                            : MetadataColumn::constant(options.n);
        FitConfig job_config = config;
        job_config.seed = derive_seed(seed, 2);
        const FitResult fitted = fit(planted.graph, metadata, job_config);
        const double accuracy = fraction_correct(fitted.assignment, target, 2);
        (with_metadata ? result.accuracy_with : result.accuracy_without)[rep] = accuracy;
    });

    auto success_rate = [&](const std::vector<double>& acc) {
        const auto hits = std::count_if(acc.begin(), acc.end(),
                                        [&](double a) { return a > options.success_threshold; });
        return static_cast<double>(hits) / static_cast<double>(acc.size());
    };
    result.success_with = success_rate(result.accuracy_with);
    result.success_without = success_rate(result.accuracy_without);
    return result;
}

void write_fig1b_csv(std::ostream& out, const Fig1bResult& result, double success_threshold) {
    out << "rep,acc_with,acc_without,success_with,success_without\n";
    out.precision(10);
    for (std::size_t r = 0; r < result.accuracy_with.size(); ++r) {
        out << r << ',' << result.accuracy_with[r] << ',' << result.accuracy_without[r] << ','
            << (result.accuracy_with[r] > success_threshold ? 1 : 0) << ','
            << (result.accuracy_without[r] > success_threshold ? 1 : 0) << '\n';
    }
}

}  // namespace annet
