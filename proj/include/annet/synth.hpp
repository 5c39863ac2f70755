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
#include <iosfwd>
#include <vector>

#include "annet/em.hpp"
#include "annet/graph.hpp"
#include "annet/metadata.hpp"

namespace annet {

struct PlantedGraph {
    Graph graph;
    std::vector<std::size_t> truth;  ///< community of each node, in [0, k)
};

/// Standard (not degree-corrected) planted partition: k groups of equal size
/// (the first n % k groups get one extra node), node labels shuffled, each
/// within-group pair linked with probability c_in / n and each
/// between-group pair with c_out / n.
PlantedGraph generate_sbm(std::size_t n, std::size_t k, double c_in, double c_out, std::uint64_t seed);

/// Discrete metadata that equal the truth with probability `match_rate` and
/// otherwise take one of the K - 1 other values uniformly. Category labels
/// are "0".."K-1" and category index i carries label i.
MetadataColumn generate_metadata(std::span<const std::size_t> truth, double match_rate, std::size_t categories,
                                 std::uint64_t seed);

/// Critical value of c_in - c_out for two equal groups: sqrt(2 (c_in + c_out)).
double detectability_threshold(double c_in, double c_out);

struct Fig1aOptions {
    std::size_t n = 10000;
    double mean_degree = 8.0;
    std::vector<double> match_rates{0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<double> differences;  ///< values of c_in - c_out
    int reps = 10;
    FitConfig fit;                    ///< k is forced to 2
    std::uint64_t seed = 1;
    std::size_t threads = 1;
};

struct Fig1aRow {
    double match_rate = 0.0;
    double difference = 0.0;
    double mean_accuracy = 0.0;
    double stderr_accuracy = 0.0;
    int reps = 0;
    std::vector<double> accuracies;
};

/// Two-group accuracy sweep over (match rate, c_in - c_out) at fixed mean
/// degree (c_in + c_out) / 2.
std::vector<Fig1aRow> benchmark_fig1a(const Fig1aOptions& options);

/// CSV with header `rho,diff,mean_acc,stderr,reps`.
void write_fig1a_csv(std::ostream& out, const std::vector<Fig1aRow>& rows);

struct Fig1bOptions {
    std::size_t n = 10000;
    double c_in = 20.0;
    double c_out = 4.0;
    double match_rate = 0.65;
    double success_threshold = 0.85;
    int reps = 100;
    FitConfig fit;  ///< k is forced to 2
    std::uint64_t seed = 1;
    std::size_t threads = 1;
};

struct Fig1bResult {
    double success_with = 0.0;
    double success_without = 0.0;
    std::vector<double> accuracy_with;
    std::vector<double> accuracy_without;
};

/// Four planted groups; the target division joins groups {0, 1} against
/// {2, 3}. Binary metadata agree with the target at `match_rate`. Each rep
/// fits k = 2 with those metadata and with a constant column and counts a
/// success when the accuracy against the target exceeds the threshold.
Fig1bResult benchmark_fig1b(const Fig1bOptions& options);

/// CSV with header `rep,acc_with,acc_without,success_with,success_without`.
void write_fig1b_csv(std::ostream& out, const Fig1bResult& result, double success_threshold);

}  // namespace annet
