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
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "annet/em.hpp"
#include "annet/metadata.hpp"
#include "annet/prior.hpp"

namespace annet {

/// Provenance block embedded in every JSON report.
struct RunManifest {
    std::string subcommand;
    std::vector<std::pair<std::string, std::string>> inputs;
    std::vector<std::pair<std::string, std::string>> outputs;
    std::uint64_t seed = 0;
    std::string version;
    /// ISO-8601 UTC; the only field allowed to differ between identical runs.
    std::string timestamp;
};

/// A fitted prior together with the metadata encoding needed to apply it to
/// raw values: category labels for discrete priors, the rescale transform
/// for Bernstein priors.
struct PriorModel {
    Prior prior;
    std::vector<std::string> labels;
    RescaleTransform transform;
};

nlohmann::json to_json(const FitConfig& config);
nlohmann::json to_json(const RunManifest& manifest);
nlohmann::json to_json(const BlockAffinity& theta);

/// {kind, k, K | N, gamma (row-major k x K or k x (N + 1)), labels | transform}
nlohmann::json prior_to_json(const Prior& prior, const MetadataColumn& metadata);

/// Inverse of prior_to_json; also accepts a whole fit report (reads its
/// "prior" member). Throws InputError on malformed input.
PriorModel prior_model_from_json(const nlohmann::json& json);

/// Full fit report: manifest, config echo, likelihood, assignment, prior,
/// theta, NMI and per-restart summaries.
nlohmann::json fit_report(const FitResult& result, const MetadataColumn& metadata, const FitConfig& config,
                          const RunManifest& manifest);

/// `node,community,probability` rows for every node and community.
void write_marginals_csv(std::ostream& out, const Matrix& node_marginals);

/// `node,label` rows.
void write_labels_csv(std::ostream& out, std::span<const std::size_t> labels);

std::string utc_timestamp();

}  // namespace annet
