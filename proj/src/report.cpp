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
#include "annet/report.hpp"

#include <chrono>
#include <ctime>
#include <ostream>

namespace annet {

using nlohmann::json;

namespace {

const char* numerics_name(BpNumerics n) {
    switch (n) {
        case BpNumerics::linear: return "linear";
        case BpNumerics::log: return "log";
        default: return "automatic";
    }
}

json pairs_to_json(const std::vector<std::pair<std::string, std::string>>& pairs) {
    json out = json::object();
    for (const auto& [key, value] : pairs) out[key] = value;
    return out;
}

Matrix gamma_from_json(const json& j, std::size_t rows, std::size_t cols) {
    const json& values = j.at("gamma");
    if (!values.is_array() || values.size() != rows * cols) {
        throw InputError("prior gamma must be an array of " + std::to_string(rows * cols) + " numbers");
    }
    Matrix gamma(rows, cols);
    for (std::size_t i = 0; i < values.size(); ++i) gamma.data()[i] = values[i].get<double>();
    for (std::size_t c = 0; c < cols; ++c) {
        double sum = 0.0;
        for (std::size_t s = 0; s < rows; ++s) {
            if (gamma(s, c) < 0.0 || gamma(s, c) > 1.0) throw InputError("prior gamma entries must lie in [0, 1]");
            sum += gamma(s, c);
        }
        if (std::abs(sum - 1.0) > 1e-6) throw InputError("prior gamma columns must sum to 1");
    }
    return gamma;
}

}  // namespace

json to_json(const FitConfig& config) {
    return {
        {"k", config.k},
        {"restarts", config.restarts},
        {"max_em_steps", config.max_em_steps},
        {"max_bp_steps", config.max_bp_steps},
        {"bp_tol", config.bp_tol},
        {"em_tol", config.em_tol},
        {"seed", config.seed},
        {"bernstein_degree", config.bernstein_degree},
        {"reproducible", config.reproducible},
        {"threads", config.threads},
        {"inner_tol", config.inner.tol},
        {"inner_max", config.inner.max_iterations},
        {"bp_numerics", numerics_name(config.numerics)},
    };
}

json to_json(const RunManifest& manifest) {
    return {
        {"subcommand", manifest.subcommand},
        {"inputs", pairs_to_json(manifest.inputs)},
        {"outputs", pairs_to_json(manifest.outputs)},
        {"seed", manifest.seed},
        {"version", manifest.version},
        {"timestamp", manifest.timestamp},
    };
}

json to_json(const BlockAffinity& theta) {
    json rows = json::array();
    for (std::size_t s = 0; s < theta.k(); ++s) {
        json row = json::array();
        for (std::size_t t = 0; t < theta.k(); ++t) row.push_back(theta(s, t));
        rows.push_back(std::move(row));
    }
    return rows;
}

json prior_to_json(const Prior& prior, const MetadataColumn& metadata) {
    json out;
    if (const auto* discrete = std::get_if<DiscretePrior>(&prior)) {
        out["kind"] = "discrete";
        out["k"] = discrete->k();
        out["K"] = discrete->category_count();
        out["labels"] = metadata.labels();
        out["gamma"] = discrete->gamma.data();
        return out;
    }
    const auto& bernstein = std::get<BernsteinPrior>(prior);
    out["kind"] = "ordered";
    out["k"] = bernstein.k();
    out["N"] = bernstein.degree();
    out["transform"] = {{"min", metadata.transform().min}, {"max", metadata.transform().max}};
    out["gamma"] = bernstein.gamma.data();
    return out;
}

PriorModel prior_model_from_json(const json& input) {
    try {
        const json& j = input.contains("prior") ? input.at("prior") : input;
        const std::string kind = j.at("kind").get<std::string>();
        const auto k = j.at("k").get<std::size_t>();
        if (k < 1) throw InputError("prior k must be at least 1");
        PriorModel model;
        if (kind == "discrete") {
            const auto categories = j.at("K").get<std::size_t>();
            model.prior = DiscretePrior{gamma_from_json(j, k, categories)};
            model.labels = j.at("labels").get<std::vector<std::string>>();
            if (model.labels.size() != categories) throw InputError("prior labels do not match K");
        } else if (kind == "ordered") {
            const int degree = j.at("N").get<int>();
            if (degree < 0) throw InputError("prior N must be non-negative");
            model.prior = BernsteinPrior{gamma_from_json(j, k, static_cast<std::size_t>(degree) + 1)};
            model.transform = {j.at("transform").at("min").get<double>(), j.at("transform").at("max").get<double>()};
        } else {
            throw InputError("unknown prior kind '" + kind + "'");
        }
        return model;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed prior model: ") + e.what());
    }
}

json fit_report(const FitResult& result, const MetadataColumn& metadata, const FitConfig& config,
                const RunManifest& manifest) {
    json per_restart = json::array();
    for (const RestartSummary& r : result.restarts) {
        per_restart.push_back({{"index", r.index},
                               {"seed", r.seed},
                               {"ll", r.log_likelihood},
                               {"converged", r.converged},
                               {"steps", r.em_steps}});
    }
    json report = {
        {"manifest", to_json(manifest)},
        {"config", to_json(config)},
        {"k", result.theta.k()},
        {"log_likelihood", result.log_likelihood},
        {"log_likelihood_note",
         "Bethe estimate with graph-only constants dropped; compare only between fits of the same graph"},
        {"converged", result.converged},
        {"em_steps", result.em_steps},
        {"restart_index", result.restart_index},
        {"assignment", result.assignment},
        {"prior", prior_to_json(result.prior, metadata)},
        {"theta", to_json(result.theta)},
        {"per_restart", std::move(per_restart)},
    };
    report["nmi"] = result.nmi_vs_metadata ? json(*result.nmi_vs_metadata) : json(nullptr);
    return report;
}

void write_marginals_csv(std::ostream& out, const Matrix& node_marginals) {
    out << "node,community,probability\n";
    out.precision(17);
    for (std::size_t u = 0; u < node_marginals.rows(); ++u) {
        for (std::size_t s = 0; s < node_marginals.cols(); ++s) {
            out << u << ',' << s << ',' << node_marginals(u, s) << '\n';
        }
    }
}

void write_labels_csv(std::ostream& out, std::span<const std::size_t> labels) {
    out << "node,label\n";
    for (std::size_t u = 0; u < labels.size(); ++u) out << u << ',' << labels[u] << '\n';
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

}  // namespace annet
