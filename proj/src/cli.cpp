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
#include "annet/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "annet/em.hpp"
#include "annet/graph.hpp"
#include "annet/metadata.hpp"
#include "annet/metrics.hpp"
#include "annet/random.hpp"
#include "annet/report.hpp"
#include "annet/synth.hpp"

#ifndef ANNET_VERSION
#define ANNET_VERSION "dev"
#endif

namespace annet {
namespace {

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    return out;
}

std::size_t default_threads() {
    if (const char* env = std::getenv("ANNET_THREADS")) {
        char* end = nullptr;
        const unsigned long value = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && value > 0) return value;
    }
    return 1;
}

std::string format_fixed(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, value);
    return buf;
}

struct FitArgs {
    std::string edges;
    std::string metadata;
    std::string out;
    std::string marginals;
    bool ordered = false;
    int degree = -1;
    std::size_t nodes = 0;
    FitConfig config;
};

int cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& err) {
    if (args.degree >= 0 && !args.ordered) throw InputError("--degree requires --ordered");
    FitConfig config = args.config;
    if (args.degree >= 0) config.bernstein_degree = args.degree;
    config.reproducible = config.threads == 1;

    std::ifstream edge_stream = open_input(args.edges);
    const Graph graph = load_edge_list(edge_stream, {args.nodes});
    MetadataColumn metadata = MetadataColumn::constant(graph.node_count());
    if (!args.metadata.empty()) {
        std::ifstream meta_stream = open_input(args.metadata);
        metadata = load_metadata(meta_stream, args.ordered ? MetadataKind::ordered : MetadataKind::discrete,
                                 graph.node_count());
    } else if (args.ordered) {
        throw InputError("--ordered requires --metadata");
    }

    const FitResult result = fit(graph, metadata, config);

    RunManifest manifest;
    manifest.subcommand = "fit";
    manifest.inputs = {{"edges", args.edges}, {"metadata", args.metadata}};
    manifest.outputs = {{"report", args.out.empty() ? "-" : args.out}, {"marginals", args.marginals}};
    manifest.seed = config.seed;
    manifest.version = ANNET_VERSION;
    manifest.timestamp = utc_timestamp();
    const std::string text = fit_report(result, metadata, config, manifest).dump(2) + "\n";
    if (args.out.empty() || args.out == "-") {
        out << text;
    } else {
        open_output(args.out) << text;
    }
    if (!args.marginals.empty()) {
        std::ofstream csv = open_output(args.marginals);
        write_marginals_csv(csv, result.marginals.node);
    }
    if (!result.converged) {
        err << "warning: no restart converged within " << config.max_em_steps
            << " EM steps; reporting the best non-converged run\n";
        return kExitNoConvergedRestart;
    }
    return kExitOk;
}

int cmd_predict(const std::string& model_path, const std::string& value, std::ostream& out, std::ostream& err) {
    std::ifstream in = open_input(model_path);
    nlohmann::json json;
    try {
        json = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("cannot parse model '" + model_path + "': " + e.what());
    }
    const PriorModel model = prior_model_from_json(json);
    Prediction prediction;
    if (const auto* discrete = std::get_if<DiscretePrior>(&model.prior)) {
        std::optional<std::size_t> category;
        for (std::size_t i = 0; i < model.labels.size(); ++i) {
            if (model.labels[i] == value) category = i;
        }
        prediction = predict_from_metadata(*discrete, category);
        if (prediction.fallback) {
            err << "warning: unknown category '" << value << "'; returning the uniform distribution\n";
        }
    } else {
        char* end = nullptr;
        const double raw = std::strtod(value.c_str(), &end);
        if (value.empty() || end != value.c_str() + value.size()) {
            throw InputError("model has ordered metadata but '" + value + "' is not a number");
        }
        const auto& transform = model.transform;
        if (raw < transform.min || raw > transform.max) {
            err << "warning: value " << value << " outside training range [" << transform.min << ", "
                << transform.max << "]; clamped\n";
        }
        prediction = predict_from_metadata(std::get<BernsteinPrior>(model.prior), transform, raw);
    }
    out << nlohmann::json(prediction.probabilities).dump() << "\n";
    return kExitOk;
}

struct GenerateArgs {
    std::size_t n = 1000;
    std::size_t k = 2;
    double c_in = 12.0;
    double c_out = 4.0;
    double rho = 0.5;
    std::size_t categories = 0;
    std::uint64_t seed = 1;
    std::string prefix = "planted";
};

int cmd_generate(const GenerateArgs& args, std::ostream& out) {
    const PlantedGraph planted = generate_sbm(args.n, args.k, args.c_in, args.c_out, derive_seed(args.seed, 0));
    const std::size_t categories = args.categories == 0 ? args.k : args.categories;
    const MetadataColumn metadata = generate_metadata(planted.truth, args.rho, categories, derive_seed(args.seed, 1));
    const std::string edges_path = args.prefix + ".edges";
    const std::string meta_path = args.prefix + ".meta.csv";
    const std::string truth_path = args.prefix + ".truth.csv";
    {
        std::ofstream f = open_output(edges_path);
        write_edge_list(f, planted.graph);
    }
    {
        std::ofstream f = open_output(meta_path);
        write_metadata(f, metadata);
    }
    {
        std::ofstream f = open_output(truth_path);
        write_labels_csv(f, planted.truth);
    }
    out << edges_path << "\n" << meta_path << "\n" << truth_path << "\n";
    return kExitOk;
}

int cmd_nmi(const std::string& a_path, const std::string& b_path, std::ostream& out) {
    std::ifstream a_in = open_input(a_path);
    std::ifstream b_in = open_input(b_path);
    const std::vector<int> a = load_labels(a_in);
    const std::vector<int> b = load_labels(b_in);
    out << format_fixed(nmi(std::span<const int>(a), std::span<const int>(b)), 6) << "\n";
    return kExitOk;
}

void add_fit_flags(CLI::App& cmd, FitConfig& config) {
    cmd.add_option("--restarts", config.restarts, "Random restarts")->check(CLI::PositiveNumber);
    cmd.add_option("--max-em-steps", config.max_em_steps, "EM step limit per restart")->check(CLI::PositiveNumber);
    cmd.add_option("--max-bp-steps", config.max_bp_steps, "BP sweep limit per EM step")->check(CLI::PositiveNumber);
    cmd.add_option("--tol", config.em_tol, "EM convergence tolerance")->check(CLI::PositiveNumber);
    cmd.add_option("--bp-tol", config.bp_tol, "BP convergence tolerance")->check(CLI::PositiveNumber);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Community detection in annotated networks with a metadata-aware degree-corrected block model",
                 "annet"};
    app.set_version_flag("--version", ANNET_VERSION);
    app.require_subcommand(1);
    const std::size_t threads = default_threads();

    FitArgs fit_args;
    fit_args.config.threads = threads;
    auto* fit_cmd = app.add_subcommand("fit", "Fit the model to a network and its metadata");
    fit_cmd->add_option("--edges", fit_args.edges, "Edge list file")->required();
    fit_cmd->add_option("--metadata", fit_args.metadata, "Metadata CSV (node,value); omit to fit without metadata");
    fit_cmd->add_option("--k", fit_args.config.k, "Number of communities")->required()->check(CLI::PositiveNumber);
    fit_cmd->add_flag("--ordered", fit_args.ordered, "Treat metadata as ordered reals");
    fit_cmd->add_option("--degree", fit_args.degree, "Bernstein degree for ordered metadata (default 4)")
        ->check(CLI::NonNegativeNumber);
    fit_cmd->add_option("--nodes", fit_args.nodes, "Minimum node count (for trailing isolated nodes)");
    add_fit_flags(*fit_cmd, fit_args.config);
    fit_cmd->add_option("--seed", fit_args.config.seed, "Master seed");
    fit_cmd->add_option("--threads", fit_args.config.threads, "Worker threads for restarts")
        ->check(CLI::PositiveNumber);
    fit_cmd->add_option("--out", fit_args.out, "Report path (default: stdout)");
    fit_cmd->add_option("--marginals", fit_args.marginals, "Write node marginals CSV here");

    std::string model_path;
    std::string value;
    auto* predict_cmd = app.add_subcommand("predict", "Community probabilities from metadata alone");
    predict_cmd->add_option("--model", model_path, "Fit report or prior JSON")->required();
    predict_cmd->add_option("--value", value, "Metadata value (category label or number)")->required();

    GenerateArgs gen;
    auto* gen_cmd = app.add_subcommand("generate", "Planted-partition network with correlated metadata");
    gen_cmd->add_option("--n", gen.n, "Nodes")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--k", gen.k, "Groups")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--cin", gen.c_in, "Within-group expected degree parameter");
    gen_cmd->add_option("--cout", gen.c_out, "Between-group expected degree parameter");
    gen_cmd->add_option("--rho", gen.rho, "Metadata match rate")->check(CLI::Range(0.0, 1.0));
    gen_cmd->add_option("--categories", gen.categories, "Metadata categories (default k)");
    gen_cmd->add_option("--seed", gen.seed, "Seed");
    gen_cmd->add_option("--out", gen.prefix, "Output prefix");

    auto* bench_cmd = app.add_subcommand("benchmark", "Synthetic benchmarks");
    bench_cmd->require_subcommand(1);
    Fig1aOptions fig1a;
    fig1a.threads = threads;
    fig1a.differences = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
    std::string fig1a_out;
    auto* fig1a_cmd = bench_cmd->add_subcommand("fig1a", "Accuracy vs c_in - c_out for several match rates");
    fig1a_cmd->add_option("--n", fig1a.n, "Nodes")->check(CLI::PositiveNumber);
    fig1a_cmd->add_option("--c-mean", fig1a.mean_degree, "Mean degree (c_in + c_out) / 2");
    fig1a_cmd->add_option("--rho", fig1a.match_rates, "Match rates")->delimiter(',');
    fig1a_cmd->add_option("--diff", fig1a.differences, "Values of c_in - c_out")->delimiter(',');
    fig1a_cmd->add_option("--reps", fig1a.reps, "Networks per cell")->check(CLI::PositiveNumber);
    add_fit_flags(*fig1a_cmd, fig1a.fit);
    fig1a_cmd->add_option("--seed", fig1a.seed, "Master seed");
    fig1a_cmd->add_option("--threads", fig1a.threads, "Worker threads")->check(CLI::PositiveNumber);
    fig1a_cmd->add_option("--out", fig1a_out, "CSV path (default: stdout)");

    Fig1bOptions fig1b;
    fig1b.threads = threads;
    std::string fig1b_out;
    auto* fig1b_cmd = bench_cmd->add_subcommand("fig1b", "Selecting one of several competing divisions");
    fig1b_cmd->add_option("--n", fig1b.n, "Nodes")->check(CLI::PositiveNumber);
    fig1b_cmd->add_option("--reps", fig1b.reps, "Networks")->check(CLI::PositiveNumber);
    fig1b_cmd->add_option("--cin", fig1b.c_in, "Within-group parameter");
    fig1b_cmd->add_option("--cout", fig1b.c_out, "Between-group parameter");
    fig1b_cmd->add_option("--match", fig1b.match_rate, "Metadata agreement with the target")
        ->check(CLI::Range(0.0, 1.0));
    add_fit_flags(*fig1b_cmd, fig1b.fit);
    fig1b_cmd->add_option("--seed", fig1b.seed, "Master seed");
    fig1b_cmd->add_option("--threads", fig1b.threads, "Worker threads")->check(CLI::PositiveNumber);
    fig1b_cmd->add_option("--out", fig1b_out, "Per-rep CSV path");

    std::string nmi_a;
    std::string nmi_b;
    auto* nmi_cmd = app.add_subcommand("nmi", "Min-normalized mutual information of two label files");
    nmi_cmd->add_option("a", nmi_a, "node,label CSV")->required();
    nmi_cmd->add_option("b", nmi_b, "node,label CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        const auto chosen = app.get_subcommands();
        err << (chosen.empty() ? app.help() : chosen.front()->help());
        return kExitInputError;
    }

    try {
        if (*fit_cmd) return cmd_fit(fit_args, out, err);
        if (*predict_cmd) return cmd_predict(model_path, value, out, err);
        if (*gen_cmd) return cmd_generate(gen, out);
        if (*nmi_cmd) return cmd_nmi(nmi_a, nmi_b, out);
        if (*fig1a_cmd) {
            const auto rows = benchmark_fig1a(fig1a);
            if (fig1a_out.empty() || fig1a_out == "-") {
                write_fig1a_csv(out, rows);
            } else {
                std::ofstream f = open_output(fig1a_out);
                write_fig1a_csv(f, rows);
            }
            return kExitOk;
        }
        if (*fig1b_cmd) {
            const Fig1bResult result = benchmark_fig1b(fig1b);
            out << "success_with " << format_fixed(result.success_with, 4) << "\n"
                << "success_without " << format_fixed(result.success_without, 4) << "\n";
            if (!fig1b_out.empty()) {
                std::ofstream f = open_output(fig1b_out);
                write_fig1b_csv(f, result, fig1b.success_threshold);
            }
            return kExitOk;
        }
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kExitNoConvergedRestart;
    }
    return kExitInputError;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"annet"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace annet
