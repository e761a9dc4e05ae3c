// Command-line front end: simulate, embed-linear, learn, tune, evaluate, benchmark.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pdag/benchmark.hpp"
#include "pdag/digest.hpp"
#include "pdag/io.hpp"
#include "pdag/parallel.hpp"
#include "pdag/pipeline.hpp"
#include "pdag/simulation.hpp"

namespace {

using Json = nlohmann::ordered_json;
constexpr const char* kVersion = "1.0.0";

// Flat key-value JSON config. Keys are long option names without the leading dashes; underscores
// are accepted in place of hyphens. Values given on the command line take precedence.
// CLI11 only reads config files on the top-level app, which runs after the subcommand has been
// parsed, so every key is routed to whichever subcommand was selected.
class JsonConfig : public CLI::Config {
public:
    explicit JsonConfig(const CLI::App* root) : root_(root) {}

    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override
    {
        Json j;
        try {
            j = Json::parse(input);
        } catch (const Json::parse_error& e) {
            throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw CLI::ConversionError("config file must hold a flat JSON object");
        std::vector<std::string> parents;
        const CLI::App* target = root_;
        for (const CLI::App* sub : root_->get_subcommands()) {
            parents.push_back(sub->get_name());
            target = sub;
        }
        std::vector<CLI::ConfigItem> items;
        for (const auto& [key, value] : j.items()) {
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = key;
            for (auto& ch : item.name) {
                if (ch == '_') ch = '-';
            }
            if (value.is_object()) throw CLI::ConversionError("config key '" + key + "' must not be nested");
            if (item.name == "config" || target->get_option_no_throw("--" + item.name) == nullptr) {
                throw CLI::ConversionError("config key '" + key + "' is not an option of '" + target->get_name() + "'");
            }
            if (value.is_array()) {
                for (const auto& v : value) item.inputs.push_back(scalar(v, key));
            } else {
                item.inputs.push_back(scalar(value, key));
            }
            items.push_back(std::move(item));
        }
        return items;
    }

private:
    const CLI::App* root_;

    static std::string scalar(const Json& v, const std::string& key)
    {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        if (v.is_number()) return v.dump();
        throw CLI::ConversionError("config key '" + key + "' has an unsupported value");
    }
};

struct LearnerFlags {
    int trials = 4;
    int clusters = 0;
    double tau1 = 0.0;
    double tau2 = 0.0;
    int n0 = 2;
    int cv_folds = 5;
    int grid_size = 20;
    std::uint64_t seed = 1;
    bool homogeneous = false;
    int threads = 0;
    bool restrict_to_neighborhood = false;
    int embedding_dim = 1;
    int max_iter = 5000;
    double kkt_tol = 1e-4;

    pdag::PipelineConfig pipeline() const
    {
        pdag::PipelineConfig c;
        c.clusters = clusters;
        c.tau1 = tau1;
        c.tau2 = tau2;
        c.n0 = n0;
        c.cv_folds = cv_folds;
        c.grid_size = grid_size;
        c.seed = seed;
        c.homogeneous = homogeneous;
        c.threads = threads;
        c.restrict_to_neighborhood = restrict_to_neighborhood;
        c.embedding_dim = embedding_dim;
        c.solver.max_iter = max_iter;
        c.solver.kkt_tol = kkt_tol;
        return c;
    }

    Json to_json() const
    {
        Json j;
        j["trials"] = trials;
        j["clusters"] = clusters;
        j["tau1"] = tau1;
        j["tau2"] = tau2;
        j["n0"] = n0;
        j["cv_folds"] = cv_folds;
        j["grid_size"] = grid_size;
        j["seed"] = seed;
        j["homogeneous"] = homogeneous;
        j["threads"] = threads;
        j["restrict_to_neighborhood"] = restrict_to_neighborhood;
        j["embedding_dim"] = embedding_dim;
        j["max_iter"] = max_iter;
        j["kkt_tol"] = kkt_tol;
        return j;
    }
};

void add_learner_flags(CLI::App* app, LearnerFlags& f)
{
    app->add_option("--trials", f.trials, "Binomial trial count T")->check(CLI::PositiveNumber);
    app->add_option("--clusters", f.clusters, "Cluster count M (0: min(n, max(20, ceil(sqrt n))))")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--tau1", f.tau1, "Bandwidth of the regression weights (0: n^-1/5)")->check(CLI::NonNegativeNumber);
    app->add_option("--tau2", f.tau2, "Bandwidth of the ordering weights (0: n^-1/5)")->check(CLI::NonNegativeNumber);
    app->add_option("--n0", f.n0, "Minimum pattern count in the ordering scores")->check(CLI::PositiveNumber);
    app->add_option("--cv-folds", f.cv_folds, "Cross-validation folds")->check(CLI::Range(2, 1000000));
    app->add_option("--grid-size", f.grid_size, "Penalty grid points")->check(CLI::Range(2, 1000000));
    app->add_option("--seed", f.seed, "Seed for clustering and fold assignment");
    app->add_flag("--homogeneous", f.homogeneous, "Ignore covariates: uniform weights and a single cluster");
    app->add_option("--threads", f.threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    app->add_flag("--restrict-to-neighborhood", f.restrict_to_neighborhood,
                  "Search parents only inside the estimated neighbourhood");
    app->add_option("--embedding-dim", f.embedding_dim, "Dimension of the linear embedding")->check(CLI::PositiveNumber);
    app->add_option("--max-iter", f.max_iter, "Solver iteration cap")->check(CLI::PositiveNumber);
    app->add_option("--kkt-tol", f.kkt_tol, "Solver KKT tolerance")->check(CLI::PositiveNumber);
}

struct InputFiles {
    std::string counts;
    std::string covariates;
    std::string network;
    std::string embeddings;
};

struct LoadedInputs {
    std::optional<pdag::Dataset> dataset;
    std::optional<pdag::RelationshipNetwork> network;
    std::optional<pdag::EmbeddingSet> embeddings;
    Json digests = Json::object();
};

// Reads an input file and records it under its role so manifests stay comparable across paths.
std::string load(const char* role, const std::string& path, Json& digests)
{
    std::string text;
    try {
        text = pdag::read_file(path);
    } catch (const pdag::InputError& e) {
        throw pdag::InputError(std::string(role) + " file: " + e.what());
    }
    digests[role] = Json{{"path", path}, {"sha256", pdag::sha256_hex(text)}};
    return text;
}

LoadedInputs load_inputs(const InputFiles& files, int trials, bool need_side_information)
{
    LoadedInputs in;
    const pdag::CountMatrix counts = pdag::parse_counts_csv(load("counts", files.counts, in.digests), files.counts);
    const auto n = counts.rows();
    Eigen::MatrixXd covariates(n, 0);
    if (!files.covariates.empty()) {
        covariates = pdag::parse_real_csv(load("covariates", files.covariates, in.digests), 'z', files.covariates);
        if (covariates.rows() != n) {
            throw pdag::InputError(files.covariates + ": has " + std::to_string(covariates.rows()) + " rows but " +
                                   files.counts + " has " + std::to_string(n));
        }
    }
    try {
        in.dataset.emplace(counts, std::move(covariates), trials);
    } catch (const pdag::InputError& e) {
        throw pdag::InputError(files.counts + ": " + e.what());
    }
    if (!files.embeddings.empty()) {
        Eigen::MatrixXd h = pdag::parse_real_csv(load("embeddings", files.embeddings, in.digests), 'h', files.embeddings);
        if (h.rows() != n) {
            throw pdag::InputError(files.embeddings + ": has " + std::to_string(h.rows()) + " rows but " +
                                   files.counts + " has " + std::to_string(n));
        }
        in.embeddings.emplace(std::move(h));
    } else if (!files.network.empty()) {
        in.network.emplace(pdag::parse_edge_list(load("network", files.network, in.digests), static_cast<int>(n), files.network));
        if (files.covariates.empty()) throw pdag::InputError("--network requires --covariates");
    } else if (need_side_information) {
        throw pdag::InputError("give --network with --covariates, or --embeddings (or use --homogeneous)");
    }
    return in;
}

Json manifest_base(const std::string& command, const std::vector<std::string>& argv)
{
    Json m;
    m["tool"] = "pdag";
    m["version"] = kVersion;
    m["command"] = command;
    m["argv"] = argv;
    m["compiler"] = __VERSION__;
    m["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    return m;
}

void write_output(const std::string& path, const std::string& content, Json& manifest)
{
    pdag::write_atomic(path, content);
    manifest["outputs"][path] = pdag::sha256_hex(content);
}

std::vector<int> parse_int_list(const std::string& s)
{
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw pdag::InputError("cannot parse '" + tok + "' as an integer");
        }
    }
    return out;
}

Json report_json(const pdag::CvReport& r)
{
    Json j;
    j["lambdas"] = r.lambdas;
    j["mean_mse"] = r.mean_mse;
    j["standard_error"] = r.standard_error;
    j["used_folds"] = r.used_folds;
    j["warnings"] = r.warnings;
    return j;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Personalized Binomial DAG learner"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    const std::vector<std::string> args(argv, argv + argc);
    app.config_formatter(std::make_shared<JsonConfig>(&app));
    app.set_config("--config", "", "Flat JSON config file applied to the chosen subcommand; flags take precedence");
    app.allow_config_extras(false);
    app.fallthrough();

    // simulate
    pdag::SimConfig sim;
    std::string sim_setup = "linear";
    std::string sim_dir = ".";
    auto* simulate = app.add_subcommand("simulate", "Draw a two-community benchmark data set");
    simulate->add_option("--n", sim.n, "Observations")->check(CLI::Range(2, 100000000));
    simulate->add_option("--dx", sim.dx, "DAG nodes")->check(CLI::PositiveNumber);
    simulate->add_option("--dz", sim.dz, "Covariates");
    simulate->add_option("--dz0", sim.dz0, "Embedding dimension recorded with the data");
    simulate->add_option("--setup", sim_setup, "linear or nonlinear")->check(CLI::IsMember({"linear", "nonlinear"}));
    simulate->add_option("--a", sim.a, "Within-community edge factor");
    simulate->add_option("--b", sim.b, "Between-community edge factor");
    simulate->add_option("--c-coef", sim.c_coef, "Distance coefficient in the edge model");
    simulate->add_option("--trials", sim.trials, "Binomial trial count T")->check(CLI::PositiveNumber);
    simulate->add_option("--mean-shift", sim.mean_shift, "Covariate mean of community 2");
    simulate->add_option("--seed", sim.seed, "Random seed");
    simulate->add_option("--out-dir", sim_dir, "Directory for counts.csv, covariates.csv, network.edges, truth.json");

    // embed-linear
    InputFiles emb_files;
    int emb_dim = 1;
    std::string emb_out;
    auto* embed_linear = app.add_subcommand("embed-linear", "Learn the linear embedding and write h1..hd0");
    embed_linear->add_option("--covariates", emb_files.covariates, "Covariates CSV (z1..)")->required();
    embed_linear->add_option("--network", emb_files.network, "Edge list")->required();
    embed_linear->add_option("--dim", emb_dim, "Embedding dimension")->check(CLI::PositiveNumber);
    embed_linear->add_option("--out", emb_out, "Embeddings CSV")->required();

    // learn
    InputFiles learn_files;
    LearnerFlags learn_flags;
    std::string learn_out;
    std::string learn_manifest;
    auto* learn = app.add_subcommand("learn", "Run the full learner and write the estimated DAG as JSON");
    learn->add_option("--counts", learn_files.counts, "Counts CSV (x1..)")->required();
    learn->add_option("--covariates", learn_files.covariates, "Covariates CSV (z1..)");
    auto* learn_net = learn->add_option("--network", learn_files.network, "Edge list");
    learn->add_option("--embeddings", learn_files.embeddings, "Precomputed embeddings CSV (h1..)")->excludes(learn_net);
    learn->add_option("--out", learn_out, "DAG JSON")->required();
    learn->add_option("--manifest", learn_manifest, "Run manifest (default: <out>.manifest.json)");
    add_learner_flags(learn, learn_flags);

    // tune
    InputFiles tune_files;
    LearnerFlags tune_flags;
    std::string tune_out;
    std::string tune_nodes;
    std::string tune_predictors;
    auto* tune = app.add_subcommand("tune", "Cross-validate the penalty of individual regressions");
    tune->add_option("--counts", tune_files.counts, "Counts CSV (x1..)")->required();
    tune->add_option("--covariates", tune_files.covariates, "Covariates CSV (z1..)");
    auto* tune_net = tune->add_option("--network", tune_files.network, "Edge list");
    tune->add_option("--embeddings", tune_files.embeddings, "Precomputed embeddings CSV (h1..)")->excludes(tune_net);
    tune->add_option("--nodes", tune_nodes, "Comma-separated target nodes (default: all)");
    tune->add_option("--predictors", tune_predictors,
                     "Comma-separated predictor nodes (default: every other node)");
    tune->add_option("--out", tune_out, "Report JSON")->required();
    add_learner_flags(tune, tune_flags);

    // evaluate
    std::string eval_estimate;
    std::string eval_truth;
    std::string eval_out;
    auto* evaluate = app.add_subcommand("evaluate", "Score an estimated DAG against simulation ground truth");
    evaluate->add_option("--estimate", eval_estimate, "DAG JSON from learn")->required();
    evaluate->add_option("--truth", eval_truth, "truth.json from simulate")->required();
    evaluate->add_option("--out", eval_out, "Metrics JSON (default: stdout)");

    // benchmark
    LearnerFlags bench_flags;
    std::vector<int> bench_n{500, 2500};
    std::vector<int> bench_dx{10};
    std::vector<std::string> bench_setups{"linear"};
    std::vector<std::string> bench_methods{"personalized", "homogeneous"};
    int bench_reps = 10;
    std::string bench_out = "benchmark.csv";
    std::string bench_summary;
    auto* benchmark = app.add_subcommand("benchmark", "Simulation grid comparing personalized and homogeneous fits");
    benchmark->add_option("--n", bench_n, "Sample sizes")->delimiter(',');
    benchmark->add_option("--dx", bench_dx, "Node counts")->delimiter(',');
    benchmark->add_option("--setup", bench_setups, "linear and/or nonlinear")->delimiter(',')
        ->check(CLI::IsMember({"linear", "nonlinear"}));
    benchmark->add_option("--methods", bench_methods, "personalized and/or homogeneous")->delimiter(',')
        ->check(CLI::IsMember({"personalized", "homogeneous"}));
    benchmark->add_option("--repetitions", bench_reps, "Repetitions per grid cell")->check(CLI::PositiveNumber);
    benchmark->add_option("--out", bench_out, "Per-run CSV");
    benchmark->add_option("--summary", bench_summary, "Aggregated CSV (default: <out> with _summary suffix)");
    add_learner_flags(benchmark, bench_flags);

    CLI11_PARSE(app, argc, argv);

    const auto started = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count(); };

    try {
        if (simulate->parsed()) {
            sim.setup = pdag::parse_setup(sim_setup);
            const pdag::Simulation s = pdag::simulate(sim);
            Json manifest = manifest_base("simulate", args);
            manifest["config"] = {{"n", sim.n},         {"dx", sim.dx},         {"dz", sim.dz},
                                  {"dz0", sim.dz0},     {"setup", sim_setup},   {"a", sim.a},
                                  {"b", sim.b},         {"c_coef", sim.c_coef}, {"trials", sim.trials},
                                  {"mean_shift", sim.mean_shift}, {"seed", sim.seed}};
            std::filesystem::create_directories(sim_dir);
            const std::string base = sim_dir + "/";
            write_output(base + "counts.csv", pdag::counts_csv(s.dataset.counts()), manifest);
            write_output(base + "covariates.csv", pdag::real_csv(s.dataset.covariates(), 'z'), manifest);
            write_output(base + "network.edges", pdag::edge_list(s.network), manifest);
            write_output(base + "truth.json", pdag::truth_json(s.truth, s.labels), manifest);
            manifest["elapsed_seconds"] = elapsed();
            pdag::write_atomic(base + "manifest.json", manifest.dump(2) + "\n");
            std::cout << "wrote " << sim_dir << "/{counts.csv,covariates.csv,network.edges,truth.json,manifest.json}\n";
        } else if (embed_linear->parsed()) {
            Json manifest = manifest_base("embed-linear", args);
            Json digests = Json::object();
            const Eigen::MatrixXd z =
                pdag::parse_real_csv(load("covariates", emb_files.covariates, digests), 'z', emb_files.covariates);
            const pdag::RelationshipNetwork net = pdag::parse_edge_list(
                load("network", emb_files.network, digests), static_cast<int>(z.rows()), emb_files.network);
            manifest["inputs"] = digests;
            manifest["config"] = {{"dim", emb_dim}};
            const pdag::LinearEmbedding emb =
                pdag::fit_linear_embedding(pdag::scatter_matrix(z, net), pdag::default_normalizer(z), emb_dim);
            const pdag::EmbeddingSet h = pdag::embed(emb, z);
            manifest["eigenvalues"] = std::vector<double>(emb.eigenvalues.data(),
                                                          emb.eigenvalues.data() + emb.eigenvalues.size());
            write_output(emb_out, pdag::real_csv(h.values, 'h'), manifest);
            manifest["elapsed_seconds"] = elapsed();
            pdag::write_atomic(emb_out + ".manifest.json", manifest.dump(2) + "\n");
        } else if (learn->parsed()) {
            const pdag::PipelineConfig pc = learn_flags.pipeline();
            LoadedInputs in = load_inputs(learn_files, learn_flags.trials, !learn_flags.homogeneous);
            Json manifest = manifest_base("learn", args);
            manifest["inputs"] = in.digests;
            manifest["config"] = learn_flags.to_json();
            const pdag::PipelineResult res = [&] {
                if (learn_flags.homogeneous) return pdag::run_homogeneous(*in.dataset, pc);
                if (in.embeddings) return pdag::run_pipeline(*in.dataset, *in.embeddings, pc);
                return pdag::run_pipeline(*in.dataset, *in.network, pc);
            }();
            manifest["effective"] = {{"clusters", res.clusters},
                                     {"tau1", res.tau1},
                                     {"tau2", res.tau2},
                                     {"threads", pdag::resolve_threads(learn_flags.threads)}};
            manifest["parent_lambdas"] = res.estimate.parent_lambdas;
            manifest["warnings"] = res.warnings;
            write_output(learn_out, pdag::dag_json(res.estimate), manifest);
            manifest["elapsed_seconds"] = elapsed();
            const std::string mpath = learn_manifest.empty() ? learn_out + ".manifest.json" : learn_manifest;
            pdag::write_atomic(mpath, manifest.dump(2) + "\n");
            for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
        } else if (tune->parsed()) {
            pdag::PipelineConfig pc = tune_flags.pipeline();
            pc.validate();
            LoadedInputs in = load_inputs(tune_files, tune_flags.trials, !tune_flags.homogeneous);
            const int d = in.dataset->dx();
            std::optional<pdag::EmbeddingSet> emb = in.embeddings;
            if (!tune_flags.homogeneous && !emb) {
                emb = pdag::linear_embedding(*in.dataset, *in.network, tune_flags.embedding_dim);
            }
            int clusters = 1;
            double tau1 = 0.0;
            const pdag::ClusterContext ctx = pdag::make_context(*in.dataset, emb, pc, clusters, tau1);
            std::vector<int> nodes = tune_nodes.empty() ? std::vector<int>{} : parse_int_list(tune_nodes);
            if (nodes.empty()) {
                for (int j = 0; j < d; ++j) nodes.push_back(j);
            }
            const std::vector<int> fixed_preds =
                tune_predictors.empty() ? std::vector<int>{} : parse_int_list(tune_predictors);
            pdag::TuningOptions topts;
            topts.folds = pc.cv_folds;
            topts.grid_size = pc.grid_size;
            topts.seed = pc.seed;
            topts.solver = pc.solver;
            Json reports = Json::array();
            for (int j : nodes) {
                if (j < 0 || j >= d) throw pdag::InputError("--nodes: node " + std::to_string(j) + " out of range");
                std::vector<int> preds;
                for (int l = 0; l < d; ++l) {
                    const bool listed = fixed_preds.empty() ||
                                        std::find(fixed_preds.begin(), fixed_preds.end(), l) != fixed_preds.end();
                    if (l != j && listed) preds.push_back(l);
                }
                const pdag::RegressionTask task(*in.dataset, ctx, j, preds);
                const pdag::TuningResult r = pdag::tune_lambda(task, topts);
                Json entry;
                entry["node"] = j;
                entry["predictors"] = preds;
                entry["lambda"] = r.lambda;
                entry["report"] = report_json(r.report);
                reports.push_back(entry);
            }
            Json manifest = manifest_base("tune", args);
            manifest["inputs"] = in.digests;
            manifest["config"] = tune_flags.to_json();
            manifest["effective"] = {{"clusters", clusters}, {"tau1", tau1}};
            Json out;
            out["results"] = reports;
            write_output(tune_out, out.dump(2) + "\n", manifest);
            manifest["elapsed_seconds"] = elapsed();
            pdag::write_atomic(tune_out + ".manifest.json", manifest.dump(2) + "\n");
        } else if (evaluate->parsed()) {
            Json digests = Json::object();
            const pdag::DagEstimate est = pdag::parse_dag_json(load("estimate", eval_estimate, digests), eval_estimate);
            const pdag::GroundTruth truth = pdag::parse_truth_json(load("truth", eval_truth, digests), eval_truth);
            const pdag::MetricsRow m = pdag::eval_metrics(est, truth);
            Json j;
            j["ordering_accuracy"] = m.ordering_accuracy;
            j["moral_precision"] = m.moral_precision;
            j["moral_recall"] = m.moral_recall;
            j["dag_accuracy"] = m.dag_accuracy;
            j["precision_undefined"] = m.precision_undefined;
            j["recall_undefined"] = m.recall_undefined;
            const std::string text = j.dump(2) + "\n";
            if (eval_out.empty()) {
                std::cout << text;
            } else {
                Json manifest = manifest_base("evaluate", args);
                manifest["inputs"] = digests;
                write_output(eval_out, text, manifest);
                manifest["elapsed_seconds"] = elapsed();
                pdag::write_atomic(eval_out + ".manifest.json", manifest.dump(2) + "\n");
            }
        } else if (benchmark->parsed()) {
            std::vector<pdag::SimConfig> grid;
            for (const auto& setup : bench_setups) {
                for (int dx : bench_dx) {
                    for (int n : bench_n) {
                        pdag::SimConfig c;
                        c.setup = pdag::parse_setup(setup);
                        c.dx = dx;
                        c.n = n;
                        c.trials = bench_flags.trials;
                        c.dz0 = bench_flags.embedding_dim;
                        grid.push_back(c);
                    }
                }
            }
            std::vector<pdag::Method> methods;
            for (const auto& m : bench_methods) methods.push_back(pdag::parse_method(m));
            const pdag::BenchmarkResult res = pdag::run_benchmark(grid, methods, bench_reps, bench_flags.seed,
                                                                  bench_flags.pipeline(), bench_flags.threads);
            Json manifest = manifest_base("benchmark", args);
            manifest["config"] = bench_flags.to_json();
            manifest["grid"] = {{"n", bench_n}, {"dx", bench_dx}, {"setup", bench_setups},
                                {"methods", bench_methods}, {"repetitions", bench_reps}};
            Json failures = Json::array();
            for (const auto& r : res.rows) {
                if (r.failed) failures.push_back({{"method", pdag::to_string(r.method)}, {"n", r.n}, {"seed", r.seed},
                                                  {"error", r.error}});
            }
            manifest["failures"] = failures;
            std::string summary = bench_summary;
            if (summary.empty()) {
                const auto dot = bench_out.rfind('.');
                summary = dot == std::string::npos ? bench_out + "_summary"
                                                   : bench_out.substr(0, dot) + "_summary" + bench_out.substr(dot);
            }
            write_output(bench_out, pdag::rows_csv(res.rows), manifest);
            write_output(summary, pdag::aggregates_csv(res.aggregates), manifest);
            manifest["elapsed_seconds"] = elapsed();
            pdag::write_atomic(bench_out + ".manifest.json", manifest.dump(2) + "\n");
            std::cout << pdag::aggregates_csv(res.aggregates);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
