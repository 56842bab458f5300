#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polytree/error.hpp"
#include "polytree/eval.hpp"
#include "polytree/experiment.hpp"
#include "polytree/format.hpp"
#include "polytree/pipeline.hpp"
#include "polytree/simulate.hpp"

namespace polytree::cli {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

std::string invocation(int argc, const char* const* argv) {
    std::string line;
    for (int a = 0; a < argc; ++a) {
        std::string arg = argv[a];
        if (a) line += ' ';
        if (arg.empty() || arg.find_first_of(" \t\"'") != std::string::npos)
            arg = '\'' + arg + '\'';
        line += arg;
    }
    return line;
}

// "-" writes to the fallback stream.
class Output {
public:
    Output(const std::string& path, std::ostream& fallback) {
        if (path == "-") {
            stream_ = &fallback;
            return;
        }
        file_.open(path);
        if (!file_) throw DataError("cannot open '" + path + "' for writing");
        stream_ = &file_;
    }
    std::ostream& operator*() { return *stream_; }
    void close(const std::string& path) {
        stream_->flush();
        if (!*stream_) throw DataError("write to '" + path + "' failed");
    }

private:
    std::ofstream file_;
    std::ostream* stream_ = nullptr;
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return in;
}

PolytreeModel load_model(const std::string& path) {
    auto in = open_input(path);
    return read_model(in);
}

struct Context {
    std::string command_line;
    std::ostream& out;
    std::ostream& err;

    void header(std::ostream& o) const {
        o << "# polytree " << POLYTREE_VERSION << '\n' << "# command: " << command_line << '\n';
    }
};

// generate ------------------------------------------------------------------

struct GenerateArgs {
    std::size_t p = 0;
    std::size_t n = 0;
    std::string error = "gamma";
    double gauss_fraction = 0.0;
    std::uint64_t seed = 1;
    int max_order = 4;
    bool center_errors = false;
    std::string model_path = "model.txt";
    std::string data_path = "data.csv";
};

void cmd_generate(const GenerateArgs& a, const Context& ctx) {
    if (a.p < 2) throw InvalidArgument("--p must be at least 2");
    if (a.n < 1) throw InvalidArgument("--n must be at least 1");
    if (a.max_order < 2 || a.max_order > 4) throw InvalidArgument("--K must be in [2, 4]");
    ErrorSpec spec;
    spec.family = parse_error_family(a.error);
    spec.gaussian_fraction = a.gauss_fraction;
    spec.validate();

    const auto structure = random_polytree(random_tree(a.p, a.seed), a.seed);
    const auto errors = draw_node_errors(a.p, spec, a.seed);
    const auto model = model_with_errors(structure, errors, a.max_order);

    Output model_out(a.model_path, ctx.out);
    ctx.header(*model_out);
    for (Vertex v = 0; v < a.p; ++v)
        *model_out << "# node " << v << ' ' << to_string(errors[v].family) << ' ' << format_double(errors[v].first)
                   << ' ' << format_double(errors[v].second) << '\n';
    write_model(*model_out, model);
    model_out.close(a.model_path);

    const auto data = sample_dataset(structure, errors, a.n, derive_seed(a.seed, {a.n}), a.center_errors);
    Output data_out(a.data_path, ctx.out);
    ctx.header(*data_out);
    write_csv(*data_out, data);
    data_out.close(a.data_path);
}

// learn ---------------------------------------------------------------------

struct LearnArgs {
    std::string data_path;
    std::string algorithm = "pairwise";
    int max_order = 3;
    std::optional<double> threshold;
    std::string threshold_grid;
    std::string truth_path;
    unsigned workers = 1;
    std::string output = "-";
    bool json = false;
    bool raw_scale = false;
};

void write_graph(std::ostream& o, const LearnedGraph& graph, bool json, const std::vector<std::string>& meta,
                 const Context& ctx) {
    if (!json) {
        ctx.header(o);
        for (const auto& line : meta) o << "# " << line << '\n';
        write_learned_graph(o, graph);
        return;
    }
    std::ostringstream raw;
    write_learned_graph_json(raw, graph);
    auto doc = nlohmann::json::parse(raw.str());
    doc["version"] = POLYTREE_VERSION;
    doc["command"] = ctx.command_line;
    doc["meta"] = meta;
    o << doc.dump(2) << '\n';
}

std::string timing_line(const PhaseTimes& t) {
    return "seconds correlation=" + format_double(t.correlation) + " kruskal=" + format_double(t.kruskal) +
           " orientation=" + format_double(t.orientation);
}

void cmd_learn(const LearnArgs& a, const Context& ctx) {
    LearnOptions options;
    options.algorithm = parse_algorithm(a.algorithm);
    options.max_order = a.max_order;
    options.threshold = a.threshold;
    options.workers = a.workers;
    options.raw_scale = a.raw_scale;
    if (a.max_order < 3 || a.max_order > 4)
        throw InvalidArgument("unsupported cumulant order K = " + std::to_string(a.max_order) + " (supported: 3, 4)");

    std::vector<double> grid;
    if (!a.threshold_grid.empty()) {
        if (a.threshold) throw InvalidArgument("--threshold and --threshold-grid are mutually exclusive");
        if (a.truth_path.empty())
            throw InvalidArgument("--threshold-grid picks the best threshold against --truth, which is missing");
        grid = parse_threshold_grid(a.threshold_grid);
    }
    std::optional<PolytreeModel> truth;
    if (!a.truth_path.empty()) truth = load_model(a.truth_path);

    auto in = open_input(a.data_path);
    const auto data = read_csv(in);
    if (truth && truth->size() != data.variables())
        throw DataError("truth has " + std::to_string(truth->size()) + " variables, data has " +
                        std::to_string(data.variables()));

    std::vector<std::string> meta;
    meta.push_back("algorithm " + std::string(to_string(options.algorithm)) + " K " + std::to_string(a.max_order) +
                   (a.raw_scale ? " raw-scale" : ""));
    if (grid.empty()) {
        const auto result = learn_polytree(data, options);
        meta.push_back("threshold " + format_double(result.threshold) + (result.threshold_auto ? " (auto)" : ""));
        meta.push_back(timing_line(result.seconds));
        if (truth) {
            const auto report = structural_hamming(truth->size(), truth->structure().directed_edges(), result.graph);
            meta.push_back("shd " + format_double(report.normalized));
        }
        ctx.err << timing_line(result.seconds) << '\n';
        Output o(a.output, ctx.out);
        write_graph(*o, result.graph, a.json, meta, ctx);
        o.close(a.output);
        return;
    }

    // Grid: one correlation pass and skeleton, orientation per threshold.
    if (data.samples() < static_cast<std::size_t>(a.max_order) + 1)
        throw InvalidArgument("order-" + std::to_string(a.max_order) + " learning needs at least " +
                              std::to_string(a.max_order + 1) + " samples");
    PhaseTimes times;
    auto start = Clock::now();
    const auto corr = sample_correlation_matrix(data, {.workers = options.workers});
    times.correlation = since(start);
    start = Clock::now();
    const auto skeleton = chow_liu(corr);
    times.kruskal = since(start);
    std::optional<LearnedGraph> best;
    double best_shd = 0.0;
    double best_threshold = 0.0;
    for (const double t : grid) {
        start = Clock::now();
        auto graph = orient_sample(data, corr, skeleton, options.algorithm, options.max_order, t, options.workers,
                                  options.raw_scale);
        times.orientation += since(start);
        const double shd =
            structural_hamming(truth->size(), truth->structure().directed_edges(), graph).normalized;
        meta.push_back("grid threshold " + format_double(t) + " shd " + format_double(shd));
        if (!best || shd < best_shd) {
            best = std::move(graph);
            best_shd = shd;
            best_threshold = t;
        }
    }
    meta.push_back("threshold " + format_double(best_threshold) + " (best of grid)");
    meta.push_back("shd " + format_double(best_shd));
    meta.push_back(timing_line(times));
    ctx.err << timing_line(times) << '\n';
    Output o(a.output, ctx.out);
    write_graph(*o, *best, a.json, meta, ctx);
    o.close(a.output);
}

// eval ----------------------------------------------------------------------

struct EvalArgs {
    std::string truth_path;
    std::string learned_path;
    bool json = false;
};

void cmd_eval(const EvalArgs& a, const Context& ctx) {
    const auto truth = load_model(a.truth_path);
    auto in = open_input(a.learned_path);
    const auto learned = read_learned_graph(in);
    if (learned.p != truth.size())
        throw DataError("learned graph has " + std::to_string(learned.p) + " vertices, truth has " +
                        std::to_string(truth.size()));
    const auto r = structural_hamming(truth.size(), truth.structure().directed_edges(), learned);
    const auto rank = r.errors_by_provenance[static_cast<std::size_t>(Provenance::RankTest)];
    const auto collider = r.errors_by_provenance[static_cast<std::size_t>(Provenance::ColliderTest)];
    const auto propagation = r.errors_by_provenance[static_cast<std::size_t>(Provenance::Propagation)];
    if (a.json) {
        nlohmann::json doc{{"p", r.p},
                           {"included", r.included},
                           {"omitted", r.omitted},
                           {"misoriented", r.misoriented},
                           {"shared", r.shared},
                           {"shd", r.normalized},
                           {"orientation_accuracy", r.orientation_accuracy()},
                           {"errors_by_provenance",
                            {{"rank-test", rank}, {"collider-test", collider}, {"propagation", propagation}}}};
        ctx.out << doc.dump(2) << '\n';
        return;
    }
    ctx.header(ctx.out);
    ctx.out << "p " << r.p << '\n'
            << "included " << r.included << '\n'
            << "omitted " << r.omitted << '\n'
            << "misoriented " << r.misoriented << '\n'
            << "shd " << format_double(r.normalized) << '\n'
            << "orientation_accuracy " << format_double(r.orientation_accuracy()) << '\n'
            << "errors rank-test " << rank << " collider-test " << collider << " propagation " << propagation
            << '\n';
}

// experiment ----------------------------------------------------------------

struct ExperimentArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<std::size_t> replicates;
    std::string threshold_grid;
    std::string output = "-";
};

void cmd_experiment(const ExperimentArgs& a, const Context& ctx) {
    auto in = open_input(a.config_path);
    auto config = read_experiment_config(in);
    if (a.seed) config.seed = *a.seed;
    if (a.workers) config.workers = *a.workers;
    if (a.replicates) config.replicates = *a.replicates;
    if (!a.threshold_grid.empty()) config.threshold_grid = parse_threshold_grid(a.threshold_grid);
    config.validate();

    Output o(a.output, ctx.out);
    ctx.header(*o);
    write_results_header(*o);
    (*o).flush();
    std::size_t failures = 0;
    run_experiment(config, [&](const std::vector<ResultRow>& rows) {
        for (const auto& row : rows) {
            write_result_row(*o, row);
            if (!row.report) {
                ++failures;
                ctx.err << "cell p=" << row.p << " n=" << row.n << " replicate=" << row.replicate << " "
                        << to_string(row.algorithm) << " failed: " << row.failure << '\n';
            }
        }
        (*o).flush();
    });
    o.close(a.output);
    if (failures) ctx.err << failures << " rows failed\n";
}

// oracle --------------------------------------------------------------------

UndirectedTree skeleton_tree(const PolytreeModel& model) {
    UndirectedTree tree{model.size(), {}};
    for (const auto& e : model.structure().skeleton()) tree.edges.push_back({e.u, e.v, 0.0});
    return tree;
}

struct OracleArgs {
    std::string model_path;
    int max_order = 3;
};

void cmd_oracle(const OracleArgs& a, const Context& ctx) {
    const auto model = load_model(a.model_path);
    if (a.max_order < 3 || a.max_order > 4)
        throw InvalidArgument("unsupported cumulant order K = " + std::to_string(a.max_order) + " (supported: 3, 4)");
    if (a.max_order > model.max_order())
        throw DataError("model file only has cumulants up to order " + std::to_string(model.max_order()));
    auto& o = ctx.out;
    ctx.header(o);
    o << "p " << model.size() << " K " << a.max_order << '\n';
    if (model.size() < 2) {
        o << "single vertex: nothing to orient\n";
        return;
    }

    const auto generic = genericity_check(model, a.max_order);
    o << "edge parent child lambda rho generic max_reverse_minor\n";
    std::size_t non_generic = 0;
    for (std::size_t e = 0; e < generic.size(); ++e) {
        const auto& edge = model.structure().edges()[e];
        const auto& g = generic[e];
        non_generic += !g.generic;
        o << "edge " << edge.parent << ' ' << edge.child << ' ' << format_double(edge.lambda) << ' '
          << format_double(model.correlation(edge.parent, edge.child)) << ' ' << (g.generic ? "yes" : "no") << ' '
          << format_double(g.max_reverse_minor) << '\n';
    }

    try {
        const auto interval = valid_threshold_interval(model);
        o << "threshold interval (" << format_double(interval.lo) << ", " << format_double(interval.hi) << ")\n";
    } catch (const DegeneracyError& e) {
        o << "threshold interval: " << e.what() << '\n';
    }

    const PopulationProvider provider(model);
    const OrientOptions options{.max_order = a.max_order, .mode = Mode::Population};
    auto truth = model.structure().directed_edges();
    const auto key = [](const DirectedEdge& e) { return std::pair{e.from, e.to}; };
    std::vector<std::pair<Vertex, Vertex>> expected;
    for (const auto& e : truth) expected.push_back(key(e));
    std::sort(expected.begin(), expected.end());
    std::size_t recovered = 0;
    for (const auto algorithm : {Algorithm::Pairwise, Algorithm::Pto, Algorithm::Tpo}) {
        o << "recovery " << to_string(algorithm) << ' ';
        try {
            const auto graph = orient(algorithm, skeleton_tree(model), provider, options);
            std::vector<std::pair<Vertex, Vertex>> got;
            for (const auto& e : graph.directed_edges()) got.push_back(key(e));
            std::sort(got.begin(), got.end());
            const bool ok = got == expected;
            recovered += ok;
            o << (ok ? "exact" : "wrong") << " rank_tests " << graph.rank_tests << " correlation_tests "
              << graph.correlation_tests << '\n';
        } catch (const DegeneracyError& e) {
            o << "degenerate: " << e.what() << '\n';
        }
    }
    if (non_generic == 0 && recovered == 3)
        o << "all edges generic; all three algorithms recover G\n";
    else
        o << non_generic << " of " << generic.size() << " edges not generic; " << recovered
          << " of 3 algorithms recover G\n";
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Polytree structure learning from higher-order cumulants"};
    app.name("polytree");
    app.set_version_flag("--version", POLYTREE_VERSION);
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Draw a random polytree model and a dataset from it");
    generate->add_option("--p", gen.p, "Number of variables")->required();
    generate->add_option("--n", gen.n, "Number of samples")->required();
    generate->add_option("--error", gen.error, "Error family: gamma, uniform or gaussian")->capture_default_str();
    generate->add_option("--gauss-fraction", gen.gauss_fraction, "Fraction of Gaussian nodes")->capture_default_str();
    generate->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
    generate->add_option("--K", gen.max_order, "Highest cumulant order written to the model")->capture_default_str();
    generate->add_flag("--center-errors", gen.center_errors, "Subtract each error distribution's mean");
    generate->add_option("--model", gen.model_path, "Model output path ('-' for stdout)")->capture_default_str();
    generate->add_option("--data", gen.data_path, "CSV output path ('-' for stdout)")->capture_default_str();

    LearnArgs learn_args;
    auto* learn = app.add_subcommand("learn", "Learn a polytree from a CSV dataset");
    learn->add_option("--data", learn_args.data_path, "Input CSV")->required();
    learn->add_option("--algorithm", learn_args.algorithm, "pairwise, pto or tpo")->capture_default_str();
    learn->add_option("--K", learn_args.max_order, "Highest cumulant order (3 or 4)")->capture_default_str();
    learn->add_option("--threshold", learn_args.threshold, "Independence threshold on |rho| for pto/tpo");
    learn->add_option("--threshold-grid", learn_args.threshold_grid,
                      "lo:hi:step or a comma list; the best value against --truth is kept");
    learn->add_option("--truth", learn_args.truth_path, "True model, for reporting SHD");
    learn->add_option("--workers", learn_args.workers, "Worker threads (0: all cores)")->capture_default_str();
    learn->add_option("--output", learn_args.output, "Learned graph path ('-' for stdout)")->capture_default_str();
    learn->add_flag("--json", learn_args.json, "Write JSON instead of text");
    learn->add_flag("--raw-scale", learn_args.raw_scale, "Compare minors of unstandardized cumulants");

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "Score a learned graph against the true model");
    eval->add_option("--truth", eval_args.truth_path, "True model")->required();
    eval->add_option("--learned", eval_args.learned_path, "Learned graph")->required();
    eval->add_flag("--json", eval_args.json, "Write JSON instead of text");

    ExperimentArgs exp_args;
    auto* experiment = app.add_subcommand("experiment", "Run a simulation sweep from a config file");
    experiment->add_option("--config", exp_args.config_path, "Config file")->required();
    experiment->add_option("--seed", exp_args.seed, "Override the config seed");
    experiment->add_option("--workers", exp_args.workers, "Override the worker count");
    experiment->add_option("--replicates", exp_args.replicates, "Override the replicate count");
    experiment->add_option("--threshold-grid", exp_args.threshold_grid, "Override the threshold grid");
    experiment->add_option("--output", exp_args.output, "Results CSV path ('-' for stdout)")->capture_default_str();

    OracleArgs oracle_args;
    auto* oracle = app.add_subcommand("oracle", "Population diagnostics for a model file");
    oracle->add_option("--model", oracle_args.model_path, "Model file")->required();
    oracle->add_option("--K", oracle_args.max_order, "Highest cumulant order (3 or 4)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    const Context ctx{invocation(argc, argv), out, err};
    try {
        if (*generate) cmd_generate(gen, ctx);
        else if (*learn) cmd_learn(learn_args, ctx);
        else if (*eval) cmd_eval(eval_args, ctx);
        else if (*experiment) cmd_experiment(exp_args, ctx);
        else if (*oracle) cmd_oracle(oracle_args, ctx);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const DegeneracyError& e) {
        err << "error: " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}

} // namespace polytree::cli
