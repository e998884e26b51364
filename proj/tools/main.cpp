// ndp: command-line front end for neighbor-distribution prediction runs.
// Subcommands cover the full pipeline: synth -> ingest -> train -> predict
// -> evaluate, plus the select-k sweep. Every artifact-writing command drops
// a manifest.json echoing the effective options, and all randomness flows
// from the --seed value, so identical invocations reproduce identical bytes.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ndp/distribution.hpp"
#include "ndp/efm.hpp"
#include "ndp/errors.hpp"
#include "ndp/evaluate.hpp"
#include "ndp/graph.hpp"
#include "ndp/metrics.hpp"
#include "ndp/rng.hpp"
#include "ndp/synth.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ndp::TemporalStarGraph load_graph(const std::string& events_path,
                                  const std::string& labels_path,
                                  const std::string& attribute_type) {
    std::ifstream events(events_path);
    if (!events)
        throw ndp::ValidationError("cannot open events file '" + events_path +
                                   "'");
    std::ifstream labels(labels_path);
    if (!labels)
        throw ndp::ValidationError("cannot open labels file '" + labels_path +
                                   "'");
    const ndp::IngestSources sources{&events, &labels, events_path,
                                     labels_path, attribute_type};
    return ndp::ingest(sources);
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ndp::ValidationError("cannot write '" + path.string() + "'");
    out << content;
    if (!out)
        throw ndp::ValidationError("failed writing '" + path.string() + "'");
}

void write_manifest(const fs::path& dir, const std::string& command,
                    std::uint64_t seed, ordered_json options,
                    const std::vector<std::string>& artifacts) {
    ordered_json m;
    m["format"] = "ndp-manifest";
    m["version"] = 1;
    m["command"] = command;
    m["seed"] = seed;
    m["options"] = std::move(options);
    m["artifacts"] = artifacts;
    m["formats"] =
        ordered_json{{"model", 1}, {"report", 1}, {"truth", 1},
                     {"predictions", 1}};
    write_text(dir / "manifest.json", m.dump(2) + "\n");
}

fs::path prepare_out_dir(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

struct WindowArgs {
    std::int64_t t_h_start = 0;
    std::int64_t t_h_end = 0;
    std::int64_t t_c_end = 0;
    std::int64_t t_f_end = 0;

    ndp::TimeWindow history() const { return {t_h_start, t_h_end}; }
    ndp::TimeWindow current() const { return {t_h_end, t_c_end}; }
    ndp::TimeWindow future() const { return {t_c_end, t_f_end}; }
    ndp::WindowTriple triple() const { return {history(), current(), future()}; }
};

void add_window_options(CLI::App* cmd, WindowArgs& w, bool with_future,
                        bool required) {
    auto* a = cmd->add_option("--t_h_start", w.t_h_start,
                              "History window start (inclusive)");
    auto* b = cmd->add_option(
        "--t_h_end", w.t_h_end,
        "History window end = current window start");
    auto* c = cmd->add_option("--t_c_end", w.t_c_end,
                              "Current window end (exclusive)");
    CLI::Option* d = nullptr;
    if (with_future)
        d = cmd->add_option("--t_f_end", w.t_f_end,
                            "Future window end (exclusive)");
    if (required) {
        a->required();
        b->required();
        c->required();
        if (d)
            d->required();
    }
}

struct GraphArgs {
    std::string events;
    std::string labels;
    std::string attribute_type = "attribute";
};

void add_graph_options(CLI::App* cmd, GraphArgs& g) {
    cmd->add_option("--events", g.events,
                    "Events file (target_id,attribute_id,timestamp)")
        ->required();
    cmd->add_option("--labels", g.labels,
                    "Labels file (attribute_id,label;label;...)")
        ->required();
    cmd->add_option("--attribute_type", g.attribute_type,
                    "Name of the attribute node type");
}

void enable_config(CLI::App* cmd, std::string& storage) {
    cmd->add_option("--config", storage,
                    "Read options from a key=value config file; explicit "
                    "flags win, keys the subcommand does not know are "
                    "ignored");
}

/// Applies `--config <file>` by hand: reads key=value lines and appends
/// `--key=value` tokens for every key the chosen subcommand accepts that the
/// command line has not already set. (Injecting tokens keeps one generated
/// config usable by every subcommand: each picks the keys it understands.)
std::vector<std::string> inject_config(const CLI::App& app,
                                       const std::vector<std::string>& args) {
    const CLI::App* sub = nullptr;
    for (const auto& token : args)
        if ((sub = app.get_subcommand_no_throw(token)) != nullptr)
            break;
    if (sub == nullptr)
        return args;

    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            config_path = args[i].substr(9);
    }
    if (config_path.empty())
        return args;

    std::ifstream in(config_path);
    if (!in)
        throw ndp::ValidationError("cannot open config file '" +
                                   config_path + "'");

    auto trim = [](std::string s) {
        const auto first = s.find_first_not_of(" \t\r");
        const auto last = s.find_last_not_of(" \t\r");
        return first == std::string::npos
                   ? std::string()
                   : s.substr(first, last - first + 1);
    };

    std::vector<std::string> out = args;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ndp::ValidationError(config_path + ":" +
                                       std::to_string(line_no) +
                                       ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ndp::ValidationError(config_path + ":" +
                                       std::to_string(line_no) +
                                       ": empty key");
        const std::string flag = "--" + key;
        if (sub->get_option_no_throw(flag) == nullptr)
            continue; // not this subcommand's concern
        bool given = false;
        for (const auto& token : args)
            if (token == flag || token.rfind(flag + "=", 0) == 0)
                given = true;
        if (!given)
            out.push_back(flag + "=" + value);
    }
    return out;
}

std::vector<std::string> read_target_list(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ndp::ValidationError("cannot open targets file '" + path + "'");
    std::vector<std::string> targets;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!line.empty())
            targets.push_back(line);
    }
    if (targets.empty())
        throw ndp::ValidationError("targets file '" + path +
                                   "' lists no targets");
    return targets;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neighbor-distribution prediction over temporal star-schema "
                 "networks"};
    app.require_subcommand(1);
    std::string config_file; // one --config option per subcommand

    // ---- ingest ---------------------------------------------------------
    auto* cmd_ingest = app.add_subcommand(
        "ingest", "Parse and validate a dataset, printing summary counts");
    GraphArgs ingest_graph;
    add_graph_options(cmd_ingest, ingest_graph);
    enable_config(cmd_ingest, config_file);

    // ---- synth ----------------------------------------------------------
    auto* cmd_synth = app.add_subcommand(
        "synth", "Generate a synthetic dataset with planted dynamics");
    int sy_n = 6, sy_targets = 100, sy_clusters = 1, sy_events = 100;
    double sy_noise = 0.0, sy_conc = 1.0, sy_sep = 0.0, sy_gamma = 0.6;
    bool sy_identity = false, sy_multi = false;
    std::uint64_t sy_seed = 0;
    std::string sy_out = "synth-out";
    WindowArgs sy_w{0, 40, 50, 60};
    cmd_synth->add_option("--n", sy_n, "Label count (>= 2)");
    cmd_synth->add_option("--targets", sy_targets, "Number of target nodes");
    cmd_synth->add_option("--clusters", sy_clusters,
                          "Number of planted clusters");
    cmd_synth->add_option("--events_per_window", sy_events,
                          "Events per target per window");
    cmd_synth->add_option("--noise", sy_noise,
                          "Per-window Dirichlet jitter (0 = none)");
    cmd_synth->add_option("--base_concentration", sy_conc,
                          "Concentration of per-target base draws");
    cmd_synth->add_option("--separation", sy_sep,
                          "Extra weight on each cluster's signature label");
    cmd_synth->add_option(
        "--gamma", sy_gamma,
        "Identity weight of the planted mixing matrices (0..1)");
    cmd_synth->add_flag("--identity", sy_identity,
                        "Plant identity dynamics in every cluster");
    cmd_synth->add_flag("--multi_label", sy_multi,
                        "Also emit two-label attribute nodes");
    cmd_synth->add_option("--seed", sy_seed, "Master random seed");
    cmd_synth->add_option("--out", sy_out, "Output directory");
    add_window_options(cmd_synth, sy_w, true, false);
    enable_config(cmd_synth, config_file);

    // ---- train ----------------------------------------------------------
    auto* cmd_train = app.add_subcommand(
        "train", "Fit the evolution model on the history/current windows");
    GraphArgs train_graph;
    WindowArgs train_w;
    int tr_k = 1;
    std::uint64_t tr_seed = 0;
    double tr_ridge = 1e-8;
    bool tr_set_semantics = false;
    std::string tr_out = "train-out";
    add_graph_options(cmd_train, train_graph);
    add_window_options(cmd_train, train_w, false, true);
    cmd_train->add_option("--k", tr_k, "Number of clusters");
    cmd_train->add_option("--seed", tr_seed, "Master random seed");
    cmd_train->add_option("--ridge_fallback", tr_ridge,
                          "Ridge used when the normal equations are singular");
    cmd_train->add_flag("--set_semantics", tr_set_semantics,
                        "Count repeated neighbors once per window");
    cmd_train->add_option("--out", tr_out, "Output directory");
    enable_config(cmd_train, config_file);

    // ---- predict --------------------------------------------------------
    auto* cmd_predict = app.add_subcommand(
        "predict", "Predict future NDVs with a trained model");
    GraphArgs predict_graph;
    std::string pr_model, pr_targets_file;
    std::string pr_out = "predict-out";
    add_graph_options(cmd_predict, predict_graph);
    cmd_predict->add_option("--model", pr_model, "Trained model JSON file")
        ->required();
    cmd_predict->add_option("--targets_file", pr_targets_file,
                            "Predict only the targets listed in this file "
                            "(one id per line)");
    cmd_predict->add_option("--out", pr_out, "Output directory");
    enable_config(cmd_predict, config_file);

    // ---- evaluate -------------------------------------------------------
    auto* cmd_evaluate = app.add_subcommand(
        "evaluate",
        "Train, predict, and score every requested method on one dataset");
    GraphArgs eval_graph;
    WindowArgs eval_w;
    int ev_k = 1, ev_epochs = 100, ev_factors = 0, ev_pd_groups = 5;
    std::uint64_t ev_seed = 0;
    std::size_t ev_sample = 0;
    double ev_ridge = 1e-8, ev_lr = 0.001, ev_lambda = 0.02;
    bool ev_loo = false, ev_set_semantics = false;
    std::string ev_methods = "efm,mvm,mf,biasedmf";
    std::string ev_run_label = "run";
    std::string ev_out = "eval-out";
    add_graph_options(cmd_evaluate, eval_graph);
    add_window_options(cmd_evaluate, eval_w, true, true);
    cmd_evaluate->add_option("--k", ev_k, "Number of clusters");
    cmd_evaluate->add_option("--seed", ev_seed, "Master random seed");
    cmd_evaluate->add_option("--ridge_fallback", ev_ridge,
                             "Ridge used on singular normal equations");
    cmd_evaluate->add_option("--methods", ev_methods,
                             "Comma-separated subset of efm,mvm,mf,biasedmf");
    cmd_evaluate->add_option("--lr", ev_lr,
                             "Factor-baseline SGD learning rate");
    cmd_evaluate->add_option("--lambda", ev_lambda,
                             "Factor-baseline punishing parameter");
    cmd_evaluate->add_option("--epochs", ev_epochs,
                             "Factor-baseline SGD epochs");
    cmd_evaluate->add_option("--factors", ev_factors,
                             "Latent dimension D (0 = label count)");
    cmd_evaluate->add_flag("--leave_one_out", ev_loo,
                           "Refit each target's matrix without its own row");
    cmd_evaluate->add_option("--pd_groups", ev_pd_groups,
                             "Number of prediction-difficulty groups");
    cmd_evaluate->add_option("--sample", ev_sample,
                             "Evaluate a seeded sample of this many targets "
                             "(0 = all)");
    cmd_evaluate->add_option("--run_label", ev_run_label,
                             "Label recorded in the report");
    cmd_evaluate->add_flag("--set_semantics", ev_set_semantics,
                           "Count repeated neighbors once per window");
    cmd_evaluate->add_option("--out", ev_out, "Output directory");
    enable_config(cmd_evaluate, config_file);

    // ---- select-k -------------------------------------------------------
    auto* cmd_select = app.add_subcommand(
        "select-k", "Sweep cluster counts on backshifted windows");
    GraphArgs select_graph;
    WindowArgs select_w;
    std::vector<int> sk_candidates;
    std::size_t sk_sample = 500;
    std::uint64_t sk_seed = 0;
    double sk_ridge = 1e-8;
    bool sk_set_semantics = false;
    std::string sk_out = "selectk-out";
    add_graph_options(cmd_select, select_graph);
    add_window_options(cmd_select, select_w, false, true);
    cmd_select
        ->add_option("--k_candidates", sk_candidates,
                     "Cluster counts to sweep, e.g. 1,5,10")
        ->required()
        ->delimiter(',');
    cmd_select->add_option("--sample_size", sk_sample,
                           "Targets sampled for scoring");
    cmd_select->add_option("--seed", sk_seed, "Master random seed");
    cmd_select->add_option("--ridge_fallback", sk_ridge,
                           "Ridge used on singular normal equations");
    cmd_select->add_flag("--set_semantics", sk_set_semantics,
                         "Count repeated neighbors once per window");
    cmd_select->add_option("--out", sk_out, "Output directory");
    enable_config(cmd_select, config_file);

    std::vector<std::string> raw_args(argv + 1, argv + argc);
    std::vector<std::string> final_args;
    try {
        final_args = inject_config(app, raw_args);
    } catch (const ndp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::vector<char*> parse_argv;
    parse_argv.push_back(argv[0]);
    for (auto& token : final_args)
        parse_argv.push_back(token.data());
    try {
        app.parse(static_cast<int>(parse_argv.size()), parse_argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*cmd_ingest) {
            const auto g =
                load_graph(ingest_graph.events, ingest_graph.labels,
                           ingest_graph.attribute_type);
            std::cout << "attribute type: " << g.catalog().attribute_type
                      << "\nlabel types (n): " << g.catalog().size()
                      << "\nattributes: " << g.num_attributes()
                      << "\ntargets: " << g.num_targets()
                      << "\nevents: " << g.num_events() << "\n";
        } else if (*cmd_synth) {
            ndp::SynthSpec spec;
            spec.n = sy_n;
            spec.num_targets = sy_targets;
            spec.num_clusters = sy_clusters;
            spec.events_per_target_per_window = sy_events;
            spec.noise = sy_noise;
            spec.base_concentration = sy_conc;
            spec.cluster_separation = sy_sep;
            spec.seed = sy_seed;
            spec.multi_label = sy_multi;
            spec.windows = sy_w.triple();
            if (!sy_identity) {
                const int shifts = std::max(1, sy_n - 1);
                for (int j = 0; j < sy_clusters; ++j)
                    spec.planted.push_back(
                        ndp::mixing_matrix(sy_n, sy_gamma, j % shifts + 1));
            }
            const auto result = ndp::generate(spec);

            const auto dir = prepare_out_dir(sy_out);
            std::ostringstream events, labels;
            result.graph.write_events_file(events);
            result.graph.write_labels_file(labels);
            write_text(dir / "events.csv", events.str());
            write_text(dir / "labels.csv", labels.str());
            write_text(dir / "truth.json", ndp::truth_to_json(result.truth));

            const auto events_path = (dir / "events.csv").string();
            const auto labels_path = (dir / "labels.csv").string();
            std::ostringstream config;
            config << "# generated dataset configuration\n"
                   << "events=" << events_path << "\n"
                   << "labels=" << labels_path << "\n"
                   << "t_h_start=" << sy_w.t_h_start << "\n"
                   << "t_h_end=" << sy_w.t_h_end << "\n"
                   << "t_c_end=" << sy_w.t_c_end << "\n"
                   << "t_f_end=" << sy_w.t_f_end << "\n"
                   << "seed=" << sy_seed << "\n";
            write_text(dir / "dataset.config", config.str());

            ordered_json options{
                {"n", sy_n},
                {"targets", sy_targets},
                {"clusters", sy_clusters},
                {"events_per_window", sy_events},
                {"noise", sy_noise},
                {"base_concentration", sy_conc},
                {"separation", sy_sep},
                {"gamma", sy_gamma},
                {"identity", sy_identity},
                {"multi_label", sy_multi},
                {"t_h_start", sy_w.t_h_start},
                {"t_h_end", sy_w.t_h_end},
                {"t_c_end", sy_w.t_c_end},
                {"t_f_end", sy_w.t_f_end}};
            write_manifest(dir, "synth", sy_seed, std::move(options),
                           {"events.csv", "labels.csv", "truth.json",
                            "dataset.config"});
            std::cout << "wrote " << result.graph.num_events() << " events for "
                      << sy_targets << " targets to " << dir.string() << "\n";
        } else if (*cmd_train) {
            const auto g = load_graph(train_graph.events, train_graph.labels,
                                      train_graph.attribute_type);
            const auto semantics =
                tr_set_semantics ? ndp::NeighborSemantics::kUniqueAttributes
                                 : ndp::NeighborSemantics::kMultiset;
            // Same sub-seed the evaluation pipeline uses, so a standalone
            // train reproduces the model evaluate builds internally.
            const auto model = ndp::train(
                g, train_w.history(), train_w.current(), tr_k,
                ndp::derive_seed(tr_seed, "clustering"), tr_ridge, semantics);

            const auto dir = prepare_out_dir(tr_out);
            std::ostringstream body;
            ndp::save_model(model, body);
            write_text(dir / "model.json", body.str());

            ordered_json options{{"events", train_graph.events},
                                 {"labels", train_graph.labels},
                                 {"attribute_type", train_graph.attribute_type},
                                 {"t_h_start", train_w.t_h_start},
                                 {"t_h_end", train_w.t_h_end},
                                 {"t_c_end", train_w.t_c_end},
                                 {"k", tr_k},
                                 {"ridge_fallback", tr_ridge},
                                 {"set_semantics", tr_set_semantics}};
            write_manifest(dir, "train", tr_seed, std::move(options),
                           {"model.json"});
            std::cout << "trained k=" << model.k << " on "
                      << model.clusters.assignments.size()
                      << " targets; model written to "
                      << (dir / "model.json").string() << "\n";
        } else if (*cmd_predict) {
            const auto g =
                load_graph(predict_graph.events, predict_graph.labels,
                           predict_graph.attribute_type);
            std::ifstream model_in(pr_model);
            if (!model_in)
                throw ndp::ValidationError("cannot open model file '" +
                                           pr_model + "'");
            const auto model = ndp::load_model(model_in);

            const auto targets = pr_targets_file.empty()
                                     ? g.target_ids()
                                     : read_target_list(pr_targets_file);
            std::ostringstream rows;
            for (const auto& id : targets) {
                const auto p = ndp::predict(model, g, id);
                rows << id;
                for (std::size_t i = 0; i < p.size(); ++i)
                    rows << ',' << g17(p[i]);
                rows << '\n';
            }

            const auto dir = prepare_out_dir(pr_out);
            write_text(dir / "predictions.csv", rows.str());
            ordered_json options{
                {"events", predict_graph.events},
                {"labels", predict_graph.labels},
                {"attribute_type", predict_graph.attribute_type},
                {"model", pr_model},
                {"targets_file", pr_targets_file}};
            write_manifest(dir, "predict", model.seed, std::move(options),
                           {"predictions.csv"});
            std::cout << "predicted " << targets.size() << " targets to "
                      << (dir / "predictions.csv").string() << "\n";
        } else if (*cmd_evaluate) {
            const auto g = load_graph(eval_graph.events, eval_graph.labels,
                                      eval_graph.attribute_type);
            ndp::EvaluationOptions opt;
            opt.methods = ndp::parse_methods(ev_methods);
            opt.k = ev_k;
            opt.seed = ev_seed;
            opt.ridge_fallback = ev_ridge;
            opt.learning_rate = ev_lr;
            opt.lambda = ev_lambda;
            opt.epochs = ev_epochs;
            opt.factors = ev_factors;
            opt.leave_one_out = ev_loo;
            opt.pd_groups = ev_pd_groups;
            opt.sample_size = ev_sample;
            opt.semantics = ev_set_semantics
                                ? ndp::NeighborSemantics::kUniqueAttributes
                                : ndp::NeighborSemantics::kMultiset;

            const auto outcome = run_evaluation(g, eval_w.triple(), opt);
            const auto dir = prepare_out_dir(ev_out);
            write_text(dir / "report.json",
                       ndp::report_to_json(outcome.report, ev_run_label));
            const auto table =
                ndp::report_to_table(outcome.report, ev_run_label);
            write_text(dir / "report.txt", table);

            ordered_json options{{"events", eval_graph.events},
                                 {"labels", eval_graph.labels},
                                 {"attribute_type", eval_graph.attribute_type},
                                 {"t_h_start", eval_w.t_h_start},
                                 {"t_h_end", eval_w.t_h_end},
                                 {"t_c_end", eval_w.t_c_end},
                                 {"t_f_end", eval_w.t_f_end},
                                 {"k", ev_k},
                                 {"methods", ev_methods},
                                 {"lr", ev_lr},
                                 {"lambda", ev_lambda},
                                 {"epochs", ev_epochs},
                                 {"factors", ev_factors},
                                 {"leave_one_out", ev_loo},
                                 {"pd_groups", ev_pd_groups},
                                 {"sample", ev_sample},
                                 {"ridge_fallback", ev_ridge},
                                 {"set_semantics", ev_set_semantics},
                                 {"run_label", ev_run_label}};
            write_manifest(dir, "evaluate", ev_seed, std::move(options),
                           {"report.json", "report.txt"});
            std::cout << table;
        } else if (*cmd_select) {
            const auto g =
                load_graph(select_graph.events, select_graph.labels,
                           select_graph.attribute_type);
            const auto semantics =
                sk_set_semantics ? ndp::NeighborSemantics::kUniqueAttributes
                                 : ndp::NeighborSemantics::kMultiset;
            const auto sel =
                ndp::select_k(g, select_w.history(), select_w.current(),
                              sk_candidates, sk_sample, sk_seed, sk_ridge,
                              semantics);

            ordered_json doc;
            doc["format"] = "ndp-select-k";
            doc["version"] = 1;
            doc["chosen_k"] = sel.chosen_k;
            doc["rows"] = ordered_json::array();
            for (const auto& row : sel.rows) {
                ordered_json r;
                r["k"] = row.k;
                r["feasible"] = row.feasible;
                r["mean_eta"] = row.mean_eta; // NaN serializes as null
                doc["rows"].push_back(std::move(r));
            }
            doc["sampled_targets"] = sel.sampled_targets;

            const auto dir = prepare_out_dir(sk_out);
            write_text(dir / "selectk.json", doc.dump(2) + "\n");

            ordered_json options{{"events", select_graph.events},
                                 {"labels", select_graph.labels},
                                 {"attribute_type",
                                  select_graph.attribute_type},
                                 {"t_h_start", select_w.t_h_start},
                                 {"t_h_end", select_w.t_h_end},
                                 {"t_c_end", select_w.t_c_end},
                                 {"k_candidates", sk_candidates},
                                 {"sample_size", sk_sample},
                                 {"ridge_fallback", sk_ridge},
                                 {"set_semantics", sk_set_semantics}};
            write_manifest(dir, "select-k", sk_seed, std::move(options),
                           {"selectk.json"});

            std::cout << "k sweep (" << sel.sampled_targets.size()
                      << " sampled targets):\n";
            for (const auto& row : sel.rows) {
                std::cout << "  k=" << row.k << "  mean eta=";
                if (row.feasible)
                    std::cout << g17(row.mean_eta);
                else
                    std::cout << "- (infeasible)";
                std::cout << (row.k == sel.chosen_k && row.feasible
                                  ? "  <- chosen"
                                  : "")
                          << "\n";
            }
            std::cout << "chosen k: " << sel.chosen_k << "\n";
        }
    } catch (const ndp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
