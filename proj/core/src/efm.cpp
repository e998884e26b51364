#include "ndp/efm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "json.hpp"

#include "ndp/errors.hpp"
#include "ndp/metrics.hpp"
#include "ndp/rng.hpp"

namespace ndp {

namespace {

void require_adjacent(const TimeWindow& history, const TimeWindow& current) {
    validate_window(history, "history window");
    validate_window(current, "current window");
    if (history.end != current.start)
        throw ValidationError(
            "history and current windows must be adjacent (history.end == "
            "current.start); predictions read them as one combined window");
}

Matrix stack_rows(const std::vector<const RegressionSample*>& members,
                  bool take_x) {
    const std::size_t n = members.front()->x_row.size();
    Matrix m(members.size(), n);
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto& row =
            take_x ? members[i]->x_row.components() : members[i]->y_row.components();
        std::copy(row.begin(), row.end(), m.row(i).begin());
    }
    return m;
}

// The singularity policy shared by training and leave-one-out refits: exact
// normal equations first, one ridge retry, and a finite-entries check (a
// solve that sneaks non-finite values through counts as failed).
bool try_solve(const std::vector<const RegressionSample*>& members,
               double ridge_fallback, Matrix& out, double& ridge_used) {
    if (members.empty())
        return false;
    const Matrix x = stack_rows(members, true);
    const Matrix y = stack_rows(members, false);
    try {
        out = normal_equations_solve(x, y, 0.0);
        ridge_used = 0.0;
        if (out.all_finite())
            return true;
    } catch (const SingularMatrix&) {
        if (ridge_fallback <= 0.0)
            throw;
    }
    if (ridge_fallback <= 0.0)
        return false;
    try {
        out = normal_equations_solve(x, y, ridge_fallback);
    } catch (const SingularMatrix&) {
        return false;
    }
    ridge_used = ridge_fallback;
    return out.all_finite();
}

int nearest_centroid(const std::vector<std::vector<double>>& centroids,
                     std::span<const double> point) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        double d = 0.0;
        for (std::size_t i = 0; i < point.size(); ++i) {
            const double diff = centroids[c][i] - point[i];
            d += diff * diff;
        }
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

void require_compatible(const EfmModel& model, const TemporalStarGraph& g) {
    if (model.matrices.empty())
        throw ValidationError("predict: model has no evolution matrices");
    if (g.catalog().labels != model.catalog.labels ||
        g.catalog().attribute_type != model.catalog.attribute_type)
        throw ValidationError(
            "predict: graph label catalog differs from the model's; NDV "
            "components would not line up");
}

} // namespace

std::vector<RegressionSample> make_training_samples(
    const TemporalStarGraph& g, const TimeWindow& history,
    const TimeWindow& current, NeighborSemantics semantics) {
    require_adjacent(history, current);
    const std::array<TimeWindow, 2> windows{history, current};
    std::vector<RegressionSample> samples;
    for (const auto& target : g.targets_active_in_all(windows)) {
        samples.push_back({target, ndv_for(g, target, history, semantics),
                           ndv_for(g, target, current, semantics)});
    }
    return samples;
}

EfmModel train(const TemporalStarGraph& g, const TimeWindow& history,
               const TimeWindow& current, int k, std::uint64_t seed,
               double ridge_fallback, NeighborSemantics semantics) {
    auto samples = make_training_samples(g, history, current, semantics);
    if (samples.empty())
        throw ValidationError(
            "train: no targets active in both the history and current "
            "windows");

    std::map<std::string, std::vector<double>> points;
    for (const auto& s : samples)
        points.emplace(s.target_id, s.x_row.components());

    EfmModel model;
    model.catalog = g.catalog();
    model.history = history;
    model.current = current;
    model.k = k;
    model.seed = seed;
    model.ridge_fallback = ridge_fallback;
    model.semantics = semantics;
    model.clusters = kmeans(points, k, seed);

    std::map<int, std::vector<const RegressionSample*>> members;
    for (const auto& s : samples)
        members[model.clusters.cluster_for(s.target_id)].push_back(&s);

    std::vector<const RegressionSample*> all;
    all.reserve(samples.size());
    for (const auto& s : samples)
        all.push_back(&s);

    // The all-samples fit, shared by clusters whose own normal equations
    // stay singular even with the ridge retry. Computed on first need.
    bool have_global = false;
    Matrix global_b;
    double global_ridge = 0.0;
    auto global_fit = [&]() {
        if (!have_global) {
            if (!try_solve(all, ridge_fallback, global_b, global_ridge))
                throw SingularMatrix(
                    "train: normal equations singular on the full sample set",
                    0);
            have_global = true;
        }
    };

    for (const auto& [cluster, rows] : members) {
        EvolutionMatrix em;
        double ridge_used = 0.0;
        Matrix b;
        if (try_solve(rows, ridge_fallback, b, ridge_used)) {
            em.entries = transpose(b);
            em.ridge_used = ridge_used;
            for (const auto* s : rows)
                em.source_cluster.push_back(s->target_id);
        } else {
            global_fit();
            em.entries = transpose(global_b);
            em.ridge_used = global_ridge;
            for (const auto* s : all)
                em.source_cluster.push_back(s->target_id);
        }
        model.matrices.emplace(cluster, std::move(em));
    }
    return model;
}

int assigned_cluster(const EfmModel& model, const TemporalStarGraph& g,
                     const std::string& target) {
    const auto it = model.clusters.assignments.find(target);
    if (it != model.clusters.assignments.end())
        return it->second;
    const auto w =
        ndv_for(g, target, model.combined_history(), model.semantics);
    return nearest_centroid(model.clusters.centroids, w.components());
}

std::vector<double> predict_raw(const EfmModel& model,
                                const TemporalStarGraph& g,
                                const std::string& target) {
    require_compatible(model, g);
    const int cluster = assigned_cluster(model, g, target);
    const auto w =
        ndv_for(g, target, model.combined_history(), model.semantics);
    return matvec(model.matrices.at(cluster).entries, w.components());
}

DistributionVector predict(const EfmModel& model, const TemporalStarGraph& g,
                           const std::string& target) {
    return project_to_simplex(predict_raw(model, g, target));
}

Matrix leave_one_out_matrix(const EfmModel& model,
                            std::span<const RegressionSample> samples,
                            const std::string& target) {
    const int cluster = model.clusters.cluster_for(target);
    std::vector<const RegressionSample*> rows;
    std::vector<const RegressionSample*> all;
    for (const auto& s : samples) {
        if (s.target_id == target)
            continue;
        all.push_back(&s);
        if (model.clusters.cluster_for(s.target_id) == cluster)
            rows.push_back(&s);
    }
    Matrix b;
    double ridge_used = 0.0;
    if (!rows.empty() && try_solve(rows, model.ridge_fallback, b, ridge_used))
        return transpose(b);
    if (!try_solve(all, model.ridge_fallback, b, ridge_used))
        throw SingularMatrix(
            "leave-one-out: normal equations singular on all remaining "
            "samples",
            0);
    return transpose(b);
}

KSelection select_k(const TemporalStarGraph& g, const TimeWindow& history,
                    const TimeWindow& current,
                    std::span<const int> k_candidates, std::size_t sample_size,
                    std::uint64_t seed, double ridge_fallback,
                    NeighborSemantics semantics) {
    require_adjacent(history, current);
    if (k_candidates.empty())
        throw ValidationError("select_k: no candidate cluster counts");
    for (int k : k_candidates)
        if (k < 1)
            throw ValidationError("select_k: candidates must be >= 1");

    // The future window holds held-out truth, so the sweep scores against
    // the current window instead, training on windows shifted back by one
    // current-window length.
    const std::int64_t shift = current.length();
    const TimeWindow shifted_history{history.start - shift,
                                     history.end - shift};
    const TimeWindow shifted_current{history.end - shift, history.end};

    const std::array<TimeWindow, 3> needed{shifted_history, shifted_current,
                                           current};
    const auto eligible = g.targets_active_in_all(needed);
    if (eligible.empty())
        throw ValidationError(
            "select_k: no targets active across the shifted training "
            "windows and the scoring window");
    if (sample_size == 0 || sample_size > eligible.size())
        throw ValidationError(
            "select_k: sample_size must be between 1 and the number of "
            "eligible targets (" +
            std::to_string(eligible.size()) + ")");

    Rng rng(derive_seed(seed, "select-k sample"));
    KSelection result;
    for (std::size_t idx : rng.sample_indices(eligible.size(), sample_size))
        result.sampled_targets.push_back(eligible[idx]);
    std::sort(result.sampled_targets.begin(), result.sampled_targets.end());

    const std::array<TimeWindow, 2> train_windows{shifted_history,
                                                  shifted_current};
    const std::size_t trainable =
        g.targets_active_in_all(train_windows).size();
    const std::uint64_t train_seed = derive_seed(seed, "select-k train");

    for (int k : k_candidates) {
        KSelectionRow row;
        row.k = k;
        if (static_cast<std::size_t>(k) > trainable) {
            row.mean_eta = std::numeric_limits<double>::quiet_NaN();
            result.rows.push_back(row);
            continue;
        }
        const EfmModel model = train(g, shifted_history, shifted_current, k,
                                     train_seed, ridge_fallback, semantics);
        double total = 0.0;
        for (const auto& target : result.sampled_targets) {
            const auto predicted = predict(model, g, target);
            const auto truth = ndv_for(g, target, current, semantics);
            total += absolute_accuracy(predicted, truth);
        }
        row.mean_eta = total / static_cast<double>(sample_size);
        row.feasible = true;
        result.rows.push_back(row);
    }

    const KSelectionRow* best = nullptr;
    for (const auto& row : result.rows) {
        if (!row.feasible)
            continue;
        if (!best || row.mean_eta > best->mean_eta ||
            (row.mean_eta == best->mean_eta && row.k < best->k))
            best = &row;
    }
    if (!best)
        throw ValidationError(
            "select_k: every candidate exceeds the trainable target count");
    result.chosen_k = best->k;
    return result;
}

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kModelFormat = "ndp-efm-model";
constexpr int kModelVersion = 1;

std::string semantics_name(NeighborSemantics s) {
    return s == NeighborSemantics::kMultiset ? "multiset" : "unique";
}

NeighborSemantics semantics_from_name(const std::string& name) {
    if (name == "multiset")
        return NeighborSemantics::kMultiset;
    if (name == "unique")
        return NeighborSemantics::kUniqueAttributes;
    throw ValidationError("model: unknown neighbor semantics '" + name + "'");
}

} // namespace

void save_model(const EfmModel& model, std::ostream& out) {
    ordered_json doc;
    doc["format"] = kModelFormat;
    doc["version"] = kModelVersion;
    doc["attribute_type"] = model.catalog.attribute_type;
    doc["labels"] = model.catalog.labels;
    doc["windows"] = {
        {"history", {model.history.start, model.history.end}},
        {"current", {model.current.start, model.current.end}},
    };
    doc["k"] = model.k;
    doc["seed"] = model.seed;
    doc["ridge_fallback"] = model.ridge_fallback;
    doc["semantics"] = semantics_name(model.semantics);

    ordered_json clusters;
    clusters["centroids"] = model.clusters.centroids;
    ordered_json assignments = ordered_json::object();
    for (const auto& [target, cluster] : model.clusters.assignments)
        assignments[target] = cluster;
    clusters["assignments"] = std::move(assignments);
    clusters["objective_trace"] = model.clusters.objective_trace;
    doc["clusters"] = std::move(clusters);

    ordered_json matrices = ordered_json::array();
    for (const auto& [cluster, em] : model.matrices) {
        ordered_json m;
        m["cluster"] = cluster;
        m["ridge_used"] = em.ridge_used;
        m["source_cluster"] = em.source_cluster;
        m["rows"] = em.entries.rows();
        m["entries"] = em.entries.entries();
        matrices.push_back(std::move(m));
    }
    doc["matrices"] = std::move(matrices);

    out << doc.dump(2) << '\n';
}

EfmModel load_model(std::istream& in) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("model: malformed JSON: ") +
                              e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != kModelFormat)
            throw ValidationError("model: unexpected format tag");
        if (doc.at("version").get<int>() != kModelVersion)
            throw ValidationError("model: unsupported version");

        EfmModel model;
        model.catalog.attribute_type =
            doc.at("attribute_type").get<std::string>();
        model.catalog.labels =
            doc.at("labels").get<std::vector<std::string>>();
        const auto& windows = doc.at("windows");
        model.history = {windows.at("history").at(0).get<std::int64_t>(),
                         windows.at("history").at(1).get<std::int64_t>()};
        model.current = {windows.at("current").at(0).get<std::int64_t>(),
                         windows.at("current").at(1).get<std::int64_t>()};
        model.k = doc.at("k").get<int>();
        model.seed = doc.at("seed").get<std::uint64_t>();
        model.ridge_fallback = doc.at("ridge_fallback").get<double>();
        model.semantics =
            semantics_from_name(doc.at("semantics").get<std::string>());

        const auto& clusters = doc.at("clusters");
        model.clusters.k = model.k;
        model.clusters.seed = model.seed;
        model.clusters.centroids =
            clusters.at("centroids").get<std::vector<std::vector<double>>>();
        for (const auto& [target, cluster] :
             clusters.at("assignments").items())
            model.clusters.assignments.emplace(target, cluster.get<int>());
        model.clusters.objective_trace =
            clusters.at("objective_trace").get<std::vector<double>>();

        for (const auto& m : doc.at("matrices")) {
            EvolutionMatrix em;
            const auto rows = m.at("rows").get<std::size_t>();
            auto entries = m.at("entries").get<std::vector<double>>();
            if (rows == 0 || entries.size() % rows != 0)
                throw ValidationError("model: matrix entry count does not "
                                      "match its dimensions");
            // cols must be fixed before the move below empties `entries`
            // (argument evaluation order is unspecified).
            const std::size_t cols = entries.size() / rows;
            em.entries = Matrix(rows, cols, std::move(entries));
            em.ridge_used = m.at("ridge_used").get<double>();
            em.source_cluster =
                m.at("source_cluster").get<std::vector<std::string>>();
            model.matrices.emplace(m.at("cluster").get<int>(),
                                   std::move(em));
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("model: missing or mistyped "
                                          "field: ") +
                              e.what());
    }
}

} // namespace ndp
