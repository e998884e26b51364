#include "ndp/evaluate.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "ndp/baselines.hpp"
#include "ndp/errors.hpp"
#include "ndp/rng.hpp"

namespace ndp {

std::string method_name(Method m) {
    switch (m) {
    case Method::kEfm:
        return "efm";
    case Method::kMvm:
        return "mvm";
    case Method::kMf:
        return "mf";
    case Method::kBiasedMf:
        return "biasedmf";
    }
    throw ValidationError("method_name: unknown method");
}

Method method_from_name(const std::string& name) {
    if (name == "efm")
        return Method::kEfm;
    if (name == "mvm")
        return Method::kMvm;
    if (name == "mf")
        return Method::kMf;
    if (name == "biasedmf")
        return Method::kBiasedMf;
    throw ValidationError("unknown method '" + name +
                          "' (expected efm, mvm, mf, or biasedmf)");
}

std::vector<Method> parse_methods(const std::string& csv) {
    std::vector<Method> methods;
    std::size_t start = 0;
    while (start <= csv.size()) {
        std::size_t comma = csv.find(',', start);
        if (comma == std::string::npos)
            comma = csv.size();
        std::string name = csv.substr(start, comma - start);
        // Trim surrounding spaces.
        const auto first = name.find_first_not_of(" \t");
        const auto last = name.find_last_not_of(" \t");
        name = first == std::string::npos
                   ? std::string()
                   : name.substr(first, last - first + 1);
        if (name.empty())
            throw ValidationError("empty method name in '" + csv + "'");
        const Method m = method_from_name(name);
        if (std::find(methods.begin(), methods.end(), m) != methods.end())
            throw ValidationError("method '" + name + "' listed twice");
        methods.push_back(m);
        start = comma + 1;
    }
    if (methods.empty())
        throw ValidationError("no methods requested");
    return methods;
}

EvaluationOutcome run_evaluation(const TemporalStarGraph& g,
                                 const WindowTriple& windows,
                                 const EvaluationOptions& options) {
    validate_window_triple(windows);
    if (options.methods.empty())
        throw ValidationError("run_evaluation: no methods requested");

    const auto semantics = options.semantics;
    const TimeWindow combined = windows.combined_history();

    // One evolution model serves EFM prediction and MVM's clusters.
    EfmModel model =
        train(g, windows.history, windows.current, options.k,
              derive_seed(options.seed, "clustering"), options.ridge_fallback,
              semantics);
    const auto samples = make_training_samples(g, windows.history,
                                               windows.current, semantics);

    std::vector<std::string> trained_ids;
    trained_ids.reserve(samples.size());
    for (const auto& s : samples)
        trained_ids.push_back(s.target_id);

    const std::array<TimeWindow, 3> all_windows{
        windows.history, windows.current, windows.future};
    auto eval_targets = g.targets_active_in_all(all_windows);
    if (eval_targets.empty())
        throw ValidationError(
            "run_evaluation: no targets active in all three windows");
    if (options.sample_size > eval_targets.size())
        throw ValidationError(
            "run_evaluation: sample_size exceeds the " +
            std::to_string(eval_targets.size()) + " eligible targets");
    if (options.sample_size > 0 &&
        options.sample_size < eval_targets.size()) {
        Rng rng(derive_seed(options.seed, "evaluation sample"));
        std::vector<std::string> sampled;
        for (std::size_t idx :
             rng.sample_indices(eval_targets.size(), options.sample_size))
            sampled.push_back(eval_targets[idx]);
        std::sort(sampled.begin(), sampled.end());
        eval_targets = std::move(sampled);
    }

    std::map<std::string, DistributionVector> latest;
    for (const auto& id : trained_ids)
        latest.emplace(id, ndv_for(g, id, combined, semantics));

    std::map<std::string, DistributionVector> truths;
    for (const auto& id : eval_targets)
        truths.emplace(id, ndv_for(g, id, windows.future, semantics));

    const bool wants_mf =
        std::find(options.methods.begin(), options.methods.end(),
                  Method::kMf) != options.methods.end();
    const bool wants_biased =
        std::find(options.methods.begin(), options.methods.end(),
                  Method::kBiasedMf) != options.methods.end();

    Matrix ratings;
    if (wants_mf || wants_biased)
        ratings = label_mass_matrix(g, trained_ids, combined, semantics);

    auto factor_options = [&](bool biased) {
        MfOptions o;
        o.factors = options.factors;
        o.learning_rate = options.learning_rate;
        o.lambda = options.lambda;
        o.epochs = options.epochs;
        o.seed = derive_seed(options.seed, biased ? "biasedmf" : "mf");
        o.biased = biased;
        return o;
    };
    FactorModel mf_model, biased_model;
    if (wants_mf)
        mf_model = mf_train(ratings, factor_options(false));
    if (wants_biased)
        biased_model = mf_train(ratings, factor_options(true));

    auto row_index = [&](const std::string& id) {
        const auto it = std::lower_bound(trained_ids.begin(),
                                         trained_ids.end(), id);
        if (it == trained_ids.end() || *it != id)
            throw ValidationError("run_evaluation: target '" + id +
                                  "' was not part of training");
        return static_cast<std::size_t>(it - trained_ids.begin());
    };

    auto predict_with = [&](Method m,
                            const std::string& id) -> DistributionVector {
        switch (m) {
        case Method::kEfm:
            if (options.leave_one_out &&
                model.clusters.assignments.contains(id)) {
                const Matrix fit = leave_one_out_matrix(model, samples, id);
                return project_to_simplex(
                    matvec(fit, latest.at(id).components()));
            }
            return predict(model, g, id);
        case Method::kMvm:
            return mvm_predict(model.clusters, latest, id);
        case Method::kMf:
            return mf_predict_ndv(mf_model, row_index(id));
        case Method::kBiasedMf:
            return mf_predict_ndv(biased_model, row_index(id));
        }
        throw ValidationError("run_evaluation: unknown method");
    };

    MethodScores by_method;
    for (const Method m : options.methods) {
        std::vector<PredictionScore> scores;
        scores.reserve(eval_targets.size());
        for (const auto& id : eval_targets)
            scores.push_back(score_prediction(id, predict_with(m, id),
                                              truths.at(id)));
        by_method.emplace_back(method_name(m), std::move(scores));
    }

    EvaluationOutcome outcome;
    outcome.report = pd_group_report(by_method, options.pd_groups);
    outcome.model = std::move(model);
    outcome.eval_targets = std::move(eval_targets);
    return outcome;
}

} // namespace ndp
