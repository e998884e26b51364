#ifndef NDP_EVALUATE_HPP
#define NDP_EVALUATE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ndp/efm.hpp"
#include "ndp/graph.hpp"
#include "ndp/metrics.hpp"

namespace ndp {

enum class Method { kEfm, kMvm, kMf, kBiasedMf };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

/// Parses a comma-separated method list ("efm,mvm,mf,biasedmf"), keeping
/// the given order and rejecting unknowns and duplicates.
std::vector<Method> parse_methods(const std::string& csv);

struct EvaluationOptions {
    std::vector<Method> methods{Method::kEfm, Method::kMvm, Method::kMf,
                                Method::kBiasedMf};
    int k = 1;
    std::uint64_t seed = 0;
    double ridge_fallback = 1e-8;

    // Factor-baseline hyperparameters.
    double learning_rate = 0.001;
    double lambda = 0.02;
    int epochs = 100;
    int factors = 0; // 0 -> label count

    /// Refit each evaluated target's evolution matrix without its own
    /// regression row (honest-evaluation mode; slower).
    bool leave_one_out = false;

    int pd_groups = 5;

    /// Evaluate a seeded sample of this many eligible targets; 0 means all.
    std::size_t sample_size = 0;

    NeighborSemantics semantics = NeighborSemantics::kMultiset;
};

struct EvaluationOutcome {
    EvaluationReport report;
    EfmModel model;                        // the trained evolution model
    std::vector<std::string> eval_targets; // sorted
};

/// Runs the full comparison: trains the evolution model (and the factor
/// baselines when requested) on the history+current windows, predicts the
/// future-window NDV of every evaluated target with each method, and scores
/// everything against the observed future NDVs. Evaluated targets are those
/// active in all three windows. All randomness derives from options.seed
/// via named sub-streams, so runs are reproducible end to end.
EvaluationOutcome run_evaluation(const TemporalStarGraph& g,
                                 const WindowTriple& windows,
                                 const EvaluationOptions& options);

} // namespace ndp

#endif
