#ifndef NDP_METRICS_HPP
#define NDP_METRICS_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ndp/distribution.hpp"

namespace ndp {

/// Normalized absolute accuracy: 1 - d/sqrt(2) for Euclidean distance d
/// between two distributions of equal dimension. Lands in [0, 1] (sqrt(2)
/// is the simplex diameter); roundoff at the corners is clamped.
double absolute_accuracy(const DistributionVector& predicted,
                         const DistributionVector& truth);

/// Prediction difficulty g = 1 - h/2, where h is the base-n temporal
/// entropy of the distribution. Uniform gives exactly 1/2 (hardest to miss,
/// least informative); a peaked distribution approaches 1. Requires n >= 2
/// and strictly positive components (smoothed NDVs guarantee both).
double prediction_difficulty(const DistributionVector& w);

/// Virtual accuracy: the product eta * g. Validates eta in [0,1] and g in
/// [1/2, 1).
double virtual_accuracy(double eta, double g);

/// Full score of one prediction. Difficulty is computed on the truth
/// distribution, so every method shares one PD per target.
struct PredictionScore {
    std::string target_id;
    double eta = 0.0; // in [0, 1]
    double pd = 0.0;  // in [1/2, 1)
    double va = 0.0;  // eta * pd, in [0, 1)
    DistributionVector predicted;
    DistributionVector truth;
};

PredictionScore score_prediction(std::string target_id,
                                 DistributionVector predicted,
                                 DistributionVector truth);

struct MethodSummary {
    double mean_eta = 0.0;
    double mean_va = 0.0;
};

/// One difficulty bucket. Group 1 holds the highest-PD (most predictable)
/// targets; the last group the closest-to-uniform ones.
struct PdGroup {
    int index = 0; // 1-based
    std::vector<std::string> targets;
    std::map<std::string, MethodSummary> per_method;
};

/// Scores of every requested method over one shared target set, with
/// per-method aggregates and the difficulty-group breakdown.
struct EvaluationReport {
    std::vector<std::string> methods; // in input order
    std::map<std::string, std::vector<PredictionScore>> scores;
    std::map<std::string, MethodSummary> summary;
    std::vector<PdGroup> groups;
};

using MethodScores =
    std::vector<std::pair<std::string, std::vector<PredictionScore>>>;

/// Builds the report: targets ranked by PD descending (ties by id
/// ascending), split into `group_count` contiguous buckets whose sizes
/// differ by at most one (remainder to the earliest buckets), then per-
/// bucket and overall means per method. All methods must cover the same
/// target set.
EvaluationReport pd_group_report(const MethodScores& by_method,
                                 int group_count = 5);

/// JSON rendering of a report. Deterministic: identical reports produce
/// byte-identical documents.
std::string report_to_json(const EvaluationReport& report,
                           const std::string& run_label);

/// Plain-text table rendering: one row per run with the mean virtual
/// accuracy of every method side by side, followed by the mean absolute
/// accuracies and the difficulty-group breakdown.
std::string report_to_table(const EvaluationReport& report,
                            const std::string& run_label);

} // namespace ndp

#endif
