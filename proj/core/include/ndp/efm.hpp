#ifndef NDP_EFM_HPP
#define NDP_EFM_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ndp/distribution.hpp"
#include "ndp/graph.hpp"
#include "ndp/kmeans.hpp"
#include "ndp/linalg.hpp"

namespace ndp {

/// Learned neighbor-label evolution matrix of one cluster. Stored in column
/// orientation: prediction is entries * w for a column NDV w. The normal
/// equations produce the row-convention solution B (y_row ~ x_row * B); we
/// keep its transpose so the column form holds literally.
struct EvolutionMatrix {
    Matrix entries;                          // n x n, finite
    std::vector<std::string> source_cluster; // targets whose samples fit it
    double ridge_used = 0.0;                 // 0 unless the ridge retry fired
};

/// One regression row: a target's NDV over the history window paired with
/// its NDV over the current window.
struct RegressionSample {
    std::string target_id;
    DistributionVector x_row; // NDV over the history window
    DistributionVector y_row; // NDV over the current window
};

/// A trained evolution factor model: K-means clusters over historical NDVs
/// plus one evolution matrix per cluster. Immutable once trained;
/// predictions are read-only and safe to run concurrently.
struct EfmModel {
    LabelCatalog catalog;
    TimeWindow history;
    TimeWindow current;
    int k = 0;
    std::uint64_t seed = 0;
    double ridge_fallback = 0.0;
    NeighborSemantics semantics = NeighborSemantics::kMultiset;
    ClusterModel clusters;
    std::map<int, EvolutionMatrix> matrices; // cluster index -> matrix

    /// The single combined window [history.start, current.end) that
    /// predictions read; requires the adjacency enforced at training.
    TimeWindow combined_history() const {
        return {history.start, current.end};
    }
};

/// The regression rows for every target active in both windows (ids sorted).
/// x_row is the NDV over `history`, y_row the NDV over `current`.
std::vector<RegressionSample> make_training_samples(
    const TemporalStarGraph& g, const TimeWindow& history,
    const TimeWindow& current,
    NeighborSemantics semantics = NeighborSemantics::kMultiset);

/// Trains the evolution factor model: clusters the active targets by their
/// history-window NDVs (K-means, seeded), then fits one evolution matrix per
/// cluster by least squares on the members' (history, current) NDV pairs.
///
/// Singular normal equations are retried once with ridge = ridge_fallback;
/// a cluster that stays singular inherits the matrix fit on all samples.
/// With ridge_fallback = 0 the singularity propagates as SingularMatrix.
///
/// Requires history and current adjacent (history.end == current.start) and
/// at least one target active in both; k must not exceed the active count.
EfmModel train(const TemporalStarGraph& g, const TimeWindow& history,
               const TimeWindow& current, int k, std::uint64_t seed,
               double ridge_fallback = 1e-8,
               NeighborSemantics semantics = NeighborSemantics::kMultiset);

/// Cluster responsible for `target`: its training assignment when it was
/// clustered, otherwise the centroid nearest the target's combined-history
/// NDV (ties toward the lowest cluster index).
int assigned_cluster(const EfmModel& model, const TemporalStarGraph& g,
                     const std::string& target);

/// The evolution product before simplex projection: entries * w where w is
/// the target's NDV over the combined history window.
std::vector<double> predict_raw(const EfmModel& model,
                                const TemporalStarGraph& g,
                                const std::string& target);

/// Predicted future NDV: predict_raw projected onto the simplex (negatives
/// clamped to zero, renormalized; an all-nonpositive product falls back to
/// uniform). Targets with no events at all still predict, from the smoothed
/// uniform input.
DistributionVector predict(const EfmModel& model, const TemporalStarGraph& g,
                           const std::string& target);

/// Evolution matrix for `target`'s cluster refit without the target's own
/// row, for leave-one-out evaluation. Falls back to the all-samples-minus-
/// target fit when the reduced cluster is empty or singular. `samples` must
/// be the full training sample set of `model`'s windows.
Matrix leave_one_out_matrix(const EfmModel& model,
                            std::span<const RegressionSample> samples,
                            const std::string& target);

/// One row of the K-selection sweep. Candidates exceeding the number of
/// trainable targets are kept in the table as infeasible rows (score NaN)
/// and excluded from the argmax.
struct KSelectionRow {
    int k = 0;
    double mean_eta = 0.0;
    bool feasible = false;
};

struct KSelection {
    int chosen_k = 0;
    std::vector<KSelectionRow> rows; // in candidate order
    std::vector<std::string> sampled_targets;
};

/// Picks the cluster count that maximizes mean absolute accuracy, scored
/// without touching the future window: training windows are shifted back by
/// one current-window length and predictions are scored against the NDVs
/// observed in the original current window, over `sample_size` targets
/// sampled (seeded) from those active in all windows involved. Ties go to
/// the smallest k.
KSelection select_k(const TemporalStarGraph& g, const TimeWindow& history,
                    const TimeWindow& current, std::span<const int> k_candidates,
                    std::size_t sample_size, std::uint64_t seed,
                    double ridge_fallback = 1e-8,
                    NeighborSemantics semantics = NeighborSemantics::kMultiset);

/// Model (de)serialization: a self-describing JSON document carrying the
/// catalog, windows, clustering, and per-cluster matrices. Matrix entries
/// round-trip bit-exactly.
void save_model(const EfmModel& model, std::ostream& out);
EfmModel load_model(std::istream& in);

} // namespace ndp

#endif
