#ifndef NDP_SYNTH_HPP
#define NDP_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ndp/distribution.hpp"
#include "ndp/graph.hpp"
#include "ndp/linalg.hpp"

namespace ndp {

/// Recipe for a synthetic star-schema network with planted dynamics. Each
/// target belongs to a planted cluster; its history-window label
/// distribution is drawn from the cluster's Dirichlet profile and evolved
/// through the cluster's column-stochastic matrix to produce the current-
/// and future-window distributions events are then sampled from.
struct SynthSpec {
    int n = 6;             // label count, >= 2
    int num_targets = 100; // > 0
    int num_clusters = 1;  // >= 1

    /// One column-stochastic n x n matrix per cluster; empty means identity
    /// dynamics everywhere.
    std::vector<Matrix> planted;

    /// Events sampled per target per window; 0 leaves every NDV at the
    /// smoothed uniform.
    int events_per_target_per_window = 100;

    WindowTriple windows;

    /// Extra per-window jitter: with noise > 0 each window's sampling
    /// distribution is a Dirichlet draw centered on the planted one (alpha =
    /// planted / noise), so the mean is preserved while larger values
    /// scatter more. 0 samples from the planted distributions exactly.
    double noise = 0.0;

    /// Concentration of the per-target base draw; higher values pull
    /// targets toward their cluster profile (less cross-target diversity).
    double base_concentration = 1.0;

    /// How far apart the cluster profiles sit: each cluster's Dirichlet
    /// mean is uniform plus this much extra weight on one label. 0 makes
    /// clusters indistinguishable at the history snapshot.
    double cluster_separation = 0.0;

    std::uint64_t seed = 0;

    /// Also emit two-label attribute nodes (half the events, in
    /// expectation), exercising multi-label LDV splitting while keeping the
    /// analytic per-window distributions exact in expectation.
    bool multi_label = false;
};

/// Everything the generator knows about one target.
struct TargetTruth {
    std::string id;
    int cluster = 0;

    // Planted label distributions, pre-smoothing and pre-noise. These
    // satisfy dist_current = L * dist_history and dist_future = L *
    // dist_current exactly (analytically, by construction).
    std::vector<double> dist_history;
    std::vector<double> dist_current;
    std::vector<double> dist_future;

    // What events were actually drawn from (== dist_* when noise == 0).
    std::vector<double> sampling_history;
    std::vector<double> sampling_current;
    std::vector<double> sampling_future;

    // Expected smoothed NDVs given the realized event counts:
    // (count * sampling + 1) / (count + n).
    DistributionVector expected_ndv_history;
    DistributionVector expected_ndv_current;
    DistributionVector expected_ndv_future;

    int events_history = 0;
    int events_current = 0;
    int events_future = 0;
};

struct GroundTruth {
    std::vector<Matrix> planted;      // per-cluster, echoed from the spec
    std::vector<TargetTruth> targets; // sorted by id
};

struct SynthResult {
    TemporalStarGraph graph;
    GroundTruth truth;
};

/// Deterministic generation under the spec seed. Attribute nodes are
/// single-label (plus two-label pairs behind the multi_label flag), so the
/// analytic distributions above are exact expectations of the sampled data.
SynthResult generate(const SynthSpec& spec);

/// The planted-dynamics family used by fixtures and the CLI: gamma * I +
/// (1 - gamma) * (cyclic shift by `shift`). Column-stochastic for gamma in
/// [0, 1]; materially asymmetric whenever gamma < 1 and shift is not a
/// multiple of n.
Matrix mixing_matrix(int n, double gamma, int shift);

/// JSON rendering of the bundle (deterministic bytes).
std::string truth_to_json(const GroundTruth& truth);

} // namespace ndp

#endif
