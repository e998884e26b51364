#ifndef NDP_BASELINES_HPP
#define NDP_BASELINES_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ndp/distribution.hpp"
#include "ndp/graph.hpp"
#include "ndp/kmeans.hpp"
#include "ndp/linalg.hpp"

namespace ndp {

/// Hyperparameters of the factor baselines. The defaults for learning rate
/// and the punishing parameter are the evaluated settings; factors = 0
/// resolves to the rating matrix's column count (one latent feature per
/// label component).
struct MfOptions {
    int factors = 0;
    double learning_rate = 0.001;
    double lambda = 0.02;
    int epochs = 100;
    std::uint64_t seed = 0;
    bool biased = false;
};

/// Trained (biased) matrix-factorization model: R is approximated by
/// P Q^T (+ b_u + b_m for the biased variant).
struct FactorModel {
    Matrix p;                // N x D, one row per target
    Matrix q;                // M x D, one row per label
    std::vector<double> b_u; // per-target bias, all zero for basic MF
    std::vector<double> b_m; // per-label bias, all zero for basic MF
    MfOptions options;

    std::size_t num_targets() const { return p.rows(); }
    std::size_t num_labels() const { return q.rows(); }
};

/// The reconstruction of cell (u, m): p_u . q_m, plus both biases for the
/// biased variant.
double mf_cell_estimate(const FactorModel& model, std::size_t u,
                        std::size_t m);

/// The SGD objective at one cell: e^2/2 + (lambda/2) (|p_u|^2 + |q_m|^2),
/// plus (lambda/2)(b_u^2 + b_m^2) for the biased variant. mf_train descends
/// exactly this via mf_cell_gradient.
double mf_cell_objective(const FactorModel& model, std::size_t u,
                         std::size_t m, double r);

/// Analytic gradient of mf_cell_objective in (p_u, q_m, b_u, b_m), all
/// evaluated at the current parameters (so applying every piece at once is
/// the simultaneous update that uses the pre-step p).
struct CellGradient {
    std::vector<double> dp;
    std::vector<double> dq;
    double db_u = 0.0;
    double db_m = 0.0;
};

CellGradient mf_cell_gradient(const FactorModel& model, std::size_t u,
                              std::size_t m, double r);

/// Stochastic gradient descent over all cells of R (every cell is treated
/// as observed), epochs full passes in seeded-shuffled order, factors
/// initialized uniformly in [-0.05, 0.05] from the seed and biases at zero.
/// Deterministic given (R, options). Throws TrainingDiverged naming the
/// epoch if the loss goes non-finite.
FactorModel mf_train(const Matrix& r, const MfOptions& options);

/// Total regularized squared error over R: sum of e^2 plus lambda times the
/// squared factor (and bias) norms.
double mf_loss(const FactorModel& model, const Matrix& r);

/// Reconstructed row of the target, projected onto the simplex (negatives
/// clamped, renormalized; all-nonpositive rows fall back to uniform).
DistributionVector mf_predict_ndv(const FactorModel& model,
                                  std::size_t target_index);

/// Rating matrix for the factor baselines: one row per listed target, one
/// column per label; cell = the target's unsmoothed neighbor-label mass in
/// the window (the sum of its neighbor occurrences' LDV components).
Matrix label_mass_matrix(const TemporalStarGraph& g,
                         std::span<const std::string> targets,
                         const TimeWindow& w,
                         NeighborSemantics semantics =
                             NeighborSemantics::kMultiset);

/// Mean value method: the arithmetic mean of the latest observed NDVs of
/// the target's cluster members (the mean of distributions is itself a
/// distribution). `ndvs_latest` must cover every member of the cluster.
DistributionVector mvm_predict(
    const ClusterModel& model,
    const std::map<std::string, DistributionVector>& ndvs_latest,
    const std::string& target);

} // namespace ndp

#endif
