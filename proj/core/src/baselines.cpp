#include "ndp/baselines.hpp"

#include <cmath>
#include <numeric>

#include "ndp/errors.hpp"
#include "ndp/rng.hpp"

namespace ndp {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += a[i] * b[i];
    return acc;
}

double squared_norm(std::span<const double> v) { return dot(v, v); }

} // namespace

double mf_cell_estimate(const FactorModel& model, std::size_t u,
                        std::size_t m) {
    double r = dot(model.p.row(u), model.q.row(m));
    if (model.options.biased)
        r += model.b_u[u] + model.b_m[m];
    return r;
}

double mf_cell_objective(const FactorModel& model, std::size_t u,
                         std::size_t m, double r) {
    const double e = r - mf_cell_estimate(model, u, m);
    double obj = 0.5 * e * e +
                 0.5 * model.options.lambda *
                     (squared_norm(model.p.row(u)) +
                      squared_norm(model.q.row(m)));
    if (model.options.biased)
        obj += 0.5 * model.options.lambda *
               (model.b_u[u] * model.b_u[u] + model.b_m[m] * model.b_m[m]);
    return obj;
}

CellGradient mf_cell_gradient(const FactorModel& model, std::size_t u,
                              std::size_t m, double r) {
    const double e = r - mf_cell_estimate(model, u, m);
    const double lambda = model.options.lambda;
    const auto pu = model.p.row(u);
    const auto qm = model.q.row(m);
    CellGradient g;
    g.dp.resize(pu.size());
    g.dq.resize(qm.size());
    for (std::size_t k = 0; k < pu.size(); ++k) {
        g.dp[k] = -e * qm[k] + lambda * pu[k];
        g.dq[k] = -e * pu[k] + lambda * qm[k];
    }
    if (model.options.biased) {
        g.db_u = -e + lambda * model.b_u[u];
        g.db_m = -e + lambda * model.b_m[m];
    }
    return g;
}

FactorModel mf_train(const Matrix& r, const MfOptions& options) {
    if (r.rows() == 0 || r.cols() == 0)
        throw ValidationError("mf_train: empty rating matrix");
    if (!r.all_finite())
        throw ValidationError("mf_train: rating matrix has non-finite cells");
    MfOptions resolved = options;
    if (resolved.factors == 0)
        resolved.factors = static_cast<int>(r.cols());
    if (resolved.factors < 1)
        throw ValidationError("mf_train: factors must be >= 1");
    if (resolved.epochs < 0)
        throw ValidationError("mf_train: epochs must be >= 0");

    const std::size_t n = r.rows();
    const std::size_t m = r.cols();
    const std::size_t d = static_cast<std::size_t>(resolved.factors);

    FactorModel model;
    model.options = resolved;
    model.p = Matrix(n, d);
    model.q = Matrix(m, d);
    model.b_u.assign(n, 0.0);
    model.b_m.assign(m, 0.0);

    Rng rng(resolved.seed);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k)
            model.p(i, k) = rng.uniform(-0.05, 0.05);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < d; ++k)
            model.q(j, k) = rng.uniform(-0.05, 0.05);

    std::vector<std::pair<std::uint32_t, std::uint32_t>> cells;
    cells.reserve(n * m);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = 0; j < m; ++j)
            cells.emplace_back(i, j);

    const double lr = resolved.learning_rate;
    for (int epoch = 1; epoch <= resolved.epochs; ++epoch) {
        rng.shuffle(cells);
        for (const auto& [u, mm] : cells) {
            const auto g = mf_cell_gradient(model, u, mm, r(u, mm));
            auto pu = model.p.row(u);
            auto qm = model.q.row(mm);
            for (std::size_t k = 0; k < d; ++k) {
                pu[k] -= lr * g.dp[k];
                qm[k] -= lr * g.dq[k];
            }
            if (resolved.biased) {
                model.b_u[u] -= lr * g.db_u;
                model.b_m[mm] -= lr * g.db_m;
            }
        }
        if (!std::isfinite(mf_loss(model, r)))
            throw TrainingDiverged(
                "mf_train: loss went non-finite in epoch " +
                    std::to_string(epoch),
                epoch);
    }
    return model;
}

double mf_loss(const FactorModel& model, const Matrix& r) {
    double loss = 0.0;
    for (std::size_t i = 0; i < r.rows(); ++i)
        for (std::size_t j = 0; j < r.cols(); ++j) {
            const double e = r(i, j) - mf_cell_estimate(model, i, j);
            loss += e * e;
        }
    double penalty = squared_norm(model.p.entries()) +
                     squared_norm(model.q.entries());
    if (model.options.biased)
        penalty += squared_norm(model.b_u) + squared_norm(model.b_m);
    return loss + model.options.lambda * penalty;
}

DistributionVector mf_predict_ndv(const FactorModel& model,
                                  std::size_t target_index) {
    if (target_index >= model.num_targets())
        throw ValidationError("mf_predict_ndv: target index out of range");
    std::vector<double> row(model.num_labels());
    for (std::size_t j = 0; j < row.size(); ++j)
        row[j] = mf_cell_estimate(model, target_index, j);
    return project_to_simplex(row);
}

Matrix label_mass_matrix(const TemporalStarGraph& g,
                         std::span<const std::string> targets,
                         const TimeWindow& w, NeighborSemantics semantics) {
    const std::size_t n = g.catalog().size();
    Matrix r(targets.size(), n);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        for (const auto* node : g.neighbors_in_window(targets[i], w,
                                                      semantics)) {
            const double share =
                1.0 / static_cast<double>(node->label_ids.size());
            for (const auto label : node->label_ids)
                r(i, label) += share;
        }
    }
    return r;
}

DistributionVector mvm_predict(
    const ClusterModel& model,
    const std::map<std::string, DistributionVector>& ndvs_latest,
    const std::string& target) {
    const auto members = cluster_of(model, target);
    std::vector<double> mean;
    for (const auto& member : members) {
        const auto it = ndvs_latest.find(member);
        if (it == ndvs_latest.end())
            throw ValidationError("mvm_predict: no latest NDV for cluster "
                                  "member '" +
                                  member + "'");
        const auto& c = it->second.components();
        if (mean.empty())
            mean.assign(c.size(), 0.0);
        else if (mean.size() != c.size())
            throw DimensionMismatch(
                "mvm_predict: cluster member NDV dimensions differ");
        for (std::size_t i = 0; i < c.size(); ++i)
            mean[i] += c[i];
    }
    for (double& v : mean)
        v /= static_cast<double>(members.size());
    return DistributionVector(std::move(mean));
}

} // namespace ndp
