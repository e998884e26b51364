#include "ndp/kmeans.hpp"

#include <cassert>
#include <limits>

#include "ndp/errors.hpp"
#include "ndp/rng.hpp"

namespace ndp {

namespace {

constexpr int kMaxIterations = 300;

double squared_distance(const std::vector<double>& a,
                        const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

// Nearest centroid, ties toward the lowest index.
int nearest(const std::vector<double>& point,
            const std::vector<std::vector<double>>& centroids) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = squared_distance(point, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

std::vector<std::vector<double>> kmeanspp_seed(
    const std::vector<const std::vector<double>*>& points, int k, Rng& rng) {
    std::vector<std::vector<double>> centroids;
    centroids.reserve(k);
    std::vector<bool> chosen(points.size(), false);

    std::size_t first = rng.uniform_below(points.size());
    centroids.push_back(*points[first]);
    chosen[first] = true;

    std::vector<double> dist2(points.size());
    while (static_cast<int>(centroids.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            dist2[i] = std::numeric_limits<double>::infinity();
            for (const auto& c : centroids) {
                const double d = squared_distance(*points[i], c);
                if (d < dist2[i])
                    dist2[i] = d;
            }
            if (chosen[i])
                dist2[i] = 0.0;
            total += dist2[i];
        }
        std::size_t pick = points.size();
        if (total > 0.0) {
            double r = rng.uniform01() * total;
            for (std::size_t i = 0; i < points.size(); ++i) {
                r -= dist2[i];
                if (r <= 0.0 && !chosen[i]) {
                    pick = i;
                    break;
                }
            }
        }
        if (pick == points.size()) {
            // Every remaining point duplicates a centroid; take the lowest
            // unchosen index.
            for (std::size_t i = 0; i < points.size(); ++i)
                if (!chosen[i]) {
                    pick = i;
                    break;
                }
        }
        chosen[pick] = true;
        centroids.push_back(*points[pick]);
    }
    return centroids;
}

} // namespace

int ClusterModel::cluster_for(const std::string& target) const {
    const auto it = assignments.find(target);
    if (it == assignments.end())
        throw ValidationError("cluster_for: unknown target '" + target + "'");
    return it->second;
}

ClusterModel kmeans(const std::map<std::string, std::vector<double>>& points,
                    int k, std::uint64_t seed) {
    if (k < 1)
        throw ValidationError("kmeans: k must be >= 1");
    if (points.empty() || static_cast<std::size_t>(k) > points.size())
        throw ValidationError("kmeans: k exceeds the number of points");

    std::vector<const std::string*> ids;
    std::vector<const std::vector<double>*> data;
    ids.reserve(points.size());
    data.reserve(points.size());
    const std::size_t dim = points.begin()->second.size();
    for (const auto& [id, point] : points) {
        if (point.size() != dim)
            throw DimensionMismatch("kmeans: points have mixed dimensions");
        ids.push_back(&id);
        data.push_back(&point);
    }

    Rng rng(seed);
    auto centroids = kmeanspp_seed(data, k, rng);
    std::vector<int> assignment(data.size(), -1);
    std::vector<double> trace;

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const int c = nearest(*data[i], centroids);
            if (c != assignment[i]) {
                assignment[i] = c;
                changed = true;
            }
        }

        std::vector<std::size_t> sizes(k, 0);
        for (int a : assignment)
            ++sizes[a];

        // Reseed each empty cluster at the point farthest from its current
        // centroid, donor clusters keeping at least one member.
        for (int empty = 0; empty < k; ++empty) {
            if (sizes[empty] != 0)
                continue;
            std::size_t farthest = data.size();
            double far_d = -1.0;
            for (std::size_t i = 0; i < data.size(); ++i) {
                if (sizes[assignment[i]] < 2)
                    continue;
                const double d =
                    squared_distance(*data[i], centroids[assignment[i]]);
                if (d > far_d) {
                    far_d = d;
                    farthest = i;
                }
            }
            if (farthest == data.size())
                throw Error("kmeans: unable to repair empty cluster");
            --sizes[assignment[farthest]];
            assignment[farthest] = empty;
            ++sizes[empty];
            centroids[empty] = *data[farthest];
            changed = true;
        }

        for (int c = 0; c < k; ++c) {
            auto& centroid = centroids[c];
            centroid.assign(dim, 0.0);
            for (std::size_t i = 0; i < data.size(); ++i)
                if (assignment[i] == c)
                    for (std::size_t j = 0; j < dim; ++j)
                        centroid[j] += (*data[i])[j];
            for (double& v : centroid)
                v /= static_cast<double>(sizes[c]);
        }

        double wcss = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i)
            wcss += squared_distance(*data[i], centroids[assignment[i]]);
        assert(trace.empty() ||
               wcss <= trace.back() + 1e-9 * (1.0 + trace.back()));
        trace.push_back(wcss);

        if (!changed)
            break;
    }

    ClusterModel model;
    model.k = k;
    model.seed = seed;
    model.centroids = std::move(centroids);
    model.objective_trace = std::move(trace);
    for (std::size_t i = 0; i < ids.size(); ++i)
        model.assignments.emplace(*ids[i], assignment[i]);
    return model;
}

std::vector<std::string> cluster_of(const ClusterModel& model,
                                    const std::string& target) {
    const int cluster = model.cluster_for(target);
    std::vector<std::string> members;
    for (const auto& [id, c] : model.assignments)
        if (c == cluster)
            members.push_back(id);
    return members;
}

} // namespace ndp
