#ifndef NDP_KMEANS_HPP
#define NDP_KMEANS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ndp {

/// Result of clustering target nodes by their historical NDVs.
struct ClusterModel {
    int k = 0;
    std::uint64_t seed = 0;
    std::map<std::string, int> assignments;      // target id -> cluster index
    std::vector<std::vector<double>> centroids;  // k centroids
    std::vector<double> objective_trace;         // within-cluster sum of
                                                 // squares per iteration

    int cluster_for(const std::string& target) const;
};

/// Lloyd's K-means with k-means++ seeding, Euclidean distance, ties broken
/// toward the lowest cluster index, and empty clusters reseeded at the point
/// farthest from its current centroid. Runs to convergence (no assignment
/// changes) or 300 iterations. Deterministic given (points, k, seed).
///
/// Requires 1 <= k <= points.size() and equal-dimensional points.
ClusterModel kmeans(const std::map<std::string, std::vector<double>>& points,
                    int k, std::uint64_t seed);

/// All targets sharing `target`'s cluster, including the target itself.
/// Sorted lexicographically. Throws on an unclustered target.
std::vector<std::string> cluster_of(const ClusterModel& model,
                                    const std::string& target);

} // namespace ndp

#endif
