#ifndef NDP_DISTRIBUTION_HPP
#define NDP_DISTRIBUTION_HPP

#include <span>
#include <vector>

#include "ndp/graph.hpp"

namespace ndp {

/// A point on the probability simplex: nonnegative components summing to 1
/// within 1e-9. Houses both label distribution vectors (LDV) and neighbor
/// distribution vectors (NDV).
class DistributionVector {
public:
    DistributionVector() = default;

    /// Validates nonnegativity and normalization; throws ValidationError.
    explicit DistributionVector(std::vector<double> components);

    static DistributionVector uniform(std::size_t n);

    const std::vector<double>& components() const { return components_; }
    std::size_t size() const { return components_.size(); }
    double operator[](std::size_t i) const { return components_[i]; }

    bool operator==(const DistributionVector&) const = default;

private:
    std::vector<double> components_;
};

inline constexpr double kSimplexSumTolerance = 1e-9;

/// Clamps negatives to zero and renormalizes. An all-nonpositive input
/// falls back to the uniform distribution. This is how raw model outputs
/// (evolution products, factor reconstructions) become distributions again.
DistributionVector project_to_simplex(std::span<const double> raw);

/// Label distribution vector of an attribute node: uniform over the node's
/// own labels, zero elsewhere.
DistributionVector compute_ldv(const AttributeNode& node,
                               const LabelCatalog& catalog);

/// Neighbor distribution vector of a multiset of attribute occurrences:
/// component i = (sum of the occurrences' LDV components i + 1) /
/// (occurrence count + n). The add-one / add-n smoothing keeps every
/// component strictly positive; an empty multiset yields the uniform
/// vector.
DistributionVector compute_ndv(
    std::span<const AttributeNode* const> occurrences,
    const LabelCatalog& catalog);

/// NDV of a target's neighbors within a window.
DistributionVector ndv_for(
    const TemporalStarGraph& g, const std::string& target,
    const TimeWindow& w,
    NeighborSemantics semantics = NeighborSemantics::kMultiset);

} // namespace ndp

#endif
