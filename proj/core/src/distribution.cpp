#include "ndp/distribution.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "ndp/errors.hpp"

namespace ndp {

DistributionVector::DistributionVector(std::vector<double> components)
    : components_(std::move(components)) {
    if (components_.empty())
        throw ValidationError("DistributionVector: empty component vector");
    double sum = 0.0;
    for (double c : components_) {
        if (!(c >= 0.0))
            throw ValidationError(
                "DistributionVector: negative or non-finite component " +
                std::to_string(c));
        sum += c;
    }
    if (std::fabs(sum - 1.0) > kSimplexSumTolerance)
        throw ValidationError("DistributionVector: components sum to " +
                              std::to_string(sum) + ", expected 1");
}

DistributionVector DistributionVector::uniform(std::size_t n) {
    DistributionVector v;
    v.components_.assign(n, 1.0 / static_cast<double>(n));
    return v;
}

DistributionVector project_to_simplex(std::span<const double> raw) {
    std::vector<double> clamped(raw.size(), 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const double v = raw[i];
        if (std::isfinite(v) && v > 0.0) {
            clamped[i] = v;
            sum += v;
        }
    }
    if (sum <= 0.0)
        return DistributionVector::uniform(raw.size());
    for (double& v : clamped)
        v /= sum;
    return DistributionVector(std::move(clamped));
}

DistributionVector compute_ldv(const AttributeNode& node,
                               const LabelCatalog& catalog) {
    if (node.label_ids.empty())
        throw ValidationError("compute_ldv: attribute '" + node.id +
                              "' has no labels");
    std::vector<double> components(catalog.size(), 0.0);
    const double share = 1.0 / static_cast<double>(node.label_ids.size());
    for (std::uint32_t label : node.label_ids) {
        if (label >= catalog.size())
            throw ValidationError("compute_ldv: label index out of range");
        components[label] = share;
    }
    return DistributionVector(std::move(components));
}

DistributionVector compute_ndv(
    std::span<const AttributeNode* const> occurrences,
    const LabelCatalog& catalog) {
    const std::size_t n = catalog.size();
    std::vector<double> mass(n, 0.0);
    for (const AttributeNode* node : occurrences) {
        const double share =
            1.0 / static_cast<double>(node->label_ids.size());
        for (std::uint32_t label : node->label_ids)
            mass[label] += share;
    }
    const double denom =
        static_cast<double>(occurrences.size()) + static_cast<double>(n);
    for (double& m : mass)
        m = (m + 1.0) / denom;
    return DistributionVector(std::move(mass));
}

DistributionVector ndv_for(const TemporalStarGraph& g,
                           const std::string& target, const TimeWindow& w,
                           NeighborSemantics semantics) {
    const auto neighbors = g.neighbors_in_window(target, w, semantics);
    return compute_ndv(neighbors, g.catalog());
}

} // namespace ndp
