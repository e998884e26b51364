#include "ndp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"

#include "ndp/errors.hpp"
#include "ndp/rng.hpp"

namespace ndp {

namespace {

std::string padded(const char* prefix, int value, int width) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%0*d", prefix, std::clamp(width, 1, 9),
                  value);
    return buf;
}

int digits_for(int max_value) {
    int width = 1;
    while (max_value >= 10) {
        max_value /= 10;
        ++width;
    }
    return std::max(width, 3);
}

void validate_spec(const SynthSpec& spec) {
    if (spec.n < 2)
        throw ValidationError("synth: need at least 2 label types");
    if (spec.num_targets < 1)
        throw ValidationError("synth: need at least 1 target");
    if (spec.num_clusters < 1)
        throw ValidationError("synth: need at least 1 cluster");
    if (spec.events_per_target_per_window < 0)
        throw ValidationError("synth: negative event count");
    if (spec.noise < 0.0)
        throw ValidationError("synth: negative noise");
    if (!(spec.base_concentration > 0.0))
        throw ValidationError("synth: base concentration must be positive");
    if (spec.cluster_separation < 0.0)
        throw ValidationError("synth: negative cluster separation");
    validate_window_triple(spec.windows);
    if (!spec.planted.empty() &&
        spec.planted.size() != static_cast<std::size_t>(spec.num_clusters))
        throw ValidationError(
            "synth: need one planted matrix per cluster (or none for "
            "identity dynamics)");
    const std::size_t n = static_cast<std::size_t>(spec.n);
    for (const auto& m : spec.planted) {
        if (m.rows() != n || m.cols() != n)
            throw ValidationError("synth: planted matrix is not n x n");
        for (std::size_t j = 0; j < n; ++j) {
            double column = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (m(i, j) < 0.0)
                    throw ValidationError(
                        "synth: planted matrix has a negative entry");
                column += m(i, j);
            }
            if (std::abs(column - 1.0) > 1e-9)
                throw ValidationError(
                    "synth: planted matrix column " + std::to_string(j) +
                    " does not sum to 1");
        }
    }
}

std::size_t draw_label(Rng& rng, std::span<const double> p) {
    const double u = rng.uniform01();
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0)
            last_positive = i;
        acc += p[i];
        if (u < acc)
            return i;
    }
    return last_positive; // roundoff left acc slightly below 1
}

DistributionVector expected_ndv(std::span<const double> sampling,
                                int count, int n) {
    std::vector<double> v(sampling.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = (count * sampling[i] + 1.0) / (count + n);
    return DistributionVector(std::move(v));
}

} // namespace

Matrix mixing_matrix(int n, double gamma, int shift) {
    if (n < 2)
        throw ValidationError("mixing_matrix: n must be >= 2");
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw ValidationError("mixing_matrix: gamma must lie in [0, 1]");
    Matrix m(n, n);
    const int wrapped = ((shift % n) + n) % n;
    for (int j = 0; j < n; ++j) {
        m(j, j) += gamma;
        m((j + wrapped) % n, j) += 1.0 - gamma;
    }
    return m;
}

SynthResult generate(const SynthSpec& spec) {
    validate_spec(spec);
    const int n = spec.n;

    std::vector<Matrix> planted = spec.planted;
    if (planted.empty())
        planted.assign(spec.num_clusters, Matrix::identity(n));

    const int label_width = digits_for(n - 1);
    std::vector<std::string> label_names(n);
    for (int i = 0; i < n; ++i)
        label_names[i] = padded("l", i, label_width);

    GraphBuilder builder("attribute");
    std::vector<std::string> single_attr(n);
    for (int i = 0; i < n; ++i) {
        single_attr[i] = padded("a", i, label_width);
        builder.add_attribute(single_attr[i], {label_names[i]});
    }
    std::vector<std::vector<std::string>> pair_attr;
    if (spec.multi_label) {
        pair_attr.assign(n, std::vector<std::string>(n));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const std::string id = padded("a", i, label_width) +
                                       padded("x", j, label_width);
                builder.add_attribute(id,
                                      {label_names[i], label_names[j]});
                pair_attr[i][j] = id;
            }
    }

    // Cluster profiles: uniform plus separation extra weight on one label,
    // scaled so the total Dirichlet concentration stays base_concentration
    // per component on average.
    std::vector<std::vector<double>> alphas(spec.num_clusters);
    for (int c = 0; c < spec.num_clusters; ++c) {
        std::vector<double> alpha(n, 1.0);
        alpha[c % n] += spec.cluster_separation;
        const double total = n + spec.cluster_separation;
        for (double& a : alpha)
            a *= spec.base_concentration * n / total;
        alphas[c] = std::move(alpha);
    }

    Rng rng(derive_seed(spec.seed, "synth"));

    GroundTruth truth;
    truth.planted = planted;
    const int id_width = digits_for(spec.num_targets - 1);

    const TimeWindow windows[3] = {spec.windows.history,
                                   spec.windows.current,
                                   spec.windows.future};

    for (int t = 0; t < spec.num_targets; ++t) {
        TargetTruth tt;
        tt.id = padded("t", t, id_width);
        tt.cluster = t % spec.num_clusters;
        const Matrix& evolve = planted[tt.cluster];

        tt.dist_history = rng.dirichlet(alphas[tt.cluster]);
        tt.dist_current = matvec(evolve, tt.dist_history);
        tt.dist_future = matvec(evolve, tt.dist_current);

        const std::vector<double>* dists[3] = {&tt.dist_history,
                                               &tt.dist_current,
                                               &tt.dist_future};
        std::vector<double>* samplings[3] = {&tt.sampling_history,
                                             &tt.sampling_current,
                                             &tt.sampling_future};
        int* counts[3] = {&tt.events_history, &tt.events_current,
                          &tt.events_future};
        DistributionVector* expected[3] = {&tt.expected_ndv_history,
                                           &tt.expected_ndv_current,
                                           &tt.expected_ndv_future};

        for (int w = 0; w < 3; ++w) {
            if (spec.noise > 0.0) {
                std::vector<double> alpha = *dists[w];
                for (double& a : alpha)
                    a /= spec.noise;
                *samplings[w] = rng.dirichlet(alpha);
            } else {
                *samplings[w] = *dists[w];
            }
            const auto& s = *samplings[w];
            const int count = spec.events_per_target_per_window;
            *counts[w] = count;
            *expected[w] = expected_ndv(s, count, n);
            for (int e = 0; e < count; ++e) {
                const std::int64_t ts =
                    windows[w].start +
                    static_cast<std::int64_t>(rng.uniform_below(
                        static_cast<std::uint64_t>(windows[w].length())));
                std::size_t label = draw_label(rng, s);
                const std::string* attr = &single_attr[label];
                if (spec.multi_label && rng.uniform01() < 0.5) {
                    std::size_t other = draw_label(rng, s);
                    if (other != label)
                        attr = &pair_attr[std::min(label, other)]
                                         [std::max(label, other)];
                }
                builder.add_event(tt.id, *attr, ts);
            }
        }
        truth.targets.push_back(std::move(tt));
    }

    return {builder.build(), std::move(truth)};
}

std::string truth_to_json(const GroundTruth& truth) {
    using ordered_json = nlohmann::ordered_json;
    ordered_json doc;
    doc["format"] = "ndp-synth-truth";
    doc["version"] = 1;

    ordered_json planted = ordered_json::array();
    for (std::size_t c = 0; c < truth.planted.size(); ++c) {
        ordered_json m;
        m["cluster"] = c;
        m["rows"] = truth.planted[c].rows();
        m["entries"] = truth.planted[c].entries();
        planted.push_back(std::move(m));
    }
    doc["planted"] = std::move(planted);

    ordered_json targets = ordered_json::array();
    for (const auto& t : truth.targets) {
        ordered_json row;
        row["id"] = t.id;
        row["cluster"] = t.cluster;
        row["dist_history"] = t.dist_history;
        row["dist_current"] = t.dist_current;
        row["dist_future"] = t.dist_future;
        row["sampling_history"] = t.sampling_history;
        row["sampling_current"] = t.sampling_current;
        row["sampling_future"] = t.sampling_future;
        row["expected_ndv_history"] = t.expected_ndv_history.components();
        row["expected_ndv_current"] = t.expected_ndv_current.components();
        row["expected_ndv_future"] = t.expected_ndv_future.components();
        row["events"] = {{"history", t.events_history},
                         {"current", t.events_current},
                         {"future", t.events_future}};
        targets.push_back(std::move(row));
    }
    doc["targets"] = std::move(targets);
    return doc.dump(2) + "\n";
}

} // namespace ndp
