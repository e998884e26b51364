#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "ndp/distribution.hpp"
#include "ndp/efm.hpp"
#include "ndp/errors.hpp"
#include "ndp/graph.hpp"
#include "ndp/rng.hpp"
#include "oracles.hpp"

using ndp::EfmModel;
using ndp::Matrix;
using ndp::TimeWindow;

namespace {

constexpr TimeWindow kHistory{0, 10};
constexpr TimeWindow kCurrent{10, 20};

struct TargetCounts {
    std::string id;
    std::array<int, 3> history;
    std::array<int, 3> current;
    std::array<int, 3> earlier{0, 0, 0}; // events in [-10, 0), for backshifts
};

// Star graph over three single-label attributes; each target gets the given
// number of link events per attribute inside each window.
ndp::TemporalStarGraph counts_graph(const std::vector<TargetCounts>& specs) {
    ndp::GraphBuilder b("topic");
    b.add_attribute("pa", {"la"});
    b.add_attribute("pb", {"lb"});
    b.add_attribute("pc", {"lc"});
    const std::array<std::string, 3> attrs{"pa", "pb", "pc"};
    for (const auto& spec : specs) {
        for (std::size_t j = 0; j < 3; ++j) {
            for (int r = 0; r < spec.earlier[j]; ++r)
                b.add_event(spec.id, attrs[j], -5);
            for (int r = 0; r < spec.history[j]; ++r)
                b.add_event(spec.id, attrs[j], 5);
            for (int r = 0; r < spec.current[j]; ++r)
                b.add_event(spec.id, attrs[j], 15);
        }
    }
    return b.build();
}

// Four targets whose NDVs span the full space; history repeats in the
// current window, so the true evolution map is the identity.
std::vector<TargetCounts> stationary_specs() {
    return {{"t0", {6, 1, 0}, {6, 1, 0}},
            {"t1", {0, 6, 1}, {0, 6, 1}},
            {"t2", {1, 0, 6}, {1, 0, 6}},
            {"t3", {4, 2, 1}, {4, 2, 1}}};
}

// Current counts are the history counts cycled one slot forward, so the
// true evolution map is the cyclic shift sending component j to j+1.
std::vector<TargetCounts> cyclic_specs() {
    return {{"t0", {6, 1, 0}, {0, 6, 1}},
            {"t1", {0, 6, 1}, {1, 0, 6}},
            {"t2", {1, 0, 6}, {6, 1, 0}},
            {"t3", {4, 2, 1}, {1, 4, 2}},
            {"t4", {2, 4, 1}, {1, 2, 4}}};
}

Matrix cyclic_shift3() {
    return Matrix(3, 3, {0, 0, 1, 1, 0, 0, 0, 1, 0});
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.entries().size(); ++i)
        worst = std::max(worst,
                         std::fabs(a.entries()[i] - b.entries()[i]));
    return worst;
}

double frobenius_diff(const Matrix& a, const Matrix& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.entries().size(); ++i) {
        const double d = a.entries()[i] - b.entries()[i];
        s += d * d;
    }
    return std::sqrt(s);
}

EfmModel manual_model(const ndp::TemporalStarGraph& g, Matrix entries) {
    EfmModel m;
    m.catalog = g.catalog();
    m.history = kHistory;
    m.current = kCurrent;
    m.k = 1;
    m.clusters.k = 1;
    m.clusters.centroids = {{1.0 / 3, 1.0 / 3, 1.0 / 3}};
    for (const auto& id : g.target_ids())
        m.clusters.assignments[id] = 0;
    ndp::EvolutionMatrix em;
    em.entries = std::move(entries);
    em.source_cluster = g.target_ids();
    m.matrices[0] = std::move(em);
    return m;
}

} // namespace

TEST_CASE("training samples pair history and current NDVs by target") {
    const auto g = counts_graph(cyclic_specs());
    const auto samples = make_training_samples(g, kHistory, kCurrent);
    REQUIRE(samples.size() == 5);
    CHECK(samples.front().target_id == "t0");
    CHECK(samples.back().target_id == "t4");
    // t0's history counts (6,1,0) over 7 events smooth to exactly
    // (0.7, 0.2, 0.1); the current counts are those cycled forward.
    CHECK(samples[0].x_row.components() ==
          std::vector<double>{0.7, 0.2, 0.1});
    CHECK(samples[0].y_row.components() ==
          std::vector<double>{0.1, 0.7, 0.2});
}

TEST_CASE("stationary data trains an identity evolution matrix") {
    const auto g = counts_graph(stationary_specs());
    const auto model = train(g, kHistory, kCurrent, 1, 7);
    REQUIRE(model.matrices.size() == 1);
    const auto& L = model.matrices.at(0).entries;
    CHECK(model.matrices.at(0).ridge_used == 0.0);
    CHECK(max_abs_diff(L, Matrix::identity(3)) <= 1e-9);

    // The fit reproduces every training pair.
    for (const auto& s : make_training_samples(g, kHistory, kCurrent)) {
        const auto yhat = ndp::matvec(L, s.x_row.components());
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(std::fabs(yhat[i] - s.y_row[i]) <= 1e-6);
    }
}

TEST_CASE("cyclic dynamics are recovered in column orientation") {
    const auto g = counts_graph(cyclic_specs());
    const auto model = train(g, kHistory, kCurrent, 1, 7);
    const auto& L = model.matrices.at(0).entries;
    const auto shift = cyclic_shift3();

    CHECK(max_abs_diff(L, shift) <= 1e-9);
    // The learned map must be the shift itself, not its transpose: the
    // stored matrix multiplies column NDVs.
    CHECK(frobenius_diff(L, shift) < frobenius_diff(L, transpose(shift)));
}

TEST_CASE("trained coefficients are a least-squares optimum") {
    // An extra inconsistent target keeps the residual strictly positive, so
    // optimality is a real constraint rather than exact interpolation.
    auto specs = cyclic_specs();
    specs.push_back({"t5", {3, 3, 1}, {3, 3, 1}});
    const auto g = counts_graph(specs);
    const auto model = train(g, kHistory, kCurrent, 1, 7);
    const auto samples = make_training_samples(g, kHistory, kCurrent);
    const auto& L = model.matrices.at(0).entries;

    auto sse = [&](const Matrix& m) {
        double total = 0.0;
        for (const auto& s : samples) {
            const auto yhat = ndp::matvec(m, s.x_row.components());
            for (std::size_t i = 0; i < 3; ++i) {
                const double d = yhat[i] - s.y_row[i];
                total += d * d;
            }
        }
        return total;
    };

    const double best = sse(L);
    CHECK(best > 1e-6); // genuinely inconsistent system
    ndp::Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        Matrix perturbed = L;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                perturbed(i, j) += (rng.uniform01() - 0.5) * 2e-3;
        CHECK(sse(perturbed) >= best - 1e-15);
    }
}

TEST_CASE("a single sample falls back to the ridge solve") {
    const auto g = counts_graph({{"solo", {6, 1, 0}, {0, 6, 1}}});
    const auto model = train(g, kHistory, kCurrent, 1, 3);
    CHECK(model.matrices.at(0).ridge_used == 1e-8);
    CHECK(model.matrices.at(0).entries.all_finite());

    // With the fallback disabled the singularity propagates.
    CHECK_THROWS_AS(train(g, kHistory, kCurrent, 1, 3, 0.0),
                    ndp::SingularMatrix);
}

TEST_CASE("predict with a hand-built identity matrix returns the input") {
    // Seven events, all inside the history window, so the combined-window
    // NDV is exactly (0.7, 0.2, 0.1).
    const auto g = counts_graph({{"t0", {6, 1, 0}, {0, 0, 0}},
                                 {"pad", {1, 1, 1}, {1, 1, 1}}});
    const auto model = manual_model(g, Matrix::identity(3));

    const auto combined = ndv_for(g, "t0", model.combined_history());
    CHECK(combined.components() == std::vector<double>{0.7, 0.2, 0.1});

    const auto p = predict(model, g, "t0");
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(p[i] == doctest::Approx(combined[i]).epsilon(1e-12));
}

TEST_CASE("predict with a hand-built cyclic matrix shifts components") {
    const auto g = counts_graph({{"t0", {6, 1, 0}, {0, 0, 0}},
                                 {"pad", {1, 1, 1}, {1, 1, 1}}});
    const auto model = manual_model(g, cyclic_shift3());
    const auto p = predict(model, g, "t0");
    CHECK(p[0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(p[2] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("predict_raw is exactly the matrix-vector product") {
    const auto g = counts_graph(cyclic_specs());
    const auto model = train(g, kHistory, kCurrent, 2, 5);
    for (const auto& id : g.target_ids()) {
        const int cluster = assigned_cluster(model, g, id);
        const auto w = ndv_for(g, id, model.combined_history());
        const auto expected = oracles::naive_matvec(
            model.matrices.at(cluster).entries, w.components());
        CHECK(predict_raw(model, g, id) == expected);
    }
}

TEST_CASE("predictions live on the simplex") {
    const auto g = counts_graph(cyclic_specs());
    for (int k : {1, 2, 3}) {
        const auto model = train(g, kHistory, kCurrent, k, 11);
        for (const auto& id : g.target_ids()) {
            const auto p = predict(model, g, id);
            double sum = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                CHECK(p[i] >= 0.0);
                sum += p[i];
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("unclustered targets are routed to the nearest centroid") {
    // Two NDV clusters plus a onlooker active only in the current window.
    const auto g = counts_graph({{"a0", {9, 0, 0}, {9, 0, 0}},
                                 {"a1", {8, 1, 0}, {8, 1, 0}},
                                 {"b0", {0, 0, 9}, {0, 0, 9}},
                                 {"b1", {0, 1, 8}, {0, 1, 8}},
                                 {"newbie", {0, 0, 0}, {0, 0, 5}}});
    const auto model = train(g, kHistory, kCurrent, 2, 1);
    CHECK(model.clusters.assignments.count("newbie") == 0);
    CHECK(assigned_cluster(model, g, "newbie") ==
          model.clusters.cluster_for("b0"));
    CHECK(assigned_cluster(model, g, "a1") ==
          model.clusters.cluster_for("a1"));
    CHECK_NOTHROW(predict(model, g, "newbie"));
}

TEST_CASE("training validates windows, activity, and k") {
    const auto g = counts_graph(stationary_specs());
    CHECK_THROWS_AS(train(g, {0, 9}, kCurrent, 1, 0), ndp::ValidationError);
    CHECK_THROWS_AS(train(g, kHistory, kCurrent, 5, 0),
                    ndp::ValidationError);
    CHECK_THROWS_AS(train(g, {100, 110}, {110, 120}, 1, 0),
                    ndp::ValidationError);
    CHECK_THROWS_AS(train(g, kHistory, {10, 10}, 1, 0),
                    ndp::ValidationError);
}

TEST_CASE("prediction requires a compatible graph") {
    const auto g = counts_graph(stationary_specs());
    const auto model = train(g, kHistory, kCurrent, 1, 0);

    ndp::GraphBuilder other("topic");
    other.add_attribute("x", {"la"});
    other.add_attribute("y", {"lz"});
    other.add_event("t0", "x", 15);
    const auto g2 = other.build();
    CHECK_THROWS_AS(predict(model, g2, "t0"), ndp::ValidationError);

    EfmModel untrained;
    CHECK_THROWS_AS(predict(untrained, g, "t0"), ndp::ValidationError);
}

TEST_CASE("leave-one-out refit matches a direct solve without the row") {
    const auto g = counts_graph(cyclic_specs());
    const auto model = train(g, kHistory, kCurrent, 1, 7);
    const auto samples = make_training_samples(g, kHistory, kCurrent);

    for (const auto& held_out : samples) {
        const auto loo = leave_one_out_matrix(model, samples, held_out.target_id);

        const std::size_t m = samples.size() - 1;
        Matrix x(m, 3), y(m, 3);
        std::size_t r = 0;
        for (const auto& s : samples) {
            if (s.target_id == held_out.target_id)
                continue;
            for (std::size_t j = 0; j < 3; ++j) {
                x(r, j) = s.x_row[j];
                y(r, j) = s.y_row[j];
            }
            ++r;
        }
        const auto direct =
            transpose(ndp::normal_equations_solve(x, y, 0.0));
        CHECK(loo.entries() == direct.entries());
    }
}

TEST_CASE("leave-one-out falls back to the pooled fit for singletons") {
    // b sits alone in its cluster; removing it empties the cluster, so the
    // refit must pool every remaining sample.
    const auto g = counts_graph({{"a0", {9, 0, 0}, {9, 0, 0}},
                                 {"a1", {8, 1, 0}, {8, 1, 0}},
                                 {"a2", {7, 1, 1}, {7, 1, 1}},
                                 {"b", {0, 0, 9}, {0, 0, 9}}});
    const auto model = train(g, kHistory, kCurrent, 2, 1);
    const auto samples = make_training_samples(g, kHistory, kCurrent);
    REQUIRE(cluster_of(model.clusters, "b") ==
            std::vector<std::string>{"b"});

    const auto loo = leave_one_out_matrix(model, samples, "b");
    Matrix x(3, 3), y(3, 3);
    std::size_t r = 0;
    for (const auto& s : samples) {
        if (s.target_id == "b")
            continue;
        for (std::size_t j = 0; j < 3; ++j) {
            x(r, j) = s.x_row[j];
            y(r, j) = s.y_row[j];
        }
        ++r;
    }
    const auto direct = transpose(ndp::normal_equations_solve(x, y, 0.0));
    CHECK(loo.entries() == direct.entries());
}

TEST_CASE("select_k sweeps candidates on backshifted windows") {
    // Periodic targets active in [-10,0), [0,10), and [10,20).
    std::vector<TargetCounts> specs;
    const std::array<std::array<int, 3>, 6> patterns{{{6, 1, 0},
                                                      {0, 6, 1},
                                                      {1, 0, 6},
                                                      {4, 2, 1},
                                                      {2, 4, 1},
                                                      {1, 2, 4}}};
    for (std::size_t i = 0; i < patterns.size(); ++i)
        specs.push_back({"t" + std::to_string(i), patterns[i], patterns[i],
                         patterns[i]});
    const auto g = counts_graph(specs);

    SUBCASE("single candidate") {
        const auto sel = select_k(g, kHistory, kCurrent,
                                  std::array<int, 1>{3}, 6, 42);
        CHECK(sel.chosen_k == 3);
        REQUIRE(sel.rows.size() == 1);
        CHECK(sel.rows[0].feasible);
        CHECK(sel.rows[0].mean_eta > 0.5);
        CHECK(sel.sampled_targets.size() == 6);
    }

    SUBCASE("infeasible candidates stay in the table but never win") {
        const auto sel = select_k(g, kHistory, kCurrent,
                                  std::array<int, 2>{1, 100}, 4, 42);
        CHECK(sel.chosen_k == 1);
        REQUIRE(sel.rows.size() == 2);
        CHECK(sel.rows[0].feasible);
        CHECK(!sel.rows[1].feasible);
        CHECK(std::isnan(sel.rows[1].mean_eta));
    }

    SUBCASE("equal-scoring duplicate candidates resolve deterministically") {
        const auto sel = select_k(g, kHistory, kCurrent,
                                  std::array<int, 2>{2, 2}, 5, 42);
        CHECK(sel.chosen_k == 2);
        CHECK(sel.rows[0].mean_eta == sel.rows[1].mean_eta);
    }

    SUBCASE("sweeps are deterministic") {
        const auto a = select_k(g, kHistory, kCurrent,
                                std::array<int, 3>{1, 2, 3}, 5, 9);
        const auto b = select_k(g, kHistory, kCurrent,
                                std::array<int, 3>{1, 2, 3}, 5, 9);
        CHECK(a.chosen_k == b.chosen_k);
        CHECK(a.sampled_targets == b.sampled_targets);
        REQUIRE(a.rows.size() == b.rows.size());
        for (std::size_t i = 0; i < a.rows.size(); ++i)
            CHECK(a.rows[i].mean_eta == b.rows[i].mean_eta);
    }

    SUBCASE("validation") {
        CHECK_THROWS_AS(select_k(g, kHistory, kCurrent, std::array<int, 0>{},
                                 3, 0),
                        ndp::ValidationError);
        CHECK_THROWS_AS(select_k(g, kHistory, kCurrent,
                                 std::array<int, 1>{0}, 3, 0),
                        ndp::ValidationError);
        CHECK_THROWS_AS(select_k(g, kHistory, kCurrent,
                                 std::array<int, 1>{1}, 0, 0),
                        ndp::ValidationError);
        CHECK_THROWS_AS(select_k(g, kHistory, kCurrent,
                                 std::array<int, 1>{1}, 7, 0),
                        ndp::ValidationError);
        CHECK_THROWS_AS(select_k(g, kHistory, kCurrent,
                                 std::array<int, 2>{50, 70}, 3, 0),
                        ndp::ValidationError);
    }
}

TEST_CASE("models round-trip through JSON unchanged") {
    const auto g = counts_graph(cyclic_specs());
    const auto model = train(g, kHistory, kCurrent, 2, 31, 1e-8,
                             ndp::NeighborSemantics::kUniqueAttributes);

    std::ostringstream first;
    save_model(model, first);

    std::istringstream in(first.str());
    const auto loaded = ndp::load_model(in);

    CHECK(loaded.catalog.labels == model.catalog.labels);
    CHECK(loaded.catalog.attribute_type == model.catalog.attribute_type);
    CHECK(loaded.history.start == model.history.start);
    CHECK(loaded.current.end == model.current.end);
    CHECK(loaded.k == model.k);
    CHECK(loaded.seed == model.seed);
    CHECK(loaded.ridge_fallback == model.ridge_fallback);
    CHECK(loaded.semantics == model.semantics);
    CHECK(loaded.clusters.assignments == model.clusters.assignments);
    CHECK(loaded.clusters.centroids == model.clusters.centroids);
    CHECK(loaded.clusters.objective_trace == model.clusters.objective_trace);
    REQUIRE(loaded.matrices.size() == model.matrices.size());
    for (const auto& [cluster, em] : model.matrices) {
        const auto& lm = loaded.matrices.at(cluster);
        CHECK(lm.entries.entries() == em.entries.entries()); // bit-exact
        CHECK(lm.source_cluster == em.source_cluster);
        CHECK(lm.ridge_used == em.ridge_used);
    }

    // Loaded models predict identically and re-save byte-identically.
    for (const auto& id : g.target_ids())
        CHECK(predict(loaded, g, id).components() ==
              predict(model, g, id).components());
    std::ostringstream second;
    save_model(loaded, second);
    CHECK(second.str() == first.str());
}

TEST_CASE("load_model rejects foreign documents") {
    std::istringstream garbage("not json at all");
    CHECK_THROWS_AS(ndp::load_model(garbage), ndp::ValidationError);

    std::istringstream wrong_format(R"({"format":"something-else"})");
    CHECK_THROWS_AS(ndp::load_model(wrong_format), ndp::ValidationError);

    std::istringstream truncated(R"({"format":"ndp-efm-model","version":1})");
    CHECK_THROWS_AS(ndp::load_model(truncated), ndp::ValidationError);
}
