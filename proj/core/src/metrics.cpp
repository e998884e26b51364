#include "ndp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "json.hpp"

#include "ndp/errors.hpp"

namespace ndp {

double absolute_accuracy(const DistributionVector& predicted,
                         const DistributionVector& truth) {
    if (predicted.size() != truth.size())
        throw DimensionMismatch(
            "absolute_accuracy: predicted and truth dimensions differ");
    double d2 = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double diff = predicted[i] - truth[i];
        d2 += diff * diff;
    }
    const double eta = 1.0 - std::sqrt(d2) / std::numbers::sqrt2;
    return std::clamp(eta, 0.0, 1.0);
}

double prediction_difficulty(const DistributionVector& w) {
    if (w.size() < 2)
        throw ValidationError(
            "prediction_difficulty: needs at least 2 components (log-base-n "
            "entropy is undefined at n = 1)");
    double h = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] <= 0.0)
            throw ValidationError(
                "prediction_difficulty: zero component; difficulty is "
                "defined for smoothed (strictly positive) distributions");
        h -= w[i] * std::log(w[i]);
    }
    h /= std::log(static_cast<double>(w.size()));
    // The uniform vector attains the mathematical maximum h = 1; shave the
    // float roundoff above it so g never dips below 1/2.
    h = std::min(h, 1.0);
    return 1.0 - h / 2.0;
}

double virtual_accuracy(double eta, double g) {
    if (!(eta >= 0.0 && eta <= 1.0))
        throw ValidationError("virtual_accuracy: eta outside [0, 1]");
    if (!(g >= 0.5 && g < 1.0))
        throw ValidationError("virtual_accuracy: g outside [1/2, 1)");
    return eta * g;
}

PredictionScore score_prediction(std::string target_id,
                                 DistributionVector predicted,
                                 DistributionVector truth) {
    PredictionScore s;
    s.eta = absolute_accuracy(predicted, truth);
    s.pd = prediction_difficulty(truth);
    s.va = virtual_accuracy(s.eta, s.pd);
    s.target_id = std::move(target_id);
    s.predicted = std::move(predicted);
    s.truth = std::move(truth);
    return s;
}

namespace {

MethodSummary summarize(const std::vector<const PredictionScore*>& scores) {
    MethodSummary s;
    if (scores.empty()) {
        s.mean_eta = std::numeric_limits<double>::quiet_NaN();
        s.mean_va = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    for (const auto* p : scores) {
        s.mean_eta += p->eta;
        s.mean_va += p->va;
    }
    s.mean_eta /= static_cast<double>(scores.size());
    s.mean_va /= static_cast<double>(scores.size());
    return s;
}

std::string format_number(double v) {
    if (std::isnan(v))
        return "-";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

} // namespace

EvaluationReport pd_group_report(const MethodScores& by_method,
                                 int group_count) {
    if (by_method.empty())
        throw ValidationError("pd_group_report: no methods");
    if (group_count < 1)
        throw ValidationError("pd_group_report: group count must be >= 1");

    EvaluationReport report;
    std::map<std::string, std::map<std::string, const PredictionScore*>>
        indexed;
    for (const auto& [method, scores] : by_method) {
        if (indexed.contains(method))
            throw ValidationError("pd_group_report: duplicate method '" +
                                  method + "'");
        report.methods.push_back(method);
        auto& by_target = indexed[method];
        for (const auto& s : scores) {
            if (!by_target.emplace(s.target_id, &s).second)
                throw ValidationError("pd_group_report: method '" + method +
                                      "' scored target '" + s.target_id +
                                      "' twice");
        }
    }

    // Every method must have scored exactly the same targets, so the
    // difficulty ranking (computed on the shared truth) means one thing.
    const auto& reference = indexed.begin()->second;
    for (const auto& [method, by_target] : indexed) {
        if (by_target.size() != reference.size())
            throw ValidationError(
                "pd_group_report: methods scored different target sets");
        for (const auto& [target, score] : by_target)
            if (!reference.contains(target))
                throw ValidationError(
                    "pd_group_report: methods scored different target sets "
                    "(target '" +
                    target + "')");
    }

    struct Ranked {
        std::string target;
        double pd;
    };
    std::vector<Ranked> ranked;
    ranked.reserve(reference.size());
    for (const auto& [target, score] : reference)
        ranked.push_back({target, score->pd});
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.pd != b.pd)
            return a.pd > b.pd;
        return a.target < b.target;
    });

    for (const auto& [method, scores] : by_method) {
        std::vector<PredictionScore> sorted(scores.begin(), scores.end());
        std::sort(sorted.begin(), sorted.end(),
                  [](const auto& a, const auto& b) {
                      return a.target_id < b.target_id;
                  });
        std::vector<const PredictionScore*> all;
        for (const auto& s : sorted)
            all.push_back(&s);
        report.summary.emplace(method, summarize(all));
        report.scores.emplace(method, std::move(sorted));
    }

    const std::size_t total = ranked.size();
    const std::size_t base = total / static_cast<std::size_t>(group_count);
    const std::size_t remainder =
        total % static_cast<std::size_t>(group_count);
    std::size_t next = 0;
    for (int gi = 0; gi < group_count; ++gi) {
        PdGroup group;
        group.index = gi + 1;
        const std::size_t size =
            base + (static_cast<std::size_t>(gi) < remainder ? 1 : 0);
        for (std::size_t i = 0; i < size; ++i)
            group.targets.push_back(ranked[next++].target);
        for (const auto& [method, by_target] : indexed) {
            std::vector<const PredictionScore*> members;
            for (const auto& target : group.targets)
                members.push_back(by_target.at(target));
            group.per_method.emplace(method, summarize(members));
        }
        report.groups.push_back(std::move(group));
    }
    return report;
}

std::string report_to_json(const EvaluationReport& report,
                           const std::string& run_label) {
    using ordered_json = nlohmann::ordered_json;
    ordered_json doc;
    doc["format"] = "ndp-evaluation-report";
    doc["version"] = 1;
    doc["run"] = run_label;
    doc["methods"] = report.methods;
    doc["targets"] =
        report.scores.empty() ? 0 : report.scores.begin()->second.size();

    ordered_json per_method = ordered_json::object();
    for (const auto& method : report.methods) {
        ordered_json m;
        const auto& summary = report.summary.at(method);
        m["mean_eta"] = summary.mean_eta;
        m["mean_va"] = summary.mean_va;
        ordered_json scores = ordered_json::array();
        for (const auto& s : report.scores.at(method)) {
            ordered_json row;
            row["target"] = s.target_id;
            row["eta"] = s.eta;
            row["pd"] = s.pd;
            row["va"] = s.va;
            row["predicted"] = s.predicted.components();
            row["truth"] = s.truth.components();
            scores.push_back(std::move(row));
        }
        m["scores"] = std::move(scores);
        per_method[method] = std::move(m);
    }
    doc["per_method"] = std::move(per_method);

    ordered_json groups = ordered_json::array();
    for (const auto& group : report.groups) {
        ordered_json g;
        g["group"] = group.index;
        g["size"] = group.targets.size();
        g["targets"] = group.targets;
        ordered_json per = ordered_json::object();
        for (const auto& method : report.methods) {
            const auto& summary = group.per_method.at(method);
            per[method] = {{"mean_eta", summary.mean_eta},
                           {"mean_va", summary.mean_va}};
        }
        g["per_method"] = std::move(per);
        groups.push_back(std::move(g));
    }
    doc["pd_groups"] = std::move(groups);
    return doc.dump(2) + "\n";
}

std::string report_to_table(const EvaluationReport& report,
                            const std::string& run_label) {
    std::string out;
    auto pad = [](std::string s, std::size_t width) {
        if (s.size() < width)
            s.append(width - s.size(), ' ');
        return s;
    };
    std::size_t label_width = std::max<std::size_t>(run_label.size(), 5) + 2;
    std::size_t col = 11;
    for (const auto& method : report.methods)
        col = std::max(col, method.size() + std::string(":eta").size() + 2);

    auto method_header = [&]() {
        std::string line = pad("run", label_width);
        for (const auto& method : report.methods)
            line += pad(method, col);
        out += line + "\n";
    };

    out += "Virtual accuracy (mean)\n";
    method_header();
    out += pad(run_label, label_width);
    for (const auto& method : report.methods)
        out += pad(format_number(report.summary.at(method).mean_va), col);
    out += "\n\nAbsolute accuracy (mean)\n";
    method_header();
    out += pad(run_label, label_width);
    for (const auto& method : report.methods)
        out += pad(format_number(report.summary.at(method).mean_eta), col);
    out += "\n";

    if (!report.groups.empty()) {
        out += "\nDifficulty groups (group 1 = highest PD)\n";
        std::string header = pad("group", 7) + pad("size", 6);
        for (const auto& method : report.methods) {
            header += pad(method + ":eta", col);
            header += pad(method + ":va", col);
        }
        out += header + "\n";
        for (const auto& group : report.groups) {
            std::string line = pad(std::to_string(group.index), 7) +
                               pad(std::to_string(group.targets.size()), 6);
            for (const auto& method : report.methods) {
                const auto& summary = group.per_method.at(method);
                line += pad(format_number(summary.mean_eta), col);
                line += pad(format_number(summary.mean_va), col);
            }
            out += line + "\n";
        }
    }
    return out;
}

} // namespace ndp
