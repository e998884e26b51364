#include "ndp/graph.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_set>

#include "ndp/errors.hpp"

namespace ndp {

std::optional<std::uint32_t> LabelCatalog::index_of(
    const std::string& name) const {
    const auto it = std::lower_bound(labels.begin(), labels.end(), name);
    if (it == labels.end() || *it != name)
        return std::nullopt;
    return static_cast<std::uint32_t>(it - labels.begin());
}

void validate_window(const TimeWindow& w, const char* what) {
    if (w.start >= w.end)
        throw ValidationError(std::string(what) +
                              ": window start must precede end");
}

void validate_window_triple(const WindowTriple& w) {
    validate_window(w.history, "history");
    validate_window(w.current, "current");
    validate_window(w.future, "future");
    if (w.history.end != w.current.start)
        throw ValidationError(
            "history and current windows must be adjacent "
            "(history.end == current.start)");
    if (w.future.start < w.current.end)
        throw ValidationError("future window must start at or after the "
                              "current window ends");
}

std::optional<std::uint32_t> TemporalStarGraph::attribute_index(
    const std::string& id) const {
    const auto it = attribute_index_.find(id);
    if (it == attribute_index_.end())
        return std::nullopt;
    return it->second;
}

std::vector<const AttributeNode*> TemporalStarGraph::neighbors_in_window(
    const std::string& target, const TimeWindow& w,
    NeighborSemantics semantics) const {
    validate_window(w, "neighbors_in_window");
    std::vector<const AttributeNode*> out;
    const auto it = events_by_target_.find(target);
    if (it == events_by_target_.end())
        return out;

    const auto& events = it->second;
    const auto lo = std::lower_bound(
        events.begin(), events.end(), w.start,
        [](const Event& e, std::int64_t t) { return e.timestamp < t; });
    const auto hi = std::lower_bound(
        lo, events.end(), w.end,
        [](const Event& e, std::int64_t t) { return e.timestamp < t; });

    if (semantics == NeighborSemantics::kMultiset) {
        for (auto e = lo; e != hi; ++e)
            out.push_back(&attributes_[e->attribute]);
    } else {
        std::unordered_set<std::uint32_t> seen;
        for (auto e = lo; e != hi; ++e)
            if (seen.insert(e->attribute).second)
                out.push_back(&attributes_[e->attribute]);
    }
    return out;
}

bool TemporalStarGraph::target_active_in(const std::string& target,
                                         const TimeWindow& w) const {
    validate_window(w, "target_active_in");
    const auto it = events_by_target_.find(target);
    if (it == events_by_target_.end())
        return false;
    const auto& events = it->second;
    const auto lo = std::lower_bound(
        events.begin(), events.end(), w.start,
        [](const Event& e, std::int64_t t) { return e.timestamp < t; });
    return lo != events.end() && lo->timestamp < w.end;
}

std::vector<std::string> TemporalStarGraph::targets_active_in_all(
    std::span<const TimeWindow> windows) const {
    if (windows.empty())
        throw ValidationError(
            "targets_active_in_all: at least one window required");
    std::vector<std::string> out;
    for (const auto& target : targets_) {
        bool active = true;
        for (const auto& w : windows)
            if (!target_active_in(target, w)) {
                active = false;
                break;
            }
        if (active)
            out.push_back(target);
    }
    return out;
}

void TemporalStarGraph::write_events_file(std::ostream& out) const {
    out << "target_id,attribute_id,timestamp\n";
    // Restore ingestion order across targets via the sequence numbers.
    std::vector<std::tuple<std::uint64_t, const std::string*, const Event*>>
        rows;
    rows.reserve(num_events_);
    for (const auto& [target, events] : events_by_target_)
        for (const auto& e : events)
            rows.emplace_back(e.sequence, &target, &e);
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) {
                  return std::get<0>(a) < std::get<0>(b);
              });
    for (const auto& [seq, target, event] : rows)
        out << *target << ',' << attributes_[event->attribute].id << ','
            << event->timestamp << '\n';
}

void TemporalStarGraph::write_labels_file(std::ostream& out) const {
    out << "attribute_id,labels\n";
    for (const auto& node : attributes_) {
        out << node.id << ',';
        for (std::size_t i = 0; i < node.label_ids.size(); ++i) {
            if (i > 0)
                out << ';';
            out << catalog_.labels[node.label_ids[i]];
        }
        out << '\n';
    }
}

GraphBuilder::GraphBuilder(std::string attribute_type)
    : attribute_type_(std::move(attribute_type)) {}

void GraphBuilder::add_attribute(const std::string& id,
                                 const std::vector<std::string>& labels) {
    if (catalog_frozen_)
        throw ValidationError(
            "add_attribute: catalog already frozen by events");
    if (id.empty())
        throw ValidationError("add_attribute: empty attribute id");
    if (labels.empty())
        throw ValidationError("attribute '" + id + "' has an empty label set");
    std::set<std::string> unique(labels.begin(), labels.end());
    if (unique.size() != labels.size())
        throw ValidationError("attribute '" + id +
                              "' repeats a label name in its label set");
    for (const auto& existing : raw_nodes_)
        if (existing.first == id)
            throw ValidationError("duplicate attribute id '" + id + "'");
    raw_nodes_.emplace_back(id, labels);
}

void GraphBuilder::freeze_catalog() {
    if (catalog_frozen_)
        return;
    std::set<std::string> names;
    for (const auto& [id, labels] : raw_nodes_)
        names.insert(labels.begin(), labels.end());

    graph_.catalog_.attribute_type = attribute_type_;
    graph_.catalog_.labels.assign(names.begin(), names.end());

    graph_.attributes_.reserve(raw_nodes_.size());
    for (const auto& [id, labels] : raw_nodes_) {
        AttributeNode node;
        node.id = id;
        for (const auto& name : labels)
            node.label_ids.push_back(*graph_.catalog_.index_of(name));
        std::sort(node.label_ids.begin(), node.label_ids.end());
        graph_.attribute_index_.emplace(
            id, static_cast<std::uint32_t>(graph_.attributes_.size()));
        graph_.attributes_.push_back(std::move(node));
    }
    catalog_frozen_ = true;
}

void GraphBuilder::add_event(const std::string& target_id,
                             const std::string& attribute_id,
                             std::int64_t timestamp) {
    freeze_catalog();
    if (target_id.empty())
        throw ValidationError("add_event: empty target id");
    const auto attr = graph_.attribute_index(attribute_id);
    if (!attr)
        throw ValidationError("unknown attribute '" + attribute_id + "'");
    graph_.events_by_target_[target_id].push_back(
        {timestamp, *attr, next_sequence_++});
    ++graph_.num_events_;
}

TemporalStarGraph GraphBuilder::build() {
    freeze_catalog();
    if (graph_.catalog_.size() < 2)
        throw ValidationError(
            "label catalog needs at least 2 label types, found " +
            std::to_string(graph_.catalog_.size()));

    graph_.targets_.reserve(graph_.events_by_target_.size());
    for (auto& [target, events] : graph_.events_by_target_) {
        graph_.targets_.push_back(target);
        std::sort(events.begin(), events.end(),
                  [](const TemporalStarGraph::Event& a,
                     const TemporalStarGraph::Event& b) {
                      return a.timestamp != b.timestamp
                                 ? a.timestamp < b.timestamp
                                 : a.sequence < b.sequence;
                  });
    }
    std::sort(graph_.targets_.begin(), graph_.targets_.end());
    return std::move(graph_);
}

namespace {

// Strips a trailing carriage return so CRLF input parses cleanly.
void chomp(std::string& line) {
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t begin = 0;
    for (;;) {
        const std::size_t pos = s.find(sep, begin);
        if (pos == std::string::npos) {
            parts.push_back(s.substr(begin));
            return parts;
        }
        parts.push_back(s.substr(begin, pos - begin));
        begin = pos + 1;
    }
}

std::string where(const std::string& file, std::size_t line) {
    return file + ":" + std::to_string(line) + ": ";
}

} // namespace

TemporalStarGraph ingest(const IngestSources& sources) {
    if (sources.events == nullptr || sources.labels == nullptr)
        throw ValidationError("ingest: missing input stream");

    GraphBuilder builder(sources.attribute_type);

    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(*sources.labels, line)) {
        ++line_no;
        chomp(line);
        if (!saw_header) { // header line is required and skipped
            saw_header = true;
            continue;
        }
        if (line.empty())
            continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw ValidationError(where(sources.labels_name, line_no) +
                                  "expected 'attribute_id,label;label;...'");
        const std::string id = line.substr(0, comma);
        std::vector<std::string> labels =
            split(line.substr(comma + 1), ';');
        labels.erase(std::remove(labels.begin(), labels.end(), ""),
                     labels.end());
        try {
            builder.add_attribute(id, labels);
        } catch (const ValidationError& e) {
            throw ValidationError(where(sources.labels_name, line_no) +
                                  e.what());
        }
    }
    if (!saw_header)
        throw ValidationError(sources.labels_name +
                              ": missing required header line");

    line_no = 0;
    saw_header = false;
    while (std::getline(*sources.events, line)) {
        ++line_no;
        chomp(line);
        if (!saw_header) {
            saw_header = true;
            continue;
        }
        if (line.empty())
            continue;
        const auto fields = split(line, ',');
        if (fields.size() != 3)
            throw ValidationError(
                where(sources.events_name, line_no) +
                "expected 'target_id,attribute_id,timestamp'");
        std::int64_t timestamp = 0;
        const auto& ts = fields[2];
        const auto [ptr, ec] =
            std::from_chars(ts.data(), ts.data() + ts.size(), timestamp);
        if (ec != std::errc() || ptr != ts.data() + ts.size())
            throw ValidationError(where(sources.events_name, line_no) +
                                  "malformed timestamp '" + ts + "'");
        try {
            builder.add_event(fields[0], fields[1], timestamp);
        } catch (const ValidationError& e) {
            throw ValidationError(where(sources.events_name, line_no) +
                                  e.what());
        }
    }
    if (!saw_header)
        throw ValidationError(sources.events_name +
                              ": missing required header line");

    return builder.build();
}

} // namespace ndp
