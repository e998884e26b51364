#ifndef NDP_GRAPH_HPP
#define NDP_GRAPH_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ndp {

/// Ordered universe of label names for one attribute node type. The
/// ordering is fixed when the catalog is built (lexicographic over names)
/// and defines vector component indices for the whole run.
struct LabelCatalog {
    std::string attribute_type;
    std::vector<std::string> labels; // sorted, unique, size >= 2

    std::size_t size() const { return labels.size(); }
    std::optional<std::uint32_t> index_of(const std::string& name) const;
};

/// Peripheral node carrying one or more labels (a paper's subject areas, a
/// movie's genres, a venue's categories).
struct AttributeNode {
    std::string id;
    std::vector<std::uint32_t> label_ids; // nonempty, each < catalog size
};

/// Half-open interval of integer timestamps: start inclusive, end exclusive.
struct TimeWindow {
    std::int64_t start = 0;
    std::int64_t end = 0;

    bool contains(std::int64_t t) const { return t >= start && t < end; }
    std::int64_t length() const { return end - start; }
};

/// Throws ValidationError unless start < end.
void validate_window(const TimeWindow& w, const char* what);

/// The historical / current / future windows of a run. history and current
/// must be adjacent (history.end == current.start) because predictions read
/// the combined history as the single window [history.start, current.end);
/// future starts at or after current.end.
struct WindowTriple {
    TimeWindow history;
    TimeWindow current;
    TimeWindow future;

    TimeWindow combined_history() const {
        return {history.start, current.end};
    }
};

void validate_window_triple(const WindowTriple& w);

/// How repeated links to the same attribute inside one window are counted.
/// `kMultiset` counts every link event as one neighbor occurrence (a movie
/// rented twice weighs twice); `kUniqueAttributes` collapses repeats.
enum class NeighborSemantics { kMultiset, kUniqueAttributes };

/// Time-stamped link from a target node to an attribute node.
struct LinkEvent {
    std::string target_id;
    std::string attribute_id;
    std::int64_t timestamp = 0;
};

/// Immutable star-schema network: link events between target nodes and
/// labeled attribute nodes, queryable by (target, time window). All queries
/// are read-only and safe to call concurrently.
class TemporalStarGraph {
public:
    const LabelCatalog& catalog() const { return catalog_; }

    std::size_t num_events() const { return num_events_; }
    std::size_t num_targets() const { return targets_.size(); }
    std::size_t num_attributes() const { return attributes_.size(); }

    const AttributeNode& attribute(std::uint32_t index) const {
        return attributes_[index];
    }
    std::optional<std::uint32_t> attribute_index(const std::string& id) const;

    /// All target ids, sorted lexicographically.
    const std::vector<std::string>& target_ids() const { return targets_; }

    /// Neighbor occurrences of `target` whose event timestamp falls in `w`.
    /// One entry per link event under multiset semantics; deduplicated per
    /// attribute under unique semantics. Unknown targets yield an empty
    /// result. Pointers remain valid for the lifetime of the graph.
    std::vector<const AttributeNode*> neighbors_in_window(
        const std::string& target, const TimeWindow& w,
        NeighborSemantics semantics = NeighborSemantics::kMultiset) const;

    bool target_active_in(const std::string& target,
                          const TimeWindow& w) const;

    /// Targets having at least one event in every listed window.
    /// Sorted lexicographically. Requires at least one window.
    std::vector<std::string> targets_active_in_all(
        std::span<const TimeWindow> windows) const;

    /// Re-emit the graph in the standard events / labels file formats.
    /// Events come out in ingestion order, so ingest(write(g)) == g.
    void write_events_file(std::ostream& out) const;
    void write_labels_file(std::ostream& out) const;

private:
    friend class GraphBuilder;

    struct Event {
        std::int64_t timestamp;
        std::uint32_t attribute;
        std::uint64_t sequence; // ingestion order, for stable re-emission
    };

    LabelCatalog catalog_;
    std::vector<AttributeNode> attributes_;
    std::unordered_map<std::string, std::uint32_t> attribute_index_;
    std::vector<std::string> targets_;
    // Per-target events sorted by (timestamp, sequence); window queries
    // binary-search the timestamp range.
    std::unordered_map<std::string, std::vector<Event>> events_by_target_;
    std::size_t num_events_ = 0;
};

/// Single-threaded construction of a TemporalStarGraph. Labels must all be
/// registered before the catalog is frozen by the first add_event call.
class GraphBuilder {
public:
    explicit GraphBuilder(std::string attribute_type);

    /// Registers an attribute node with its label names. Throws on a
    /// duplicate attribute id, an empty label set, or a label repeated
    /// within the set.
    void add_attribute(const std::string& id,
                       const std::vector<std::string>& labels);

    /// Adds one link event. Throws if the attribute id is unknown.
    void add_event(const std::string& target_id,
                   const std::string& attribute_id, std::int64_t timestamp);

    /// Validates the catalog (>= 2 label types) and finishes the graph.
    TemporalStarGraph build();

private:
    void freeze_catalog();

    std::string attribute_type_;
    bool catalog_frozen_ = false;
    std::vector<std::pair<std::string, std::vector<std::string>>> raw_nodes_;
    TemporalStarGraph graph_;
    std::uint64_t next_sequence_ = 0;
};

struct IngestSources {
    std::istream* events;
    std::istream* labels;
    std::string events_name = "events"; // used in diagnostics
    std::string labels_name = "labels";
    std::string attribute_type = "attribute";
};

/// Parses the labels and events files (header line required in both,
/// records `attribute_id,label1;label2;...` and
/// `target_id,attribute_id,timestamp`) into a validated graph.
/// Ingestion is deterministic: identical sources produce an identical
/// graph, including label ordering and event order.
TemporalStarGraph ingest(const IngestSources& sources);

} // namespace ndp

#endif
