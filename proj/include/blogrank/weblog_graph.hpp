#pragma once

#include "blogrank/ingest.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace blogrank {

using NodeId = std::uint32_t;

struct WeblogNode {
    std::string id;
    std::size_t post_count = 0;
    std::set<std::string> authors;  // case-folded usernames
    std::set<std::string> tags;
    std::set<std::string> news;     // normalized news URLs
    std::size_t out_degree = 0;
};

/// Evidence for one directed weblog pair.
struct EdgeBundle {
    NodeId src = 0;
    NodeId dst = 0;
    std::uint32_t links = 0;           // post-level hyperlinks src → dst
    std::uint32_t shared_tags = 0;
    std::uint32_t shared_authors = 0;
    std::uint32_t shared_news = 0;     // coupling: news URLs both weblogs cite

    bool is_hyperlink() const { return links > 0; }
    friend bool operator==(const EdgeBundle&, const EdgeBundle&) = default;
};

struct GraphConfig {
    std::uint32_t min_shared_tags = 3;
    std::uint32_t min_shared_authors = 2;
    std::uint32_t min_coupling = 2;
    /// Tags used by fewer weblogs than this are ignored.
    std::size_t tag_df_min = 1;
    /// Tags used by more than this fraction of weblogs are ignored; 1.0 disables.
    double tag_df_max_fraction = 1.0;
    std::set<std::string> author_stoplist = default_author_stoplist();

    static std::set<std::string> default_author_stoplist();
    /// Adds case-folded names from a one-per-line file.
    void load_stoplist(const std::string& path);
    /// Throws InvalidArgument on thresholds below 1 or a fraction outside (0,1].
    void validate() const;
};

struct DegreeStats {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    double edges_per_node = 0.0;
    /// Averages over nodes that have at least one in- (resp. out-) edge.
    double mean_in_degree = 0.0;
    double mean_out_degree = 0.0;
};

struct GraphStats {
    DegreeStats hyperlink;   // edges with at least one hyperlink
    DegreeStats enhanced;    // every edge
};

/// Weblog-level graph. Nodes are sorted by id and edges by (src, dst), so
/// every traversal order is deterministic.
class WeblogGraph {
public:
    class Builder {
    public:
        NodeId add_node(const std::string& id);
        WeblogNode& node(NodeId id) { return nodes_[id]; }
        /// Accumulates into the (src, dst) bundle; self-loops are ignored.
        void add_edge(const EdgeBundle& bundle);
        WeblogGraph build() &&;

    private:
        std::vector<WeblogNode> nodes_;
        std::unordered_map<std::string, NodeId> index_;
        std::vector<EdgeBundle> edges_;
    };

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    const std::vector<WeblogNode>& nodes() const { return nodes_; }
    const WeblogNode& node(NodeId id) const { return nodes_[id]; }
    const std::vector<EdgeBundle>& edges() const { return edges_; }
    std::span<const EdgeBundle> out_edges(NodeId src) const;

    std::optional<NodeId> find(std::string_view weblog_id) const;
    const EdgeBundle* find_edge(NodeId src, NodeId dst) const;

private:
    friend WeblogGraph compute_similarity(const WeblogGraph&, const Corpus&, const GraphConfig&);
    void finalize();

    std::vector<WeblogNode> nodes_;
    std::vector<EdgeBundle> edges_;
    std::vector<std::size_t> offsets_;
};

/// Collapses the post graph onto weblogs. Hyperlink targets outside the
/// corpus become zero-post nodes. Node feature sets are unfiltered here.
WeblogGraph aggregate(const Corpus& corpus);

/// Adds tag, author and news-coupling evidence. Counts are written onto every
/// existing edge; a pair reaching any threshold gets edges in both directions.
WeblogGraph compute_similarity(const WeblogGraph& graph, const Corpus& corpus, const GraphConfig& cfg);

/// Convenience: aggregate followed by compute_similarity.
WeblogGraph build_weblog_graph(const Corpus& corpus, const GraphConfig& cfg);

GraphStats graph_stats(const WeblogGraph& graph);

/// Writes `<path>` (edges), `<path>.nodes` and `<path>.news`.
void save_graph(const WeblogGraph& graph, const std::string& path);
/// Throws ParseError with file and line on malformed content.
WeblogGraph load_graph(const std::string& path);

}  // namespace blogrank
