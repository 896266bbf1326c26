#include "blogrank/weblog_graph.hpp"

#include "blogrank/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>

namespace blogrank {

namespace {

std::string fold(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); });
    return out;
}

bool edge_less(const EdgeBundle& a, const EdgeBundle& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
}

std::uint64_t pair_key(NodeId a, NodeId b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

// Counts shared members per unordered node pair; slot selects T, U or N.
using PairCounts = std::unordered_map<std::uint64_t, std::array<std::uint32_t, 3>>;

void count_pairs(const std::map<std::string, std::vector<NodeId>>& buckets, std::size_t slot, PairCounts& counts) {
    for (const auto& [key, members] : buckets) {
        for (std::size_t i = 0; i < members.size(); ++i) {
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                const NodeId a = std::min(members[i], members[j]);
                const NodeId b = std::max(members[i], members[j]);
                counts[pair_key(a, b)][slot] += 1;
            }
        }
    }
}

DegreeStats degree_stats(std::size_t nodes, const std::vector<EdgeBundle>& edges, bool hyperlink_only) {
    DegreeStats s;
    s.nodes = nodes;
    std::vector<std::size_t> in(nodes, 0), out(nodes, 0);
    for (const auto& e : edges) {
        if (hyperlink_only && !e.is_hyperlink()) continue;
        ++s.edges;
        ++in[e.dst];
        ++out[e.src];
    }
    if (nodes == 0) return s;
    s.edges_per_node = static_cast<double>(s.edges) / static_cast<double>(nodes);
    const auto with_in = std::count_if(in.begin(), in.end(), [](std::size_t d) { return d > 0; });
    const auto with_out = std::count_if(out.begin(), out.end(), [](std::size_t d) { return d > 0; });
    if (with_in > 0) s.mean_in_degree = static_cast<double>(s.edges) / static_cast<double>(with_in);
    if (with_out > 0) s.mean_out_degree = static_cast<double>(s.edges) / static_cast<double>(with_out);
    return s;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto tab = line.find('\t', pos);
        out.push_back(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
        if (tab == std::string_view::npos) break;
        pos = tab + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view field, const std::string& file, std::size_t line_no) {
    T value{};
    const auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || p != field.data() + field.size())
        throw ParseError(fmt::format("{}:{}: expected a non-negative integer, got '{}'", file, line_no, field));
    return value;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open graph file: " + path);
    return in;
}

}  // namespace

std::set<std::string> GraphConfig::default_author_stoplist() {
    return {"admin", "webmaster", "john", "anonymous"};
}

void GraphConfig::load_stoplist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open stoplist: " + path);
    for (std::string line; std::getline(in, line);) {
        std::string name = fold(line);
        if (!name.empty() && name.front() != '#') author_stoplist.insert(std::move(name));
    }
}

void GraphConfig::validate() const {
    if (min_shared_tags < 1 || min_shared_authors < 1 || min_coupling < 1)
        throw InvalidArgument("similarity thresholds must be at least 1");
    if (!(tag_df_max_fraction > 0.0 && tag_df_max_fraction <= 1.0))
        throw InvalidArgument("tag_df_max_fraction must lie in (0, 1]");
}

NodeId WeblogGraph::Builder::add_node(const std::string& id) {
    const auto [it, inserted] = index_.try_emplace(id, static_cast<NodeId>(nodes_.size()));
    if (inserted) {
        WeblogNode node;
        node.id = id;
        nodes_.push_back(std::move(node));
    }
    return it->second;
}

void WeblogGraph::Builder::add_edge(const EdgeBundle& bundle) {
    if (bundle.src == bundle.dst) return;
    edges_.push_back(bundle);
}

WeblogGraph WeblogGraph::Builder::build() && {
    std::vector<NodeId> order(nodes_.size());
    std::iota(order.begin(), order.end(), NodeId{0});
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return nodes_[a].id < nodes_[b].id; });
    std::vector<NodeId> remap(nodes_.size());
    for (std::size_t i = 0; i < order.size(); ++i) remap[order[i]] = static_cast<NodeId>(i);

    WeblogGraph g;
    g.nodes_.reserve(nodes_.size());
    for (NodeId old : order) g.nodes_.push_back(std::move(nodes_[old]));
    for (auto& e : edges_) {
        e.src = remap[e.src];
        e.dst = remap[e.dst];
    }
    std::sort(edges_.begin(), edges_.end(), edge_less);
    for (const auto& e : edges_) {
        if (!g.edges_.empty() && g.edges_.back().src == e.src && g.edges_.back().dst == e.dst) {
            auto& acc = g.edges_.back();
            acc.links += e.links;
            acc.shared_tags += e.shared_tags;
            acc.shared_authors += e.shared_authors;
            acc.shared_news += e.shared_news;
        } else {
            g.edges_.push_back(e);
        }
    }
    edges_.clear();
    nodes_.clear();
    index_.clear();
    g.finalize();
    return g;
}

void WeblogGraph::finalize() {
    offsets_.assign(nodes_.size() + 1, 0);
    for (const auto& e : edges_) ++offsets_[e.src + 1];
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        nodes_[i].out_degree = offsets_[i + 1];
        offsets_[i + 1] += offsets_[i];
    }
}

std::span<const EdgeBundle> WeblogGraph::out_edges(NodeId src) const {
    return std::span<const EdgeBundle>(edges_).subspan(offsets_[src], offsets_[src + 1] - offsets_[src]);
}

std::optional<NodeId> WeblogGraph::find(std::string_view weblog_id) const {
    const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), weblog_id,
                                     [](const WeblogNode& n, std::string_view id) { return n.id < id; });
    if (it == nodes_.end() || it->id != weblog_id) return std::nullopt;
    return static_cast<NodeId>(it - nodes_.begin());
}

const EdgeBundle* WeblogGraph::find_edge(NodeId src, NodeId dst) const {
    if (src >= nodes_.size()) return nullptr;
    const auto row = out_edges(src);
    const auto it = std::lower_bound(row.begin(), row.end(), dst, [](const EdgeBundle& e, NodeId d) { return e.dst < d; });
    if (it == row.end() || it->dst != dst) return nullptr;
    return &*it;
}

WeblogGraph aggregate(const Corpus& corpus) {
    WeblogGraph::Builder b;
    for (const auto& [weblog_id, post_ids] : corpus.weblog_index()) {
        const NodeId id = b.add_node(weblog_id);
        WeblogNode& node = b.node(id);
        node.post_count = post_ids.size();
        for (std::size_t pi : post_ids) {
            const Post& p = corpus.posts()[pi];
            if (p.author) node.authors.insert(fold(*p.author));
            node.tags.insert(p.tags.begin(), p.tags.end());
            node.news.insert(p.news_links.begin(), p.news_links.end());
        }
    }
    for (const Post& p : corpus.posts()) {
        const NodeId src = b.add_node(p.weblog_id);
        for (const auto& target : p.post_links) {
            const NodeId dst = b.add_node(corpus.weblog_of(target));
            if (dst == src) continue;
            b.add_edge(EdgeBundle{src, dst, 1, 0, 0, 0});
        }
    }
    return std::move(b).build();
}

WeblogGraph compute_similarity(const WeblogGraph& graph, const Corpus& corpus, const GraphConfig& cfg) {
    cfg.validate();
    const auto weblogs = static_cast<double>(corpus.weblog_index().size());
    const auto& df = corpus.tag_df();
    auto tag_allowed = [&](const std::string& tag) {
        const auto it = df.find(tag);
        const std::size_t count = it == df.end() ? 0 : it->second;
        if (count < cfg.tag_df_min) return false;
        if (cfg.tag_df_max_fraction < 1.0 && static_cast<double>(count) > cfg.tag_df_max_fraction * weblogs)
            return false;
        return true;
    };

    WeblogGraph out;
    out.nodes_ = graph.nodes_;
    std::map<std::string, std::vector<NodeId>> by_tag, by_author, by_news;
    for (NodeId id = 0; id < out.nodes_.size(); ++id) {
        WeblogNode& node = out.nodes_[id];
        std::erase_if(node.tags, [&](const std::string& t) { return !tag_allowed(t); });
        std::erase_if(node.authors, [&](const std::string& a) { return cfg.author_stoplist.count(a) > 0; });
        for (const auto& t : node.tags) by_tag[t].push_back(id);
        for (const auto& a : node.authors) by_author[a].push_back(id);
        for (const auto& n : node.news) by_news[n].push_back(id);
    }

    PairCounts counts;
    count_pairs(by_tag, 0, counts);
    count_pairs(by_author, 1, counts);
    count_pairs(by_news, 2, counts);

    out.edges_ = graph.edges_;
    for (auto& e : out.edges_) e.shared_tags = e.shared_authors = e.shared_news = 0;
    // Original edges stay sorted; new implicit edges are appended and merged below.
    const std::size_t original = out.edges_.size();
    auto locate = [&](NodeId src, NodeId dst) -> EdgeBundle* {
        const auto begin = out.edges_.begin();
        const auto end = begin + static_cast<std::ptrdiff_t>(original);
        const EdgeBundle probe{src, dst, 0, 0, 0, 0};
        const auto it = std::lower_bound(begin, end, probe, edge_less);
        if (it == end || it->src != src || it->dst != dst) return nullptr;
        return &*it;
    };

    std::vector<std::pair<std::uint64_t, std::array<std::uint32_t, 3>>> ordered(counts.begin(), counts.end());
    std::sort(ordered.begin(), ordered.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (const auto& [key, c] : ordered) {
        const auto a = static_cast<NodeId>(key >> 32);
        const auto b = static_cast<NodeId>(key & 0xffffffffu);
        const bool implicit = c[0] >= cfg.min_shared_tags || c[1] >= cfg.min_shared_authors || c[2] >= cfg.min_coupling;
        for (const auto& [src, dst] : {std::pair{a, b}, std::pair{b, a}}) {
            if (EdgeBundle* e = locate(src, dst)) {
                e->shared_tags = c[0];
                e->shared_authors = c[1];
                e->shared_news = c[2];
            } else if (implicit) {
                out.edges_.push_back(EdgeBundle{src, dst, 0, c[0], c[1], c[2]});
            }
        }
    }
    std::sort(out.edges_.begin(), out.edges_.end(), edge_less);
    out.finalize();
    return out;
}

WeblogGraph build_weblog_graph(const Corpus& corpus, const GraphConfig& cfg) {
    return compute_similarity(aggregate(corpus), corpus, cfg);
}

GraphStats graph_stats(const WeblogGraph& graph) {
    return GraphStats{degree_stats(graph.node_count(), graph.edges(), true),
                      degree_stats(graph.node_count(), graph.edges(), false)};
}

void save_graph(const WeblogGraph& graph, const std::string& path) {
    auto open = [](const std::string& p) {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write graph file: " + p);
        return out;
    };
    auto edges = open(path);
    for (const auto& e : graph.edges()) {
        edges << graph.node(e.src).id << '\t' << graph.node(e.dst).id << '\t' << e.links << '\t' << e.shared_tags
              << '\t' << e.shared_authors << '\t' << e.shared_news << '\n';
    }
    auto nodes = open(path + ".nodes");
    auto news = open(path + ".news");
    for (const auto& n : graph.nodes()) {
        nodes << n.id << '\t' << n.post_count << '\t' << n.out_degree << '\n';
        for (const auto& url : n.news) news << n.id << '\t' << url << '\n';
    }
    if (!edges.flush() || !nodes.flush() || !news.flush()) throw IoError("write failure: " + path);
}

WeblogGraph load_graph(const std::string& path) {
    WeblogGraph::Builder b;
    std::unordered_map<std::string, NodeId> known;

    const std::string nodes_path = path + ".nodes";
    {
        auto in = open_input(nodes_path);
        std::size_t line_no = 0;
        for (std::string line; std::getline(in, line);) {
            ++line_no;
            if (line.empty()) continue;
            const auto f = split_tabs(line);
            if (f.size() != 3 || f[0].empty())
                throw ParseError(fmt::format("{}:{}: expected 3 tab-separated fields", nodes_path, line_no));
            const std::string id(f[0]);
            if (known.count(id)) throw ParseError(fmt::format("{}:{}: duplicate node '{}'", nodes_path, line_no, id));
            const NodeId n = b.add_node(id);
            known.emplace(id, n);
            b.node(n).post_count = parse_number<std::size_t>(f[1], nodes_path, line_no);
            parse_number<std::size_t>(f[2], nodes_path, line_no);
        }
    }
    {
        auto in = open_input(path);
        std::size_t line_no = 0;
        for (std::string line; std::getline(in, line);) {
            ++line_no;
            if (line.empty()) continue;
            const auto f = split_tabs(line);
            if (f.size() != 6)
                throw ParseError(fmt::format("{}:{}: expected 6 tab-separated fields, got {}", path, line_no, f.size()));
            const auto src = known.find(std::string(f[0]));
            const auto dst = known.find(std::string(f[1]));
            if (src == known.end() || dst == known.end())
                throw ParseError(fmt::format("{}:{}: edge endpoint missing from {}", path, line_no, nodes_path));
            if (src->second == dst->second) throw ParseError(fmt::format("{}:{}: self-loop", path, line_no));
            EdgeBundle e{src->second, dst->second,
                         parse_number<std::uint32_t>(f[2], path, line_no),
                         parse_number<std::uint32_t>(f[3], path, line_no),
                         parse_number<std::uint32_t>(f[4], path, line_no),
                         parse_number<std::uint32_t>(f[5], path, line_no)};
            b.add_edge(e);
        }
    }
    {
        const std::string news_path = path + ".news";
        std::ifstream in(news_path);
        std::size_t line_no = 0;
        for (std::string line; in && std::getline(in, line);) {
            ++line_no;
            if (line.empty()) continue;
            const auto f = split_tabs(line);
            const auto it = f.size() == 2 ? known.find(std::string(f[0])) : known.end();
            if (it == known.end()) throw ParseError(fmt::format("{}:{}: malformed news entry", news_path, line_no));
            b.node(it->second).news.insert(std::string(f[1]));
        }
    }
    return std::move(b).build();
}

}  // namespace blogrank
