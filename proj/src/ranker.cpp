#include "blogrank/ranker.hpp"

#include "blogrank/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

namespace blogrank {

std::string_view method_name(Method m) {
    switch (m) {
        case Method::pagerank: return "pagerank";
        case Method::xrank: return "xrank";
        case Method::blogrank: return "blogrank";
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); });
    if (s == "pagerank" || s == "rank1") return Method::pagerank;
    if (s == "xrank" || s == "rank2") return Method::xrank;
    if (s == "blogrank" || s == "rank3") return Method::blogrank;
    return std::nullopt;
}

RankConfig RankConfig::preset(Method m) {
    RankConfig cfg;
    switch (m) {
        case Method::pagerank:
            cfg.tag_weight = cfg.author_weight = cfg.news_weight = 0.0;
            cfg.link_mode = LinkMode::binary;
            cfg.include_implicit = false;
            break;
        case Method::xrank:
            cfg.tag_weight = cfg.author_weight = cfg.news_weight = 0.0;
            cfg.link_mode = LinkMode::count;
            cfg.include_implicit = false;
            break;
        case Method::blogrank:
            cfg.tag_weight = 2.0;
            cfg.author_weight = 1.0;
            cfg.news_weight = 3.0;
            cfg.link_mode = LinkMode::count;
            cfg.include_implicit = true;
            break;
    }
    return cfg;
}

void RankConfig::validate() const {
    if (!(damping > 0.0 && damping < 1.0)) throw InvalidArgument(fmt::format("damping must lie in (0,1), got {}", damping));
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
    if (max_iters < 1) throw InvalidArgument("max_iters must be at least 1");
    for (double w : {tag_weight, author_weight, news_weight, link_weight}) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("weights must be finite and non-negative");
    }
}

double edge_weight(const EdgeBundle& bundle, const RankConfig& cfg) {
    const std::uint32_t links = cfg.link_mode == LinkMode::binary ? std::min<std::uint32_t>(bundle.links, 1) : bundle.links;
    double f = cfg.link_weight * links;
    if (cfg.include_implicit) {
        f += cfg.tag_weight * bundle.shared_tags + cfg.author_weight * bundle.shared_authors +
             cfg.news_weight * bundle.shared_news;
    }
    return f;
}

Transitions build_transitions(const WeblogGraph& graph, const RankConfig& cfg) {
    Transitions t;
    std::vector<double> weights;
    for (NodeId src = 0; src < graph.node_count(); ++src) {
        const auto row = graph.out_edges(src);
        weights.clear();
        double total = 0.0;
        for (const auto& e : row) {
            weights.push_back(edge_weight(e, cfg));
            total += weights.back();
        }
        if (total <= 0.0) {
            t.dangling.push_back(src);
            continue;
        }
        TransitionRow r;
        r.src = src;
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (weights[i] > 0.0) r.entries.emplace_back(row[i].dst, weights[i] / total);
        }
        t.rows.push_back(std::move(r));
    }
    return t;
}

std::optional<double> RankVector::score(std::string_view id) const {
    const auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) return std::nullopt;
    return scores[static_cast<std::size_t>(it - ids.begin())];
}

double RankVector::total() const { return std::accumulate(scores.begin(), scores.end(), 0.0); }

RankVector rank(const WeblogGraph& graph, const RankConfig& cfg) {
    cfg.validate();
    const std::size_t n = graph.node_count();
    RankVector out;
    out.ids.reserve(n);
    for (const auto& node : graph.nodes()) out.ids.push_back(node.id);
    if (n == 0) {
        out.converged = true;
        return out;
    }

    const Transitions t = build_transitions(graph, cfg);

    // Incoming CSR: for each destination, (source, probability) by ascending source.
    std::vector<std::size_t> in_offsets(n + 1, 0);
    for (const auto& row : t.rows)
        for (const auto& [dst, p] : row.entries) ++in_offsets[dst + 1];
    std::partial_sum(in_offsets.begin(), in_offsets.end(), in_offsets.begin());
    std::vector<NodeId> in_src(in_offsets.back());
    std::vector<double> in_prob(in_offsets.back());
    {
        std::vector<std::size_t> cursor(in_offsets.begin(), in_offsets.end() - 1);
        for (const auto& row : t.rows) {
            for (const auto& [dst, p] : row.entries) {
                in_src[cursor[dst]] = row.src;
                in_prob[cursor[dst]] = p;
                ++cursor[dst];
            }
        }
    }

    const double damping = cfg.damping;
    const double teleport = 1.0 - damping;
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> current(n, 1.0), next(n, 0.0);

    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        double dangling_mass = 0.0;
        for (NodeId d : t.dangling) dangling_mass += current[d];
        const double spread = dangling_mass * inv_n;

        double residual = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            double acc = 0.0;
            for (std::size_t k = in_offsets[a]; k < in_offsets[a + 1]; ++k) acc += in_prob[k] * current[in_src[k]];
            next[a] = teleport + damping * (acc + spread);
            residual += std::abs(next[a] - current[a]);
        }
        current.swap(next);
        out.iterations = iter;
        out.residual = residual;
        out.residual_history.push_back(residual);
        if (residual < cfg.epsilon) {
            out.converged = true;
            break;
        }
    }
    out.scores = std::move(current);
    return out;
}

std::vector<std::pair<std::string, double>> top_k(const RankVector& vector, std::size_t k) {
    if (k < 1) throw InvalidArgument("k must be at least 1");
    std::vector<std::size_t> order(vector.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t m = std::min(k, order.size());
    auto better = [&](std::size_t a, std::size_t b) {
        if (vector.scores[a] != vector.scores[b]) return vector.scores[a] > vector.scores[b];
        return vector.ids[a] < vector.ids[b];
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m), order.end(), better);
    std::vector<std::pair<std::string, double>> out;
    out.reserve(m);
    for (std::size_t i = 0; i < m; ++i) out.emplace_back(vector.ids[order[i]], vector.scores[order[i]]);
    return out;
}

Overlap overlap_at_k(const RankVector& a, const RankVector& b, std::size_t k) {
    if (a.ids != b.ids) throw InvalidArgument("rank vectors cover different weblog sets");
    const auto ta = top_k(a, k);
    const auto tb = top_k(b, k);
    std::set<std::string_view> in_a;
    for (const auto& [id, s] : ta) in_a.insert(id);
    Overlap o;
    for (const auto& [id, s] : tb) o.common += in_a.count(id);
    o.fraction = static_cast<double>(o.common) / static_cast<double>(k);
    return o;
}

std::vector<std::pair<std::string, double>> rank_news_influence(const WeblogGraph& graph, const RankVector& vector) {
    std::map<std::string, double> influence;
    for (const auto& node : graph.nodes()) {
        if (node.news.empty()) continue;
        const auto s = vector.score(node.id);
        if (!s) throw InvalidArgument(fmt::format("weblog '{}' has no score", node.id));
        for (const auto& url : node.news) influence[url] += *s;
    }
    std::vector<std::pair<std::string, double>> out(influence.begin(), influence.end());
    std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
    return out;
}

void save_ranks(const RankVector& vector, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write ranks: " + path);
    if (vector.size() > 0) {
        for (const auto& [id, score] : top_k(vector, vector.size())) out << id << '\t' << fmt::format("{:.17g}", score) << '\n';
    }
    if (!out.flush()) throw IoError("write failure: " + path);
}

RankVector load_ranks(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open ranks: " + path);
    std::vector<std::pair<std::string, double>> rows;
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || line.find('\t', tab + 1) != std::string::npos)
            throw ParseError(fmt::format("{}:{}: expected 'weblog_id<TAB>score'", path, line_no));
        double score = 0.0;
        const char* b = line.data() + tab + 1;
        const char* e = line.data() + line.size();
        const auto [p, ec] = std::from_chars(b, e, score);
        if (ec != std::errc{} || p != e || !std::isfinite(score))
            throw ParseError(fmt::format("{}:{}: bad score '{}'", path, line_no, std::string(b, e)));
        rows.emplace_back(line.substr(0, tab), score);
    }
    std::sort(rows.begin(), rows.end());
    RankVector v;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].first == rows[i - 1].first)
            throw ParseError(fmt::format("{}: duplicate weblog '{}'", path, rows[i].first));
        v.ids.push_back(rows[i].first);
        v.scores.push_back(rows[i].second);
    }
    v.converged = true;
    return v;
}

}  // namespace blogrank
