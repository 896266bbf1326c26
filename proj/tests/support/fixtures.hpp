#pragma once

// Shared fixtures and independent oracles for the unit and acceptance suites.
// Nothing here calls into the ranker; the oracles re-derive results from
// first principles so they can check it.

#include "blogrank/ingest.hpp"
#include "blogrank/weblog_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace blogrank::fixtures {

/// Two weblogs, 11 posts, 3 hyperlinks (all bottom → top). The pair shares one
/// tag, one author and one news URL, all below the implicit-edge thresholds.
inline std::string figure_one_jsonl() {
    return R"({"permalink":"http://top.example.com/p1","author":"alice","ts":"2006-01-01T10:00:00Z","tags":["politics"],"news_links":["http://news.example.org/a"],"content":"election night"}
{"permalink":"http://top.example.com/p2","author":"bob","ts":"2006-01-02T10:00:00Z","tags":["music"],"content":"new album"}
{"permalink":"http://top.example.com/p3","author":"alice","ts":"2006-01-03T10:00:00Z","tags":["art"],"content":"gallery visit"}
{"permalink":"http://top.example.com/p4","author":"bob","ts":"2006-01-04T10:00:00Z","tags":["music"],"content":"concert review"}
{"permalink":"http://top.example.com/p5","author":"alice","ts":"2006-01-05T10:00:00Z","content":"quiet day"}
{"permalink":"http://bottom.example.com/q1","author":"alice","ts":"2006-01-02T12:00:00Z","tags":["politics"],"post_links":["http://top.example.com/p1"],"news_links":["http://news.example.org/a"],"content":"reply on the election"}
{"permalink":"http://bottom.example.com/q2","author":"carol","ts":"2006-01-03T12:00:00Z","tags":["sport"],"post_links":["http://top.example.com/p2"],"content":"football and music"}
{"permalink":"http://bottom.example.com/q3","author":"carol","ts":"2006-01-04T12:00:00Z","tags":["cooking"],"post_links":["http://top.example.com/p4"],"news_links":["http://news.example.org/b"],"content":"soup recipe"}
{"permalink":"http://bottom.example.com/q4","author":"carol","ts":"2006-01-05T12:00:00Z","tags":["sport"],"content":"match report"}
{"permalink":"http://bottom.example.com/q5","ts":"2006-01-06T12:00:00Z","tags":["cooking"],"content":"bread"}
{"permalink":"http://bottom.example.com/q6","author":"carol","ts":"2006-01-07T12:00:00Z","content":"holiday"}
)";
}

inline Corpus figure_one_corpus() {
    std::istringstream in(figure_one_jsonl());
    return parse_corpus(in).corpus;
}

struct RandomGraphOptions {
    std::size_t min_nodes = 2;
    std::size_t max_nodes = 50;
    double edge_probability = 0.1;
    std::uint32_t max_links = 5;
    bool implicit = true;          // symmetric T/U/N evidence, including L = 0 edges
    bool dangling_free = false;    // every node gets at least one hyperlink out-edge
};

/// Random weblog graph built straight from bundles (no corpus).
inline WeblogGraph random_graph(std::mt19937_64& rng, const RandomGraphOptions& opt) {
    std::uniform_int_distribution<std::size_t> size(opt.min_nodes, opt.max_nodes);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::uint32_t> links(1, opt.max_links);
    std::uniform_int_distribution<std::uint32_t> small(0, 4);
    const std::size_t n = size(rng);

    WeblogGraph::Builder b;
    for (std::size_t i = 0; i < n; ++i) b.add_node("w" + std::to_string(1000 + i));

    std::vector<std::vector<std::uint32_t>> L(n, std::vector<std::uint32_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        bool has_out = false;
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && unit(rng) < opt.edge_probability) {
                L[i][j] = links(rng);
                has_out = true;
            }
        }
        if (opt.dangling_free && !has_out) {
            std::size_t j = std::uniform_int_distribution<std::size_t>(0, n - 2)(rng);
            if (j >= i) ++j;
            L[i][j] = links(rng);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            std::uint32_t t = 0, u = 0, w = 0;
            if (opt.implicit && unit(rng) < opt.edge_probability) {
                t = small(rng);
                u = small(rng);
                w = small(rng);
            }
            const bool implicit_edge = t + u + w > 0;
            if (L[i][j] || implicit_edge) b.add_edge({NodeId(i), NodeId(j), L[i][j], t, u, w});
            if (L[j][i] || implicit_edge) b.add_edge({NodeId(j), NodeId(i), L[j][i], t, u, w});
        }
    }
    return std::move(b).build();
}

/// Dense power-iteration PageRank: x ← (1 − E) + E·Mx with M[j][i] = 1/outdeg(i)
/// over distinct hyperlink targets. Expects no dangling nodes.
inline std::vector<double> dense_pagerank(const std::vector<std::vector<int>>& adjacency, double damping,
                                          int max_iters = 100000, double tol = 1e-15) {
    const std::size_t n = adjacency.size();
    std::vector<std::vector<double>> M(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        int out = 0;
        for (std::size_t j = 0; j < n; ++j) out += adjacency[i][j] ? 1 : 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (adjacency[i][j]) M[j][i] = 1.0 / out;
        }
    }
    std::vector<double> x(n, 1.0), y(n);
    for (int it = 0; it < max_iters; ++it) {
        double diff = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += M[j][i] * x[i];
            y[j] = (1.0 - damping) + damping * s;
            diff = std::max(diff, std::abs(y[j] - x[j]));
        }
        x.swap(y);
        if (diff < tol) break;
    }
    return x;
}

/// Hyperlink adjacency (L > 0) of a graph, indexed like graph.nodes().
inline std::vector<std::vector<int>> hyperlink_adjacency(const WeblogGraph& g) {
    std::vector<std::vector<int>> a(g.node_count(), std::vector<int>(g.node_count(), 0));
    for (const auto& e : g.edges()) {
        if (e.links > 0) a[e.src][e.dst] = 1;
    }
    return a;
}

/// Directed k-cycle w0 → w1 → … → w(k-1) → w0 with single links.
inline WeblogGraph cycle_graph(std::size_t k) {
    WeblogGraph::Builder b;
    for (std::size_t i = 0; i < k; ++i) b.add_node("c" + std::to_string(100000 + i));
    for (std::size_t i = 0; i < k; ++i) b.add_edge({NodeId(i), NodeId((i + 1) % k), 1, 0, 0, 0});
    return std::move(b).build();
}

}  // namespace blogrank::fixtures
