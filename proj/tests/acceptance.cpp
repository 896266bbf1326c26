// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "blogrank/evaluation.hpp"
#include "blogrank/ranker.hpp"
#include "blogrank/search_index.hpp"
#include "blogrank/synthetic.hpp"
#include "blogrank/weblog_graph.hpp"
#include "support/fixtures.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace blogrank;

namespace {

int failures = 0;

void report(int id, std::string_view name, bool ok, const std::string& detail) {
    if (!ok) ++failures;
    fmt::print("{} {:>2}  {:<34} {}\n", ok ? "PASS" : "FAIL", id, name, detail);
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Mass conservation is checked on every converged run below.
struct MassCheck {
    std::size_t runs = 0;
    std::size_t dangling_runs = 0;
    std::size_t unconverged = 0;
    double worst = 0.0;  // max |ΣB − N| / (epsilon·N)

    void add(const WeblogGraph& g, const RankConfig& cfg, const RankVector& v) {
        if (!v.converged) {
            ++unconverged;
            return;
        }
        ++runs;
        if (!build_transitions(g, cfg).dangling.empty()) ++dangling_runs;
        const double n = static_cast<double>(g.node_count());
        worst = std::max(worst, std::abs(v.total() - n) / (cfg.epsilon * n));
    }
};

MassCheck mass;

void f_worked_example() {
    const EdgeBundle e{0, 1, 3, 1, 1, 1};
    const double f = edge_weight(e, RankConfig::preset(Method::blogrank));
    report(1, "F worked example", f == 9.0, fmt::format("F(L=3,T=1,U=1,N=1; 2,1,3) = {:.17g}", f));
}

void si_worked_examples() {
    auto si = [](std::vector<std::size_t> d) { return success_index(d); };
    const double a = si({2, 10}), b = si({10, 2}), c = si({2, 1, 3}), d = si({1, 2, 3, 4});
    const bool ok = std::abs(a - 0.275) <= 1e-12 && std::abs(b - 0.175) <= 1e-12 && c > d &&
                    std::abs(c - 0.42593) <= 1e-4 && std::abs(d - 0.40104) <= 1e-4;
    report(2, "SI worked examples", ok,
           fmt::format("[2,10]={:.15g} [10,2]={:.15g} [2,1,3]={:.6f} [1,2,3,4]={:.6f}", a, b, c, d));
}

void row_stochasticity() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(3);
    double worst = 0.0;
    std::size_t rows = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const WeblogGraph g = fixtures::random_graph(rng, {});
        for (Method m : kAllMethods) {
            const RankConfig cfg = RankConfig::preset(m);
            for (const auto& row : build_transitions(g, cfg).rows) {
                double sum = 0.0;
                for (const auto& [dst, p] : row.entries) sum += p;
                worst = std::max(worst, std::abs(sum - 1.0));
                ++rows;
            }
            mass.add(g, cfg, rank(g, cfg));
        }
    }
    const double t = seconds_since(start);
    report(3, "row stochasticity", worst <= 1e-12 && t < 10.0,
           fmt::format("1000 graphs x 3 presets, {} rows, max |row sum - 1| = {:.3g}, {:.2f}s", rows, worst, t));
}

void pagerank_oracle() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(4);
    fixtures::RandomGraphOptions opt;
    opt.max_nodes = 100;
    opt.dangling_free = true;
    const RankConfig cfg = RankConfig::preset(Method::pagerank);
    double worst = 0.0;
    bool all_converged = true;
    for (int trial = 0; trial < 100; ++trial) {
        const WeblogGraph g = fixtures::random_graph(rng, opt);
        const auto oracle = fixtures::dense_pagerank(fixtures::hyperlink_adjacency(g), cfg.damping);
        const RankVector v = rank(g, cfg);
        all_converged = all_converged && v.converged;
        mass.add(g, cfg, v);
        for (std::size_t i = 0; i < oracle.size(); ++i) worst = std::max(worst, std::abs(v.scores[i] - oracle[i]));
    }
    const double t = seconds_since(start);
    report(4, "PageRank oracle equivalence", all_converged && worst <= 1e-8 && t < 30.0,
           fmt::format("100 dangling-free graphs, max per-node error {:.3g} (epsilon {:g}), {:.2f}s", worst, cfg.epsilon, t));
}

void mass_conservation() {
    const bool ok = mass.runs > 0 && mass.dangling_runs > 0 && mass.worst <= 1.0;
    report(5, "mass conservation", ok,
           fmt::format("{} converged runs ({} with dangling nodes, {} unconverged), max |sum-N|/(eps*N) = {:.3g}", mass.runs,
                       mass.dangling_runs, mass.unconverged, mass.worst));
}

void symmetric_fixed_point() {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    bool converged = true;
    for (std::size_t k : {3u, 10u, 1000u}) {
        const WeblogGraph g = fixtures::cycle_graph(k);
        for (double e : {0.5, 0.85, 0.99}) {
            for (Method m : kAllMethods) {
                RankConfig cfg = RankConfig::preset(m);
                cfg.damping = e;
                const RankVector v = rank(g, cfg);
                converged = converged && v.converged;
                for (double s : v.scores) worst = std::max(worst, std::abs(s - 1.0));
            }
        }
    }
    const double t = seconds_since(start);
    report(6, "symmetric fixed point", converged && worst <= 1e-10 && t < 5.0,
           fmt::format("k in {{3,10,1000}}, E in {{0.5,0.85,0.99}}, max |B-1| = {:.3g}, {:.2f}s", worst, t));
}

void weight_scaling() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(7);
    fixtures::RandomGraphOptions opt;
    opt.edge_probability = 0.2;
    bool identical = true;
    std::size_t rows = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const WeblogGraph g = fixtures::random_graph(rng, opt);
        const RankConfig base = RankConfig::preset(Method::blogrank);
        RankConfig scaled = base;
        scaled.tag_weight *= 7;
        scaled.author_weight *= 7;
        scaled.news_weight *= 7;
        scaled.link_weight *= 7;
        const Transitions a = build_transitions(g, base), b = build_transitions(g, scaled);
        identical = identical && a.dangling == b.dangling && a.rows.size() == b.rows.size();
        for (std::size_t r = 0; identical && r < a.rows.size(); ++r) {
            identical = a.rows[r].src == b.rows[r].src && a.rows[r].entries == b.rows[r].entries;
            ++rows;
        }
        const std::size_t k = g.node_count();
        identical = identical && top_k(rank(g, base), k) == top_k(rank(g, scaled), k);
    }
    const double t = seconds_since(start);
    report(7, "weight-scaling invariance", identical && t < 10.0,
           fmt::format("20 enhanced graphs, {} rows and full top_k compared bitwise, {:.2f}s", rows, t));
}

void densification() {
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        SyntheticParams p;
        p.seed = seed;
        std::ostringstream out;
        generate_synthetic(p, out);
        std::istringstream in(out.str());
        const Corpus corpus = parse_corpus(in).corpus;
        const GraphStats s = graph_stats(build_weblog_graph(corpus, GraphConfig{}));
        const bool implicit_present = s.enhanced.edges > s.hyperlink.edges;
        ok = ok && implicit_present && s.enhanced.edges_per_node >= s.hyperlink.edges_per_node;
        detail += fmt::format("{}{:.2f}->{:.2f}", detail.empty() ? "" : " ", s.hyperlink.edges_per_node,
                              s.enhanced.edges_per_node);
    }
    const double t = seconds_since(start);
    report(8, "densification direction", ok && t < 10.0, fmt::format("edges/node per seed: {}, {:.2f}s", detail, t));
}

void search_ordering() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(9);
    const double score_pool[] = {0.15, 0.5, 1.0, 1.0, 2.75};
    const Timestamp ts_pool[] = {kNoTimestamp, 1136073600, 1136073600, 1138752000, 1141171200};
    std::size_t mismatches = 0, results = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t weblogs = 1 + rng() % 6;
        RankVector ranks;
        for (std::size_t w = 0; w < weblogs; ++w) {
            if (rng() % 5 == 0) continue;  // unscored weblogs rank as 0
            ranks.ids.push_back("blog" + std::to_string(w) + ".net");
            ranks.scores.push_back(score_pool[rng() % 5]);
        }
        TextIndex index;
        struct Row {
            double score;
            Timestamp ts;
            std::string permalink;
        };
        std::vector<Row> expected;
        const std::size_t docs = 1 + rng() % 30;
        for (std::size_t d = 0; d < docs; ++d) {
            const std::string weblog = "blog" + std::to_string(rng() % weblogs) + ".net";
            const std::string permalink = "http://" + weblog + "/" + std::to_string(rng() % 1000) + "-" + std::to_string(d);
            const Timestamp ts = ts_pool[rng() % 5];
            const bool hit = rng() % 4 != 0;
            index.add({permalink, weblog, ts, hit ? "a storm warning" : "calm weather"});
            if (hit) expected.push_back({ranks.score(weblog).value_or(0.0), ts, permalink});
        }
        std::sort(expected.begin(), expected.end(), [](const Row& a, const Row& b) {
            if (a.score != b.score) return a.score > b.score;
            if (a.ts != b.ts) return a.ts > b.ts;
            return a.permalink < b.permalink;
        });
        const auto got = search(index, "storm", ranks);
        bool same = got.size() == expected.size();
        for (std::size_t i = 0; same && i < got.size(); ++i)
            same = got[i].permalink == expected[i].permalink && got[i].position == i + 1;
        if (!same) ++mismatches;
        results += got.size();
    }
    const double t = seconds_since(start);
    report(9, "search ordering", mismatches == 0 && t < 10.0,
           fmt::format("10000 cases, {} results, {} mismatches vs brute-force sort, {:.2f}s", results, mismatches, t));
}

void t_test_sanity() {
    const std::vector<double> same{0.3, 0.5, 0.2, 0.9, 0.4};
    const TTestResult identical = t_test(same, same);

    const std::vector<double> low{1, 2, 3, 4, 5}, high{11, 12, 13, 14, 15};
    const TTestResult shifted = t_test(low, high);

    // scipy.stats.ttest_ind(a, b, equal_var=False)
    const std::vector<double> a{0.61, 0.42, 0.55, 0.73, 0.38, 0.66, 0.49, 0.58, 0.71, 0.44};
    const std::vector<double> b{0.35, 0.29, 0.47, 0.31, 0.52, 0.26, 0.39, 0.33, 0.41, 0.28};
    const TTestResult r = t_test(a, b);
    const double ref_t = 4.14228332761692, ref_p = 0.000758665613784475;

    const bool ok_identical = identical.p_two_tailed == 1.0;
    const bool ok_shifted = shifted.p_two_tailed < 1e-6;
    const bool ok_oracle = std::abs(r.t - ref_t) <= 1e-6 && std::abs(r.p_two_tailed - ref_p) <= 1e-4;
    report(10, "t-test sanity", ok_identical && ok_shifted && ok_oracle,
           fmt::format("identical p={:g} [{}]; (1..5) vs +10 t={:g} df={:g} p={:.4g} (need <1e-6) [{}]; 2x10 t={:.12g} "
                       "p={:.6g} [{}]",
                       identical.p_two_tailed, ok_identical ? "ok" : "bad", shifted.t, shifted.df, shifted.p_two_tailed,
                       ok_shifted ? "ok" : "bad", r.t, r.p_two_tailed, ok_oracle ? "ok" : "bad"));
}

// 100k weblogs: ~24 skewed hyperlink targets each plus 300k symmetric implicit pairs.
WeblogGraph scale_graph(std::size_t nodes) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    WeblogGraph::Builder b;
    for (std::size_t i = 0; i < nodes; ++i) b.add_node(fmt::format("blog{:06d}.example.com", i));
    auto skewed = [&] { return static_cast<NodeId>(nodes * std::pow(unit(rng), 2.5)) % nodes; };
    for (std::size_t i = 0; i < nodes; ++i) {
        const std::size_t out = 12 + rng() % 25;
        for (std::size_t k = 0; k < out; ++k) {
            const NodeId dst = k % 3 == 0 ? static_cast<NodeId>(rng() % nodes) : skewed();
            b.add_edge({NodeId(i), dst, 1 + static_cast<std::uint32_t>(rng() % 3), 0, 0, 0});
        }
    }
    for (std::size_t k = 0; k < 3 * nodes; ++k) {
        const NodeId u = static_cast<NodeId>(rng() % nodes), v = skewed();
        const std::uint32_t t = rng() % 5, a = rng() % 3, n = rng() % 4;
        if (t + a + n == 0) continue;
        b.add_edge({u, v, 0, t, a, n});
        b.add_edge({v, u, 0, t, a, n});
    }
    return std::move(b).build();
}

void scale_runtime() {
    const auto built_at = std::chrono::steady_clock::now();
    const WeblogGraph g = scale_graph(100000);
    const double build_s = seconds_since(built_at);

    auto timed = [&](Method m) {
        RankConfig cfg = RankConfig::preset(m);
        cfg.epsilon = 1e-8;
        double best = 1e300;
        RankVector v;
        for (int rep = 0; rep < 2; ++rep) {
            const auto start = std::chrono::steady_clock::now();
            v = rank(g, cfg);
            best = std::min(best, seconds_since(start));
        }
        return std::pair{v, best};
    };
    const auto [r1, t1] = timed(Method::pagerank);
    const auto [r3, t3] = timed(Method::blogrank);
    const bool ok = r1.converged && r3.converged && t3 < 60.0 && t3 <= 2.0 * t1;
    report(11, "scale/runtime", ok,
           fmt::format("{} nodes, {} edges (built {:.1f}s); Rank1 {:.2f}s/{} iters, BlogRank {:.2f}s/{} iters, ratio {:.2f}",
                       g.node_count(), g.edge_count(), build_s, t1, r1.iterations, t3, r3.iterations, t3 / t1));
}

}  // namespace

int main() {
    f_worked_example();
    si_worked_examples();
    row_stochasticity();
    pagerank_oracle();
    mass_conservation();
    symmetric_fixed_point();
    weight_scaling();
    densification();
    search_ordering();
    t_test_sanity();
    scale_runtime();
    fmt::print("{} of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
