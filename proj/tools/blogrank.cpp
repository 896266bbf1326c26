// blogrank command line: ingest → build-graph → rank → search/serve → eval.

#include "blogrank/click_log.hpp"
#include "blogrank/error.hpp"
#include "blogrank/evaluation.hpp"
#include "blogrank/ingest.hpp"
#include "blogrank/pipeline.hpp"
#include "blogrank/ranker.hpp"
#include "blogrank/search_index.hpp"
#include "blogrank/service.hpp"
#include "blogrank/synthetic.hpp"
#include "blogrank/weblog_graph.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <fmt/format.h>

#include <filesystem>
#include <iostream>

using namespace blogrank;

namespace {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kBadInput = 2,
    kIo = 3,
    kStage = 4,
    kNotConverged = 5,
};

void print_degree(const char* label, const DegreeStats& s) {
    fmt::print("{:<10} nodes={} edges={} edges/node={:.4f} mean_in={:.4f} mean_out={:.4f}\n", label, s.nodes, s.edges,
               s.edges_per_node, s.mean_in_degree, s.mean_out_degree);
}

void print_report(const IngestReport& r) {
    fmt::print("records read={} kept={} skipped={} (malformed={} duplicates={}) dropped_links={}\n", r.read, r.kept,
               r.skipped, r.malformed, r.duplicates, r.dropped_links);
    for (const auto& d : r.diagnostics) fmt::print(stderr, "warning: {}\n", d);
}

Method require_method(const std::string& name) {
    const auto m = parse_method(name);
    if (!m) throw InvalidArgument("unknown method '" + name + "' (expected pagerank, xrank or blogrank)");
    return *m;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weblog ranking: BlogRank, PageRank and XRank over an enhanced weblog graph"};
    app.set_config("--config", "", "Config file overriding defaults (key = flag name)");
    app.require_subcommand(1);
    int exit_code = kOk;

    // gen
    SyntheticParams gen;
    std::string gen_out;
    auto* cmd_gen = app.add_subcommand("gen", "Write a synthetic ingest-format corpus");
    cmd_gen->add_option("--seed", gen.seed, "RNG seed");
    cmd_gen->add_option("--weblogs", gen.weblogs, "Number of weblogs")->check(CLI::PositiveNumber);
    cmd_gen->add_option("--posts", gen.posts, "Number of posts")->check(CLI::PositiveNumber);
    cmd_gen->add_option("--links-per-post", gen.links_per_post, "Mean post links per post");
    cmd_gen->add_option("--tags-per-post", gen.tags_per_post, "Mean tags per post");
    cmd_gen->add_option("--news-per-post", gen.news_per_post, "Mean news links per post");
    cmd_gen->add_option("--authors-per-weblog", gen.authors_per_weblog, "Mean authors per weblog");
    cmd_gen->add_option("--out", gen_out, "Output JSONL")->required();
    cmd_gen->callback([&] { generate_synthetic(gen, gen_out); });

    // ingest
    std::string ingest_input, ingest_patterns, ingest_out;
    auto* cmd_ingest = app.add_subcommand("ingest", "Normalize and deduplicate a post corpus");
    cmd_ingest->add_option("--input", ingest_input, "Line-delimited JSON posts")->required();
    cmd_ingest->add_option("--host-patterns", ingest_patterns, "Multi-user host glob table");
    cmd_ingest->add_option("--out", ingest_out, "Corpus snapshot")->required();
    cmd_ingest->callback([&] {
        const HostPatterns patterns = ingest_patterns.empty() ? HostPatterns::defaults() : HostPatterns::load(ingest_patterns);
        const auto loaded = load_corpus(ingest_input, patterns);
        save_corpus(loaded.corpus, ingest_out);
        print_report(loaded.report);
        fmt::print("weblogs={} tags={}\n", loaded.corpus.weblog_index().size(), loaded.corpus.tag_df().size());
    });

    // build-graph
    std::string bg_corpus, bg_stoplist, bg_out;
    GraphConfig bg_cfg;
    auto* cmd_graph = app.add_subcommand("build-graph", "Aggregate posts into the enhanced weblog graph");
    cmd_graph->add_option("--corpus", bg_corpus, "Corpus snapshot")->required();
    cmd_graph->add_option("--min-tags", bg_cfg.min_shared_tags, "Shared tags needed for an implicit edge");
    cmd_graph->add_option("--min-authors", bg_cfg.min_shared_authors, "Shared authors needed for an implicit edge");
    cmd_graph->add_option("--min-coupling", bg_cfg.min_coupling, "Shared news URLs needed for an implicit edge");
    cmd_graph->add_option("--tag-df-min", bg_cfg.tag_df_min, "Ignore tags used by fewer weblogs");
    cmd_graph->add_option("--tag-df-max-fraction", bg_cfg.tag_df_max_fraction, "Ignore tags used by a larger share of weblogs");
    cmd_graph->add_option("--stoplist", bg_stoplist, "Extra author names to ignore, one per line");
    cmd_graph->add_option("--out", bg_out, "Graph TSV (writes .nodes and .news sidecars)")->required();
    cmd_graph->callback([&] {
        if (!bg_stoplist.empty()) bg_cfg.load_stoplist(bg_stoplist);
        const auto graph = build_weblog_graph(load_corpus(bg_corpus).corpus, bg_cfg);
        save_graph(graph, bg_out);
        const auto stats = graph_stats(graph);
        print_degree("hyperlink", stats.hyperlink);
        print_degree("enhanced", stats.enhanced);
    });

    // rank
    std::string rk_graph, rk_method = "blogrank", rk_out;
    RankConfig rk_cfg;
    auto* cmd_rank = app.add_subcommand("rank", "Score weblogs by power iteration");
    cmd_rank->add_option("--graph", rk_graph, "Graph TSV")->required();
    cmd_rank->add_option("--method", rk_method, "pagerank | xrank | blogrank");
    auto* opt_wt = cmd_rank->add_option("--wt", rk_cfg.tag_weight, "Shared-tag weight");
    auto* opt_wu = cmd_rank->add_option("--wu", rk_cfg.author_weight, "Shared-author weight");
    auto* opt_wn = cmd_rank->add_option("--wn", rk_cfg.news_weight, "News-coupling weight");
    cmd_rank->add_option("--damping", rk_cfg.damping, "Damping factor E");
    cmd_rank->add_option("--epsilon", rk_cfg.epsilon, "L1 convergence tolerance");
    cmd_rank->add_option("--max-iters", rk_cfg.max_iters, "Iteration cap");
    cmd_rank->add_option("--out", rk_out, "Ranks TSV")->required();
    cmd_rank->callback([&] {
        RankConfig cfg = RankConfig::preset(require_method(rk_method));
        cfg.damping = rk_cfg.damping;
        cfg.epsilon = rk_cfg.epsilon;
        cfg.max_iters = rk_cfg.max_iters;
        if (opt_wt->count()) cfg.tag_weight = rk_cfg.tag_weight;
        if (opt_wu->count()) cfg.author_weight = rk_cfg.author_weight;
        if (opt_wn->count()) cfg.news_weight = rk_cfg.news_weight;
        const auto v = rank(load_graph(rk_graph), cfg);
        save_ranks(v, rk_out);
        fmt::print("{} nodes, {} iterations, residual {:.3g}, sum {:.6f}\n", v.size(), v.iterations, v.residual, v.total());
        if (!v.converged) {
            fmt::print(stderr, "warning: did not converge within {} iterations\n", cfg.max_iters);
            exit_code = kNotConverged;
        }
    });

    // top
    std::string top_ranks;
    std::size_t top_k_value = 10;
    auto* cmd_top = app.add_subcommand("top", "Print the best ranked weblogs");
    cmd_top->add_option("--ranks", top_ranks, "Ranks TSV")->required();
    cmd_top->add_option("-k", top_k_value, "How many")->check(CLI::PositiveNumber);
    cmd_top->callback([&] {
        std::size_t i = 0;
        for (const auto& [id, score] : top_k(load_ranks(top_ranks), top_k_value)) fmt::print("{}\t{}\t{:.6f}\n", ++i, id, score);
    });

    // overlap
    std::string ov_a, ov_b;
    std::size_t ov_k = 1000;
    auto* cmd_overlap = app.add_subcommand("overlap", "Common weblogs in two top-k lists");
    cmd_overlap->add_option("--a", ov_a, "Ranks TSV")->required();
    cmd_overlap->add_option("--b", ov_b, "Ranks TSV")->required();
    cmd_overlap->add_option("-k", ov_k, "List length")->check(CLI::PositiveNumber);
    cmd_overlap->callback([&] {
        const auto o = overlap_at_k(load_ranks(ov_a), load_ranks(ov_b), ov_k);
        fmt::print("common={} k={} fraction={:.4f}\n", o.common, ov_k, o.fraction);
    });

    // news-influence
    std::string ni_graph, ni_ranks;
    std::size_t ni_k = 0;
    auto* cmd_news = app.add_subcommand("news-influence", "Rank news URLs by the scores of the weblogs citing them");
    cmd_news->add_option("--graph", ni_graph, "Graph TSV")->required();
    cmd_news->add_option("--ranks", ni_ranks, "Ranks TSV")->required();
    cmd_news->add_option("-k", ni_k, "Limit output (0 = all)");
    cmd_news->callback([&] {
        const auto rows = rank_news_influence(load_graph(ni_graph), load_ranks(ni_ranks));
        const std::size_t n = ni_k == 0 ? rows.size() : std::min(ni_k, rows.size());
        for (std::size_t i = 0; i < n; ++i) fmt::print("{}\t{:.6f}\n", rows[i].first, rows[i].second);
    });

    // index
    std::string ix_corpus, ix_out;
    auto* cmd_index = app.add_subcommand("index", "Build the full-text index of a corpus snapshot");
    cmd_index->add_option("--corpus", ix_corpus, "Corpus snapshot")->required();
    cmd_index->add_option("--out", ix_out, "Index file")->required();
    cmd_index->callback([&] {
        const auto index = build_index(load_corpus(ix_corpus).corpus);
        index.save(ix_out);
        fmt::print("{} documents, {} terms\n", index.size(), index.postings().size());
    });

    // search
    std::string s_index, s_ranks, s_query;
    std::size_t s_limit = kDefaultSearchLimit;
    auto* cmd_search = app.add_subcommand("search", "Query posts, ordered by weblog rank then recency");
    cmd_search->add_option("--index", s_index, "Index file")->required();
    cmd_search->add_option("--ranks", s_ranks, "Ranks TSV")->required();
    cmd_search->add_option("--query", s_query, "Query terms (all must match)")->required();
    cmd_search->add_option("--limit", s_limit, "Candidate cap")->check(CLI::PositiveNumber);
    cmd_search->callback([&] {
        for (const auto& r : search(TextIndex::load(s_index), s_query, load_ranks(s_ranks), s_limit)) {
            fmt::print("{}\t{:.6f}\t{}\t{}\t{}\n", r.position, r.weblog_score, format_timestamp(r.published_at), r.permalink,
                       r.snippet);
        }
    });

    // eval
    auto* cmd_eval = app.add_subcommand("eval", "Success Index evaluation of click logs");
    cmd_eval->require_subcommand(1);
    std::string ev_clicks;
    auto* cmd_si = cmd_eval->add_subcommand("si", "Per-method Success Index report (JSON)");
    cmd_si->add_option("--clicks", ev_clicks, "Click log")->required();
    cmd_si->callback([&] {
        const auto sessions = read_click_log(ev_clicks);
        std::cout << si_report_json(sessions).dump(2) << '\n';
    });
    std::string tt_clicks, tt_a = "blogrank", tt_b = "xrank";
    auto* cmd_tt = cmd_eval->add_subcommand("ttest", "Welch t-test between two methods' SI values");
    cmd_tt->add_option("--clicks", tt_clicks, "Click log")->required();
    cmd_tt->add_option("--a", tt_a, "First method");
    cmd_tt->add_option("--b", tt_b, "Second method");
    cmd_tt->callback([&] {
        const auto by = si_by_method(read_click_log(tt_clicks));
        const Method a = require_method(tt_a), b = require_method(tt_b);
        const auto empty = std::vector<double>{};
        const auto& va = by.count(a) ? by.at(a) : empty;
        const auto& vb = by.count(b) ? by.at(b) : empty;
        const auto r = t_test(va, vb);
        fmt::print("{} (n={}) vs {} (n={}): t={:.6f} df={:.4f} p_two_tailed={:.6g} p_one_tailed={:.6g}\n", method_name(a),
                   va.size(), method_name(b), vb.size(), r.t, r.df, r.p_two_tailed, r.p_one_tailed);
    });

    // serve
    std::string sv_index, sv_pr, sv_xr, sv_br, sv_log, sv_static, sv_host = "0.0.0.0";
    int sv_port = 8080;
    std::uint64_t sv_seed = 0;
    std::size_t sv_limit = kDefaultSearchLimit;
    auto* cmd_serve = app.add_subcommand("serve", "HTTP API for blind search and click logging");
    cmd_serve->add_option("--index", sv_index, "Index file")->required();
    cmd_serve->add_option("--ranks-pagerank", sv_pr, "Ranks TSV")->required();
    cmd_serve->add_option("--ranks-xrank", sv_xr, "Ranks TSV")->required();
    cmd_serve->add_option("--ranks-blogrank", sv_br, "Ranks TSV")->required();
    cmd_serve->add_option("--port", sv_port, "Listen port");
    cmd_serve->add_option("--host", sv_host, "Listen address");
    auto* opt_seed = cmd_serve->add_option("--seed", sv_seed, "Seed for method assignment");
    cmd_serve->add_option("--log", sv_log, "Append-only click log")->required();
    cmd_serve->add_option("--static", sv_static, "Directory with the web UI bundle");
    cmd_serve->add_option("--limit", sv_limit, "Candidate cap per query")->check(CLI::PositiveNumber);
    cmd_serve->callback([&] {
        ServiceConfig cfg;
        cfg.log_path = sv_log;
        if (opt_seed->count()) cfg.seed = sv_seed;
        cfg.static_dir = sv_static;
        cfg.result_limit = sv_limit;
        std::map<Method, RankVector> ranks{{Method::pagerank, load_ranks(sv_pr)},
                                           {Method::xrank, load_ranks(sv_xr)},
                                           {Method::blogrank, load_ranks(sv_br)}};
        Service service(std::make_shared<const TextIndex>(TextIndex::load(sv_index)), std::move(ranks), cfg);
        httplib::Server server;
        service.mount(server);
        fmt::print("listening on {}:{} (seed {})\n", sv_host, sv_port, service.seed());
        std::fflush(stdout);
        if (!server.listen(sv_host, sv_port)) throw IoError(fmt::format("cannot listen on {}:{}", sv_host, sv_port));
    });

    // pipeline
    std::string pl_manifest, pl_input;
    auto* cmd_pipe = app.add_subcommand("pipeline", "Build every artifact from a manifest, skipping up-to-date stages");
    cmd_pipe->add_option("--manifest", pl_manifest, "Manifest JSON (created when --input is given and it is absent)")->required();
    cmd_pipe->add_option("--input", pl_input, "Raw corpus for a new manifest");
    cmd_pipe->callback([&] {
        if (!std::filesystem::exists(pl_manifest)) {
            if (pl_input.empty()) throw InvalidArgument("manifest does not exist; pass --input to create one");
            PipelineManifest m;
            m.input = std::filesystem::absolute(pl_input).string();
            if (const auto dir = std::filesystem::path(pl_manifest).parent_path(); !dir.empty())
                std::filesystem::create_directories(dir);
            m.save(pl_manifest);
        }
        for (const auto& s : run_pipeline(pl_manifest)) fmt::print("{:<16} {}\n", s.stage, s.ran ? "built" : "up to date");
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const PipelineError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kStage;
    } catch (const IoError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kIo;
    } catch (const Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kBadInput;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kFailure;
    }
    return exit_code;
}
