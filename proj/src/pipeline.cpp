#include "blogrank/pipeline.hpp"

#include "blogrank/ingest.hpp"
#include "blogrank/search_index.hpp"

#include <json.hpp>

#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace blogrank {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

class Stamp {
public:
    Stamp& file(const std::string& path) {
        const std::uint64_t h = hash_file(path);
        return text(fmt::format("{}:{:016x}", fs::path(path).filename().string(), h));
    }
    Stamp& optional_file(const std::string& path) {
        if (fs::exists(path)) return file(path);
        return text(fs::path(path).filename().string() + ":absent");
    }
    Stamp& text(std::string_view s) {
        h_ = fnv1a(h_, s);
        h_ = fnv1a(h_, std::string_view("\x1f", 1));
        return *this;
    }
    std::string str() const { return fmt::format("{:016x}", h_); }

private:
    std::uint64_t h_ = kFnvOffset;
};

json graph_json(const GraphConfig& g) {
    return json{{"min_tags", g.min_shared_tags},
                {"min_authors", g.min_shared_authors},
                {"min_coupling", g.min_coupling},
                {"tag_df_min", g.tag_df_min},
                {"tag_df_max_fraction", g.tag_df_max_fraction}};
}

json rank_json(const RankConfig& r) {
    return json{{"damping", r.damping}, {"epsilon", r.epsilon}, {"max_iters", r.max_iters},
                {"wt", r.tag_weight}, {"wu", r.author_weight}, {"wn", r.news_weight}};
}

std::string resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path.string() : (base / path).lexically_normal().string();
}

RankConfig method_config(const PipelineManifest& m, Method method) {
    RankConfig cfg = RankConfig::preset(method);
    cfg.damping = m.blogrank_config.damping;
    cfg.epsilon = m.blogrank_config.epsilon;
    cfg.max_iters = m.blogrank_config.max_iters;
    if (method == Method::blogrank) {
        cfg.tag_weight = m.blogrank_config.tag_weight;
        cfg.author_weight = m.blogrank_config.author_weight;
        cfg.news_weight = m.blogrank_config.news_weight;
    }
    return cfg;
}

}  // namespace

std::uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::uint64_t h = kFnvOffset;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        h = fnv1a(h, std::string_view(buf, static_cast<std::size_t>(in.gcount())));
    }
    return h;
}

PipelineManifest PipelineManifest::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest: " + path);
    PipelineManifest m;
    try {
        const json root = json::parse(in);
        m.input = root.at("input").get<std::string>();
        if (root.contains("host_patterns") && !root["host_patterns"].is_null()) m.host_patterns = root["host_patterns"].get<std::string>();
        if (root.contains("stoplist") && !root["stoplist"].is_null()) m.stoplist = root["stoplist"].get<std::string>();
        const json outputs = root.value("outputs", json::object());
        m.corpus = outputs.value("corpus", m.corpus);
        m.graph = outputs.value("graph", m.graph);
        m.index = outputs.value("index", m.index);
        m.clicks = outputs.value("clicks", m.clicks);
        if (outputs.contains("ranks")) {
            for (const auto& [name, file] : outputs["ranks"].items()) {
                const auto method = parse_method(name);
                if (!method) throw ParseError(path + ": unknown method '" + name + "'");
                m.ranks[*method] = file.get<std::string>();
            }
        }
        const json g = root.value("graph", json::object());
        m.graph_config.min_shared_tags = g.value("min_tags", m.graph_config.min_shared_tags);
        m.graph_config.min_shared_authors = g.value("min_authors", m.graph_config.min_shared_authors);
        m.graph_config.min_coupling = g.value("min_coupling", m.graph_config.min_coupling);
        m.graph_config.tag_df_min = g.value("tag_df_min", m.graph_config.tag_df_min);
        m.graph_config.tag_df_max_fraction = g.value("tag_df_max_fraction", m.graph_config.tag_df_max_fraction);
        const json r = root.value("rank", json::object());
        m.blogrank_config.damping = r.value("damping", m.blogrank_config.damping);
        m.blogrank_config.epsilon = r.value("epsilon", m.blogrank_config.epsilon);
        m.blogrank_config.max_iters = r.value("max_iters", m.blogrank_config.max_iters);
        m.blogrank_config.tag_weight = r.value("wt", m.blogrank_config.tag_weight);
        m.blogrank_config.author_weight = r.value("wu", m.blogrank_config.author_weight);
        m.blogrank_config.news_weight = r.value("wn", m.blogrank_config.news_weight);
        m.stamps = root.value("stamps", std::map<std::string, std::string>{});
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return m;
}

void PipelineManifest::save(const std::string& path) const {
    json ranks_json = json::object();
    for (const auto& [method, file] : ranks) ranks_json[std::string(method_name(method))] = file;
    const json root{{"input", input},
                    {"host_patterns", host_patterns ? json(*host_patterns) : json(nullptr)},
                    {"stoplist", stoplist ? json(*stoplist) : json(nullptr)},
                    {"outputs", {{"corpus", corpus}, {"graph", graph}, {"ranks", ranks_json}, {"index", index}, {"clicks", clicks}}},
                    {"graph", graph_json(graph_config)},
                    {"rank", rank_json(blogrank_config)},
                    {"stamps", stamps}};
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw IoError("cannot write manifest: " + path);
        out << root.dump(2) << '\n';
        if (!out.flush()) throw IoError("write failure: " + tmp);
    }
    fs::rename(tmp, path);
}

std::vector<StageOutcome> run_pipeline(const std::string& manifest_path) {
    PipelineManifest m = PipelineManifest::load(manifest_path);
    const fs::path base = fs::absolute(manifest_path).parent_path();
    auto at = [&](const std::string& p) { return resolve(base, p); };

    std::vector<StageOutcome> outcomes;
    // Runs `build` unless the stamp of its inputs is unchanged and every output exists.
    auto stage = [&](const std::string& name, const std::vector<std::string>& outputs, auto&& stamp_of, auto&& build) {
        std::string stamp;
        try {
            stamp = stamp_of();
        } catch (const std::exception& e) {
            throw PipelineError(name, e.what());
        }
        const bool fresh = m.stamps.count(name) && m.stamps[name] == stamp &&
                           std::all_of(outputs.begin(), outputs.end(), [](const std::string& p) { return fs::exists(p); });
        if (fresh) {
            outcomes.push_back({name, false});
            return;
        }
        try {
            build();
        } catch (const std::exception& e) {
            throw PipelineError(name, e.what());
        }
        m.stamps[name] = stamp;
        m.save(manifest_path);
        outcomes.push_back({name, true});
    };

    const std::string corpus = at(m.corpus);
    const std::string graph = at(m.graph);
    const std::string index = at(m.index);

    stage(
        "ingest", {corpus},
        [&] {
            Stamp s;
            s.file(at(m.input));
            if (m.host_patterns) s.file(at(*m.host_patterns));
            return s.str();
        },
        [&] {
            const HostPatterns patterns = m.host_patterns ? HostPatterns::load(at(*m.host_patterns)) : HostPatterns::defaults();
            save_corpus(load_corpus(at(m.input), patterns).corpus, corpus);
        });

    stage(
        "build-graph", {graph, graph + ".nodes", graph + ".news"},
        [&] {
            Stamp s;
            s.file(corpus).text(graph_json(m.graph_config).dump());
            if (m.stoplist) s.file(at(*m.stoplist));
            return s.str();
        },
        [&] {
            GraphConfig cfg = m.graph_config;
            if (m.stoplist) cfg.load_stoplist(at(*m.stoplist));
            save_graph(build_weblog_graph(load_corpus(corpus).corpus, cfg), graph);
        });

    for (Method method : kAllMethods) {
        const std::string out = at(m.ranks.at(method));
        const RankConfig cfg = method_config(m, method);
        stage(
            fmt::format("rank-{}", method_name(method)), {out},
            [&] {
                Stamp s;
                s.file(graph).file(graph + ".nodes").optional_file(graph + ".news").text(rank_json(cfg).dump());
                s.text(fmt::format("{}:{}", static_cast<int>(cfg.link_mode), cfg.include_implicit));
                return s.str();
            },
            [&] {
                const RankVector v = rank(load_graph(graph), cfg);
                if (!v.converged)
                    throw Error(fmt::format("no convergence after {} iterations (residual {:g})", v.iterations, v.residual));
                save_ranks(v, out);
            });
    }

    stage(
        "index", {index}, [&] { return Stamp().file(corpus).str(); },
        [&] { build_index(load_corpus(corpus).corpus).save(index); });

    return outcomes;
}

}  // namespace blogrank
