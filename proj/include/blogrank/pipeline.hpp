#pragma once

#include "blogrank/error.hpp"
#include "blogrank/ranker.hpp"
#include "blogrank/weblog_graph.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace blogrank {

/// A stage failure; what() carries the stage name and the cause.
class PipelineError : public Error {
public:
    PipelineError(std::string stage, const std::string& cause)
        : Error("stage '" + stage + "' failed: " + cause), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

/// FNV-1a over the bytes of a file; throws IoError when unreadable.
std::uint64_t hash_file(const std::string& path);

/// Artifact paths, stage settings and the input stamp of every built stage.
/// Relative paths are resolved against the manifest's directory.
struct PipelineManifest {
    std::string input;
    std::optional<std::string> host_patterns;
    std::optional<std::string> stoplist;

    std::string corpus = "corpus.snapshot.jsonl";
    std::string graph = "graph.tsv";
    std::map<Method, std::string> ranks = {
        {Method::pagerank, "ranks.pagerank.tsv"}, {Method::xrank, "ranks.xrank.tsv"}, {Method::blogrank, "ranks.blogrank.tsv"}};
    std::string index = "index.json";
    std::string clicks = "clicks.jsonl";

    GraphConfig graph_config;
    RankConfig blogrank_config = RankConfig::preset(Method::blogrank);  // damping/epsilon/max_iters shared by all
    std::map<std::string, std::string> stamps;

    static PipelineManifest load(const std::string& path);
    void save(const std::string& path) const;
};

struct StageOutcome {
    std::string stage;
    bool ran = false;  // false when inputs matched the recorded stamp
};

/// Runs ingest, build-graph, rank ×3 and index in order, skipping stages whose
/// recorded input stamp is unchanged and whose outputs exist. Stamps are
/// written back to the manifest after each completed stage.
std::vector<StageOutcome> run_pipeline(const std::string& manifest_path);

}  // namespace blogrank
