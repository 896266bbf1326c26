#pragma once

#include "blogrank/weblog_graph.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace blogrank {

/// The three ranking configurations compared in the evaluation.
enum class Method { pagerank, xrank, blogrank };

inline constexpr Method kAllMethods[] = {Method::pagerank, Method::xrank, Method::blogrank};

std::string_view method_name(Method m);
/// Accepts `pagerank|xrank|blogrank` and `rank1|rank2|rank3`, case-insensitively.
std::optional<Method> parse_method(std::string_view name);

enum class LinkMode {
    binary,  // every hyperlink edge counts once
    count,   // hyperlink multiplicity
};

struct RankConfig {
    double damping = 0.85;
    double tag_weight = 2.0;
    double author_weight = 1.0;
    double news_weight = 3.0;
    /// Multiplier on the hyperlink term; 1 in every named preset.
    double link_weight = 1.0;
    LinkMode link_mode = LinkMode::count;
    bool include_implicit = true;
    double epsilon = 1e-8;
    int max_iters = 200;

    static RankConfig preset(Method m);
    /// Throws InvalidArgument unless 0 < damping < 1, epsilon > 0, weights >= 0.
    void validate() const;
};

/// Unnormalized transition weight of one edge under `cfg`.
double edge_weight(const EdgeBundle& bundle, const RankConfig& cfg);

struct TransitionRow {
    NodeId src = 0;
    std::vector<std::pair<NodeId, double>> entries;  // (dst, probability), dst ascending
};

struct Transitions {
    std::vector<TransitionRow> rows;  // one per node with positive total weight
    std::vector<NodeId> dangling;     // nodes with zero total weight
};

Transitions build_transitions(const WeblogGraph& graph, const RankConfig& cfg);

/// Scores keyed by weblog id. `ids` is sorted; `scores[i]` belongs to `ids[i]`.
struct RankVector {
    std::vector<std::string> ids;
    std::vector<double> scores;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
    std::vector<double> residual_history;

    std::size_t size() const { return ids.size(); }
    std::optional<double> score(std::string_view id) const;
    double total() const;
};

/// Power iteration from B ≡ 1. Each step computes
///   B'(a) = (1 − E) + E · (Σ_{u→a} p(u→a)·B(u) + D / N)
/// where D is the mass sitting on dangling nodes. Stops once the L1 change
/// drops below epsilon; a run that hits max_iters returns converged = false.
RankVector rank(const WeblogGraph& graph, const RankConfig& cfg);

/// Descending score, ties by ascending id. Throws InvalidArgument for k < 1.
std::vector<std::pair<std::string, double>> top_k(const RankVector& vector, std::size_t k);

struct Overlap {
    std::size_t common = 0;
    double fraction = 0.0;  // common / k
};

/// Throws InvalidArgument when the vectors cover different weblogs.
Overlap overlap_at_k(const RankVector& a, const RankVector& b, std::size_t k);

/// Influence of a news URL: summed score of the weblogs citing it.
std::vector<std::pair<std::string, double>> rank_news_influence(const WeblogGraph& graph, const RankVector& vector);

/// `weblog_id<TAB>score`, descending, scores printed round-trip exact.
void save_ranks(const RankVector& vector, const std::string& path);
RankVector load_ranks(const std::string& path);

}  // namespace blogrank
