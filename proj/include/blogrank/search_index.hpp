#pragma once

#include "blogrank/ingest.hpp"
#include "blogrank/ranker.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace blogrank {

/// Case-folded tokens split at ASCII punctuation and whitespace. Bytes outside
/// ASCII are kept inside tokens so UTF-8 words survive intact.
std::vector<std::string> tokenize(std::string_view text);

struct SearchResult {
    std::string permalink;
    std::string weblog_id;
    double weblog_score = 0.0;
    Timestamp published_at = kNoTimestamp;
    std::string snippet;
    std::size_t position = 0;  // 1-based
};

/// Inverted index over post text; posts without content are indexed by tags.
class TextIndex {
public:
    struct Document {
        std::string permalink;
        std::string weblog_id;
        Timestamp published_at = kNoTimestamp;
        std::string text;
    };
    struct Posting {
        std::uint32_t doc = 0;
        std::uint32_t term_frequency = 0;
    };

    const std::vector<Document>& documents() const { return documents_; }
    const std::map<std::string, std::vector<Posting>>& postings() const { return postings_; }
    std::size_t size() const { return documents_.size(); }
    bool empty() const { return documents_.empty(); }

    /// Postings of one term, or an empty list.
    const std::vector<Posting>& lookup(const std::string& term) const;

    void add(Document doc);

    void save(const std::string& path) const;
    static TextIndex load(const std::string& path);

private:
    std::vector<Document> documents_;
    std::map<std::string, std::vector<Posting>> postings_;
};

TextIndex build_index(const Corpus& corpus);

inline constexpr std::size_t kDefaultSearchLimit = 1000;
inline constexpr std::size_t kSnippetLength = 200;

/// Posts containing every query term, ordered by weblog score (desc), then
/// publication time (newest first), then permalink. When more than `limit`
/// posts match, the ones kept are those with the most term occurrences, then
/// the newest. Throws InvalidArgument for an empty query or a zero limit.
std::vector<SearchResult> search(const TextIndex& index, std::string_view query, const RankVector& ranks,
                                 std::size_t limit = kDefaultSearchLimit);

/// The result comparator: true when `a` is presented before `b`.
bool presented_before(const SearchResult& a, const SearchResult& b);

}  // namespace blogrank
