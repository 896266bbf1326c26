#pragma once

#include "blogrank/url.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace blogrank {

/// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

/// Stand-in for posts without a publication time; sorts before every real date.
inline constexpr Timestamp kNoTimestamp = std::numeric_limits<Timestamp>::min();

/// Parses `YYYY-MM-DD[THH:MM[:SS[.frac]]][Z|+HH[:MM]|-HH[:MM]]`.
std::optional<Timestamp> parse_timestamp(std::string_view iso);
/// `YYYY-MM-DDTHH:MM:SSZ`; empty for kNoTimestamp.
std::string format_timestamp(Timestamp ts);

struct Post {
    std::string permalink;
    std::string weblog_id;
    std::optional<std::string> author;
    Timestamp published_at = kNoTimestamp;
    std::set<std::string> tags;
    std::set<std::string> post_links;
    std::set<std::string> news_links;
    std::optional<std::string> content;
};

struct IngestReport {
    std::size_t read = 0;        // non-blank record lines
    std::size_t kept = 0;
    std::size_t skipped = 0;     // malformed + duplicates
    std::size_t malformed = 0;
    std::size_t duplicates = 0;
    std::size_t dropped_links = 0;  // outlinks that failed URL normalization
    std::vector<std::string> diagnostics;  // first few problems, "line N: ..."
};

/// Immutable post collection with its per-weblog and per-tag indexes.
class Corpus {
public:
    Corpus() = default;

    /// Deduplicates by permalink (first occurrence wins) and builds indexes.
    /// Returns the number of duplicates dropped through `duplicates`.
    static Corpus from_posts(std::vector<Post> posts, HostPatterns patterns = {},
                             std::size_t* duplicates = nullptr);

    const std::vector<Post>& posts() const { return posts_; }
    std::size_t size() const { return posts_.size(); }
    bool empty() const { return posts_.empty(); }

    /// weblog_id → indexes into posts(), in input order.
    const std::map<std::string, std::vector<std::size_t>>& weblog_index() const { return weblog_index_; }
    /// tag → number of distinct weblogs using it.
    const std::map<std::string, std::size_t>& tag_df() const { return tag_df_; }

    const Post* find(const std::string& permalink) const;
    const HostPatterns& host_patterns() const { return patterns_; }

    /// Weblog a link target belongs to: the owning post's weblog when the
    /// target is in the corpus, otherwise derived from the URL.
    std::string weblog_of(const std::string& permalink) const;

private:
    std::vector<Post> posts_;
    std::map<std::string, std::vector<std::size_t>> weblog_index_;
    std::map<std::string, std::size_t> tag_df_;
    std::unordered_map<std::string, std::size_t> by_permalink_;
    HostPatterns patterns_;
};

struct LoadedCorpus {
    Corpus corpus;
    IngestReport report;
};

/// Reads line-delimited JSON posts. Throws IoError if the file cannot be read
/// and ParseError if more than half of the record lines are malformed.
LoadedCorpus load_corpus(const std::string& path, const HostPatterns& patterns = HostPatterns::defaults());
LoadedCorpus parse_corpus(std::istream& in, const HostPatterns& patterns = HostPatterns::defaults());

/// Writes a snapshot that `load_corpus` reads back to an identical Corpus.
/// The first line carries the host pattern table.
void save_corpus(const Corpus& corpus, const std::string& path);
void write_corpus(const Corpus& corpus, std::ostream& out);

}  // namespace blogrank
