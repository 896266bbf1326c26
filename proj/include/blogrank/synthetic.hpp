#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace blogrank {

/// Knobs of the synthetic corpus. Densities are per-post Poisson means; all
/// zero yields isolated posts.
struct SyntheticParams {
    std::uint64_t seed = 1;
    std::size_t weblogs = 200;
    std::size_t posts = 2000;
    double links_per_post = 0.27;
    double tags_per_post = 1.5;
    double news_per_post = 0.3;
    double authors_per_weblog = 1.5;
    std::size_t tag_vocabulary = 80;
    std::size_t news_pool = 400;
    std::size_t author_pool = 0;          // 0 picks weblogs / 2
    double multi_user_fraction = 0.25;    // weblogs hosted under www.livejournal.com/users/
    double external_link_fraction = 0.1;  // post links leaving the corpus
    double anonymous_fraction = 0.1;
};

/// Writes ingest-format JSONL. Output is a pure function of `params`.
void generate_synthetic(const SyntheticParams& params, std::ostream& out);
void generate_synthetic(const SyntheticParams& params, const std::string& path);

}  // namespace blogrank
