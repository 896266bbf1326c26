#include "blogrank/synthetic.hpp"

#include "blogrank/error.hpp"
#include "blogrank/ingest.hpp"

#include <json.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <vector>

namespace blogrank {

namespace {

constexpr const char* kWords[] = {
    "election", "music", "photo", "travel", "recipe", "game", "movie", "book", "science", "space",
    "quantum", "politics", "market", "stock", "phone", "camera", "linux", "code", "design", "garden",
    "football", "weather", "storm", "coffee", "tea", "school", "exam", "concert", "album", "guitar",
    "london", "paris", "athens", "tokyo", "festival", "health", "diet", "running", "bicycle", "car",
    "review", "opinion", "news", "war", "peace", "economy", "oil", "energy", "climate", "vote",
    "today", "really", "think", "people", "great", "new", "first", "world", "friend", "family",
};
constexpr std::size_t kWordCount = std::size(kWords);

std::vector<double> zipf_weights(std::size_t n, double exponent) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / std::pow(static_cast<double>(i + 1), exponent);
    return w;
}

template <typename Rng>
std::size_t poisson(Rng& rng, double mean) {
    if (mean <= 0.0) return 0;
    return std::poisson_distribution<std::size_t>(mean)(rng);
}

}  // namespace

void generate_synthetic(const SyntheticParams& p, std::ostream& out) {
    if (p.weblogs == 0) throw InvalidArgument("synthetic corpus needs at least one weblog");
    std::mt19937_64 rng(p.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const std::size_t author_pool = p.author_pool > 0 ? p.author_pool : std::max<std::size_t>(2, p.weblogs / 2);
    const std::size_t tag_vocab = std::max<std::size_t>(1, p.tag_vocabulary);
    const std::size_t news_pool = std::max<std::size_t>(1, p.news_pool);
    const std::size_t topics = std::max<std::size_t>(1, tag_vocab / 6);

    struct Blog {
        std::string base;
        std::vector<std::string> authors;
        std::size_t topic = 0;
        std::vector<std::size_t> posts;
    };
    std::vector<Blog> blogs(p.weblogs);
    const auto author_weights = zipf_weights(author_pool, 0.7);
    std::discrete_distribution<std::size_t> pick_author(author_weights.begin(), author_weights.end());
    for (std::size_t i = 0; i < p.weblogs; ++i) {
        Blog& b = blogs[i];
        b.base = unit(rng) < p.multi_user_fraction ? fmt::format("http://www.livejournal.com/users/user{}", i)
                                                   : fmt::format("http://blog{}.example.com", i);
        b.topic = static_cast<std::size_t>(unit(rng) * static_cast<double>(topics)) % topics;
        const std::size_t n_authors = std::max<std::size_t>(1, poisson(rng, p.authors_per_weblog));
        std::set<std::string> names;
        for (std::size_t a = 0; a < n_authors; ++a) names.insert(fmt::format("author{}", pick_author(rng)));
        if (unit(rng) < 0.05) names.insert("admin");
        b.authors.assign(names.begin(), names.end());
    }

    const auto blog_weights = zipf_weights(p.weblogs, 0.8);
    std::discrete_distribution<std::size_t> pick_blog(blog_weights.begin(), blog_weights.end());
    const auto tag_weights = zipf_weights(tag_vocab, 1.0);
    std::discrete_distribution<std::size_t> pick_tag(tag_weights.begin(), tag_weights.end());
    const auto news_weights = zipf_weights(news_pool, 1.0);
    std::discrete_distribution<std::size_t> pick_news(news_weights.begin(), news_weights.end());
    const auto word_weights = zipf_weights(kWordCount, 0.9);
    std::discrete_distribution<std::size_t> pick_word(word_weights.begin(), word_weights.end());

    const Timestamp start = *parse_timestamp("2006-01-01T00:00:00Z");
    std::vector<std::string> permalinks;
    permalinks.reserve(p.posts);

    for (std::size_t k = 0; k < p.posts; ++k) {
        const std::size_t bi = pick_blog(rng);
        Blog& b = blogs[bi];
        const Timestamp ts = start + static_cast<Timestamp>(unit(rng) * 180.0 * 86400.0);
        const std::string date = format_timestamp(ts);
        const std::string permalink = fmt::format("{}/{}/{}/post-{}.html", b.base, date.substr(0, 4), date.substr(5, 2), k);

        nlohmann::json rec;
        rec["permalink"] = permalink;
        rec["ts"] = date;
        if (unit(rng) >= p.anonymous_fraction) {
            rec["author"] = b.authors[static_cast<std::size_t>(unit(rng) * static_cast<double>(b.authors.size())) % b.authors.size()];
        }

        std::set<std::string> tags;
        for (std::size_t t = poisson(rng, p.tags_per_post); t > 0; --t) {
            // Most tags come from the weblog's own topic cluster.
            const std::size_t tag = unit(rng) < 0.7 ? (b.topic * 6 + static_cast<std::size_t>(unit(rng) * 6.0)) % tag_vocab
                                                    : pick_tag(rng);
            tags.insert(fmt::format("tag{}", tag));
        }
        if (!tags.empty()) rec["tags"] = tags;

        std::set<std::string> links;
        for (std::size_t l = poisson(rng, p.links_per_post); l > 0; --l) {
            if (unit(rng) < p.external_link_fraction || permalinks.empty()) {
                links.insert(fmt::format("http://outside{}.example.net/p{}.html", pick_blog(rng), k));
            } else {
                const Blog& target = blogs[pick_blog(rng)];
                if (!target.posts.empty()) {
                    const auto j = static_cast<std::size_t>(unit(rng) * static_cast<double>(target.posts.size()));
                    links.insert(permalinks[target.posts[std::min(j, target.posts.size() - 1)]]);
                } else {
                    const auto j = static_cast<std::size_t>(unit(rng) * static_cast<double>(permalinks.size()));
                    links.insert(permalinks[std::min(j, permalinks.size() - 1)]);
                }
            }
        }
        links.erase(permalink);
        if (!links.empty()) rec["post_links"] = links;

        std::set<std::string> news;
        for (std::size_t n = poisson(rng, p.news_per_post); n > 0; --n) {
            const std::size_t story = unit(rng) < 0.5 ? (b.topic * 7 + static_cast<std::size_t>(unit(rng) * 7.0)) % news_pool
                                                      : pick_news(rng);
            news.insert(fmt::format("http://news.example.org/story/{}", story));
        }
        if (!news.empty()) rec["news_links"] = news;

        std::string content;
        const std::size_t words = 8 + static_cast<std::size_t>(unit(rng) * 24.0);
        for (std::size_t w = 0; w < words; ++w) {
            if (!content.empty()) content += ' ';
            content += kWords[pick_word(rng)];
        }
        for (const auto& t : tags) content += " " + t;
        rec["content"] = content;

        out << rec.dump() << '\n';
        b.posts.push_back(permalinks.size());
        permalinks.push_back(permalink);
    }
}

void generate_synthetic(const SyntheticParams& params, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write synthetic corpus: " + path);
    generate_synthetic(params, out);
    if (!out.flush()) throw IoError("write failure: " + path);
}

}  // namespace blogrank
