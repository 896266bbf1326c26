#include "blogrank/ingest.hpp"

#include "blogrank/error.hpp"

#include <json.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <fstream>
#include <istream>
#include <ostream>

namespace blogrank {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxDiagnostics = 20;

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::string fold(std::string_view s) {
    std::string out = trim(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); });
    return out;
}

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    const char* b = s.data() + pos;
    const auto [p, ec] = std::from_chars(b, b + len, out);
    return ec == std::errc{} && p == b + len;
}

const json* field(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return nullptr;
    return &*it;
}

std::string require_string(const json& v, const char* key) {
    if (!v.is_string()) throw ParseError(fmt::format("'{}' must be a string", key));
    return v.get<std::string>();
}

std::vector<std::string> string_array(const json& v, const char* key) {
    if (!v.is_array()) throw ParseError(fmt::format("'{}' must be an array of strings", key));
    std::vector<std::string> out;
    for (const auto& e : v) out.push_back(require_string(e, key));
    return out;
}

struct ParsedLine {
    Post post;
    std::size_t dropped_links = 0;
};

ParsedLine parse_post(const json& obj, const HostPatterns& patterns) {
    if (!obj.is_object()) throw ParseError("record is not a JSON object");
    const json* permalink = field(obj, "permalink");
    if (!permalink) throw ParseError("missing 'permalink'");
    const std::string raw = require_string(*permalink, "permalink");
    auto normalized = normalize_url(raw);
    if (!normalized) throw ParseError(fmt::format("malformed permalink '{}'", raw));

    ParsedLine out;
    Post& post = out.post;
    post.permalink = std::move(*normalized);

    if (const json* w = field(obj, "weblog")) {
        std::string weblog = trim(require_string(*w, "weblog"));
        if (weblog.empty()) throw ParseError("empty 'weblog'");
        if (std::any_of(weblog.begin(), weblog.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }))
            throw ParseError(fmt::format("whitespace in weblog '{}'", weblog));
        if (weblog.find("://") != std::string::npos) {
            auto n = normalize_url(weblog);
            if (!n) throw ParseError(fmt::format("malformed weblog '{}'", weblog));
            weblog = n->substr(n->find("://") + 3);
        }
        post.weblog_id = std::move(weblog);
    } else {
        post.weblog_id = patterns.derive_weblog_id(post.permalink);
    }

    if (const json* a = field(obj, "author")) {
        std::string author = trim(require_string(*a, "author"));
        if (!author.empty()) post.author = std::move(author);
    }
    if (const json* ts = field(obj, "ts")) {
        const std::string text = require_string(*ts, "ts");
        auto parsed = parse_timestamp(text);
        if (!parsed) throw ParseError(fmt::format("malformed timestamp '{}'", text));
        post.published_at = *parsed;
    }
    if (const json* tags = field(obj, "tags")) {
        for (const auto& t : string_array(*tags, "tags")) {
            std::string tag = fold(t);
            if (!tag.empty()) post.tags.insert(std::move(tag));
        }
    }
    auto add_links = [&](const char* key, std::set<std::string>& dest) {
        if (const json* links = field(obj, key)) {
            for (const auto& l : string_array(*links, key)) {
                if (auto n = normalize_url(l)) {
                    dest.insert(std::move(*n));
                } else {
                    ++out.dropped_links;
                }
            }
        }
    };
    add_links("post_links", post.post_links);
    add_links("news_links", post.news_links);
    for (const auto& l : post.post_links) post.news_links.erase(l);

    if (const json* c = field(obj, "content")) post.content = require_string(*c, "content");
    return out;
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view iso) {
    using namespace std::chrono;
    const std::string text = trim(iso);
    std::string_view s = text;
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (!read_int(s, 0, 4, y) || !read_int(s, 5, 2, mo) || !read_int(s, 8, 2, d)) return std::nullopt;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;

    std::size_t pos = 10;
    long offset = 0;
    if (pos < s.size()) {
        if (s[pos] != 'T' && s[pos] != 't' && s[pos] != ' ') return std::nullopt;
        ++pos;
        if (!read_int(s, pos, 2, h) || pos + 2 >= s.size() || s[pos + 2] != ':' || !read_int(s, pos + 3, 2, mi))
            return std::nullopt;
        pos += 5;
        if (pos < s.size() && s[pos] == ':') {
            if (!read_int(s, pos + 1, 2, sec)) return std::nullopt;
            pos += 3;
            if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
                ++pos;
                const auto start = pos;
                while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
                if (pos == start) return std::nullopt;
            }
        }
        if (h > 23 || mi > 59 || sec > 60) return std::nullopt;
        if (pos < s.size()) {
            const char z = s[pos];
            if (z == 'Z' || z == 'z') {
                ++pos;
            } else if (z == '+' || z == '-') {
                int oh = 0, om = 0;
                if (!read_int(s, pos + 1, 2, oh)) return std::nullopt;
                pos += 3;
                if (pos < s.size()) {
                    if (s[pos] == ':') ++pos;
                    if (!read_int(s, pos, 2, om)) return std::nullopt;
                    pos += 2;
                }
                if (oh > 23 || om > 59) return std::nullopt;
                offset = (z == '+' ? 1 : -1) * (oh * 3600L + om * 60L);
            } else {
                return std::nullopt;
            }
        }
        if (pos != s.size()) return std::nullopt;
    }
    const auto days = sys_days{ymd}.time_since_epoch().count();
    return static_cast<Timestamp>(days) * 86400 + h * 3600 + mi * 60 + sec - offset;
}

std::string format_timestamp(Timestamp ts) {
    using namespace std::chrono;
    if (ts == kNoTimestamp) return {};
    auto days = ts / 86400;
    auto rem = ts % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    const year_month_day ymd{sys_days{std::chrono::days{days}}};
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", static_cast<int>(ymd.year()),
                       static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), rem / 3600,
                       (rem / 60) % 60, rem % 60);
}

Corpus Corpus::from_posts(std::vector<Post> posts, HostPatterns patterns, std::size_t* duplicates) {
    Corpus c;
    c.patterns_ = std::move(patterns);
    std::size_t dups = 0;
    c.posts_.reserve(posts.size());
    for (auto& p : posts) {
        if (c.by_permalink_.count(p.permalink)) {
            ++dups;
            continue;
        }
        c.by_permalink_.emplace(p.permalink, c.posts_.size());
        c.posts_.push_back(std::move(p));
    }
    std::map<std::string, std::set<std::string>> tag_weblogs;
    for (std::size_t i = 0; i < c.posts_.size(); ++i) {
        const Post& p = c.posts_[i];
        c.weblog_index_[p.weblog_id].push_back(i);
        for (const auto& t : p.tags) tag_weblogs[t].insert(p.weblog_id);
    }
    for (const auto& [tag, weblogs] : tag_weblogs) c.tag_df_.emplace(tag, weblogs.size());
    if (duplicates) *duplicates = dups;
    return c;
}

const Post* Corpus::find(const std::string& permalink) const {
    const auto it = by_permalink_.find(permalink);
    return it == by_permalink_.end() ? nullptr : &posts_[it->second];
}

std::string Corpus::weblog_of(const std::string& permalink) const {
    if (const Post* p = find(permalink)) return p->weblog_id;
    return patterns_.derive_weblog_id(permalink);
}

LoadedCorpus parse_corpus(std::istream& in, const HostPatterns& patterns) {
    LoadedCorpus result;
    IngestReport& report = result.report;
    HostPatterns active = patterns;
    std::vector<Post> posts;
    std::size_t line_no = 0;
    bool first_record = true;

    auto diagnose = [&](std::string msg) {
        if (report.diagnostics.size() < kMaxDiagnostics) report.diagnostics.push_back(fmt::format("line {}: {}", line_no, msg));
    };

    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (trim(line).empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            ++report.read;
            ++report.malformed;
            diagnose(std::string("invalid JSON: ") + e.what());
            first_record = false;
            continue;
        }
        if (first_record && obj.is_object() && obj.contains("host_patterns") && !obj.contains("permalink")) {
            first_record = false;
            try {
                active = HostPatterns(string_array(obj["host_patterns"], "host_patterns"));
            } catch (const ParseError& e) {
                throw ParseError(fmt::format("line {}: bad snapshot header: {}", line_no, e.what()));
            }
            continue;
        }
        first_record = false;
        ++report.read;
        try {
            ParsedLine parsed = parse_post(obj, active);
            report.dropped_links += parsed.dropped_links;
            posts.push_back(std::move(parsed.post));
        } catch (const ParseError& e) {
            ++report.malformed;
            diagnose(e.what());
        }
    }
    if (in.bad()) throw IoError("read failure while loading corpus");
    if (report.read > 0 && report.malformed * 2 > report.read) {
        throw ParseError(fmt::format("corrupt input: {} of {} records malformed{}", report.malformed, report.read,
                                     report.diagnostics.empty() ? "" : " (" + report.diagnostics.front() + ")"));
    }
    result.corpus = Corpus::from_posts(std::move(posts), std::move(active), &report.duplicates);
    report.kept = result.corpus.size();
    report.skipped = report.malformed + report.duplicates;
    return result;
}

LoadedCorpus load_corpus(const std::string& path, const HostPatterns& patterns) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file: " + path);
    return parse_corpus(in, patterns);
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
    out << json{{"host_patterns", corpus.host_patterns().patterns()}}.dump() << '\n';
    for (const Post& p : corpus.posts()) {
        json obj;
        obj["permalink"] = p.permalink;
        obj["weblog"] = p.weblog_id;
        if (p.author) obj["author"] = *p.author;
        if (p.published_at != kNoTimestamp) obj["ts"] = format_timestamp(p.published_at);
        if (!p.tags.empty()) obj["tags"] = p.tags;
        if (!p.post_links.empty()) obj["post_links"] = p.post_links;
        if (!p.news_links.empty()) obj["news_links"] = p.news_links;
        if (p.content) obj["content"] = *p.content;
        out << obj.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    }
}

void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write corpus snapshot: " + path);
    write_corpus(corpus, out);
    if (!out.flush()) throw IoError("write failure: " + path);
}

}  // namespace blogrank
