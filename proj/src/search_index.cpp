#include "blogrank/search_index.hpp"

#include "blogrank/error.hpp"

#include <json.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

namespace blogrank {

using nlohmann::json;

namespace {

bool word_byte(unsigned char c) { return c >= 0x80 || std::isalnum(c); }

struct Token {
    std::string text;
    std::size_t offset = 0;
};

std::vector<Token> tokens_with_offsets(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && !word_byte(static_cast<unsigned char>(text[i]))) ++i;
        const std::size_t start = i;
        while (i < text.size() && word_byte(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) {
            Token t{std::string(text.substr(start, i - start)), start};
            std::transform(t.text.begin(), t.text.end(), t.text.begin(),
                           [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); });
            out.push_back(std::move(t));
        }
    }
    return out;
}

bool utf8_continuation(char c) { return (static_cast<unsigned char>(c) & 0xC0) == 0x80; }

// Up to kSnippetLength code points starting a little before the first hit.
std::string make_snippet(const std::string& text, const std::set<std::string>& terms) {
    std::size_t hit = 0;
    for (const auto& tok : tokens_with_offsets(text)) {
        if (terms.count(tok.text)) {
            hit = tok.offset;
            break;
        }
    }
    std::size_t start = hit > 40 ? hit - 40 : 0;
    if (start > 0) {
        const auto space = text.find(' ', start);
        start = space != std::string::npos && space < hit ? space + 1 : hit;
    }
    while (start > 0 && start < text.size() && utf8_continuation(text[start])) --start;
    std::size_t end = start;
    std::size_t chars = 0;
    while (end < text.size() && chars < kSnippetLength) {
        ++end;
        while (end < text.size() && utf8_continuation(text[end])) ++end;
        ++chars;
    }
    return text.substr(start, end - start);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    for (auto& t : tokens_with_offsets(text)) out.push_back(std::move(t.text));
    return out;
}

const std::vector<TextIndex::Posting>& TextIndex::lookup(const std::string& term) const {
    static const std::vector<Posting> kEmpty;
    const auto it = postings_.find(term);
    return it == postings_.end() ? kEmpty : it->second;
}

void TextIndex::add(Document doc) {
    const auto id = static_cast<std::uint32_t>(documents_.size());
    std::map<std::string, std::uint32_t> counts;
    for (auto& tok : tokenize(doc.text)) ++counts[std::move(tok)];
    for (const auto& [term, tf] : counts) postings_[term].push_back(Posting{id, tf});
    documents_.push_back(std::move(doc));
}

TextIndex build_index(const Corpus& corpus) {
    TextIndex index;
    for (const Post& p : corpus.posts()) {
        TextIndex::Document doc{p.permalink, p.weblog_id, p.published_at, {}};
        if (p.content && !p.content->empty()) {
            doc.text = *p.content;
        } else {
            for (const auto& tag : p.tags) {
                if (!doc.text.empty()) doc.text += ' ';
                doc.text += tag;
            }
        }
        index.add(std::move(doc));
    }
    return index;
}

void TextIndex::save(const std::string& path) const {
    json docs = json::array();
    for (const auto& d : documents_) {
        json ts = d.published_at == kNoTimestamp ? json(nullptr) : json(d.published_at);
        docs.push_back({{"permalink", d.permalink}, {"weblog", d.weblog_id}, {"ts", ts}, {"text", d.text}});
    }
    json postings = json::object();
    for (const auto& [term, list] : postings_) {
        json entries = json::array();
        for (const auto& p : list) entries.push_back({p.doc, p.term_frequency});
        postings[term] = std::move(entries);
    }
    const json root{{"format", "blogrank-index"}, {"version", 1}, {"documents", docs}, {"postings", postings}};
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write index: " + path);
    out << root.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    if (!out.flush()) throw IoError("write failure: " + path);
}

TextIndex TextIndex::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open index: " + path);
    TextIndex index;
    try {
        const json root = json::parse(in);
        if (root.value("format", "") != "blogrank-index") throw ParseError(path + ": not a blogrank index");
        for (const auto& d : root.at("documents")) {
            const auto& ts = d.at("ts");
            index.documents_.push_back(Document{d.at("permalink").get<std::string>(), d.at("weblog").get<std::string>(),
                                                ts.is_null() ? kNoTimestamp : ts.get<Timestamp>(),
                                                d.at("text").get<std::string>()});
        }
        for (const auto& [term, entries] : root.at("postings").items()) {
            auto& list = index.postings_[term];
            for (const auto& e : entries) {
                Posting p{e.at(0).get<std::uint32_t>(), e.at(1).get<std::uint32_t>()};
                if (p.doc >= index.documents_.size() || (!list.empty() && list.back().doc >= p.doc))
                    throw ParseError(fmt::format("{}: bad posting for term '{}'", path, term));
                list.push_back(p);
            }
        }
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return index;
}

bool presented_before(const SearchResult& a, const SearchResult& b) {
    if (a.weblog_score != b.weblog_score) return a.weblog_score > b.weblog_score;
    if (a.published_at != b.published_at) return a.published_at > b.published_at;
    return a.permalink < b.permalink;
}

std::vector<SearchResult> search(const TextIndex& index, std::string_view query, const RankVector& ranks,
                                 std::size_t limit) {
    if (limit < 1) throw InvalidArgument("search limit must be at least 1");
    const auto tokens = tokenize(query);
    const std::set<std::string> terms(tokens.begin(), tokens.end());
    if (terms.empty()) throw InvalidArgument("empty query");

    std::vector<const std::vector<TextIndex::Posting>*> lists;
    for (const auto& t : terms) lists.push_back(&index.lookup(t));
    std::sort(lists.begin(), lists.end(), [](const auto* a, const auto* b) { return a->size() < b->size(); });

    struct Candidate {
        std::uint32_t doc;
        std::uint64_t matches;
    };
    std::vector<Candidate> candidates;
    for (const auto& p : *lists.front()) candidates.push_back({p.doc, p.term_frequency});
    for (std::size_t li = 1; li < lists.size() && !candidates.empty(); ++li) {
        const auto& list = *lists[li];
        std::vector<Candidate> kept;
        auto it = list.begin();
        for (const auto& c : candidates) {
            it = std::lower_bound(it, list.end(), c.doc, [](const TextIndex::Posting& p, std::uint32_t d) { return p.doc < d; });
            if (it == list.end()) break;
            if (it->doc == c.doc) kept.push_back({c.doc, c.matches + it->term_frequency});
        }
        candidates.swap(kept);
    }

    const auto& docs = index.documents();
    if (candidates.size() > limit) {
        auto first = [&](const Candidate& a, const Candidate& b) {
            if (a.matches != b.matches) return a.matches > b.matches;
            const auto& da = docs[a.doc];
            const auto& db = docs[b.doc];
            if (da.published_at != db.published_at) return da.published_at > db.published_at;
            return da.permalink < db.permalink;
        };
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(limit), candidates.end(), first);
        candidates.resize(limit);
    }

    std::vector<SearchResult> results;
    results.reserve(candidates.size());
    for (const auto& c : candidates) {
        const auto& d = docs[c.doc];
        SearchResult r;
        r.permalink = d.permalink;
        r.weblog_id = d.weblog_id;
        r.weblog_score = ranks.score(d.weblog_id).value_or(0.0);
        r.published_at = d.published_at;
        r.snippet = make_snippet(d.text, terms);
        results.push_back(std::move(r));
    }
    std::sort(results.begin(), results.end(), presented_before);
    for (std::size_t i = 0; i < results.size(); ++i) results[i].position = i + 1;
    return results;
}

}  // namespace blogrank
