#include "blogrank/url.hpp"

#include "blogrank/error.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <cctype>
#include <fstream>

namespace blogrank {

namespace {

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }
char upper(char c) { return static_cast<char>(std::toupper(static_cast<unsigned char>(c))); }
bool is_hex(char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; }

bool valid_scheme(std::string_view s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
    });
}

std::string canonical_escapes(std::string_view in) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        const char c = in[i];
        if (c == '%') {
            if (i + 2 < in.size() && is_hex(in[i + 1]) && is_hex(in[i + 2])) {
                out += '%';
                out += upper(in[i + 1]);
                out += upper(in[i + 2]);
                i += 2;
            } else {
                out += "%25";
            }
        } else if (static_cast<unsigned char>(c) <= 0x20 || c == 0x7f) {
            const auto u = static_cast<unsigned char>(c);
            out += '%';
            out += kHex[u >> 4];
            out += kHex[u & 0xf];
        } else {
            out += c;
        }
    }
    return out;
}

std::string default_port(std::string_view scheme) {
    if (scheme == "http" || scheme == "ws") return "80";
    if (scheme == "https" || scheme == "wss") return "443";
    if (scheme == "ftp") return "21";
    return {};
}

std::vector<std::string> split_segments(std::string_view path) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < path.size()) {
        const auto next = path.find('/', pos);
        const auto end = next == std::string_view::npos ? path.size() : next;
        if (end > pos) out.emplace_back(path.substr(pos, end - pos));
        pos = end + 1;
    }
    return out;
}

bool glob_match(const std::string& pattern, const std::string& text) {
    return ::fnmatch(pattern.c_str(), text.c_str(), 0) == 0;
}

}  // namespace

std::optional<std::string> normalize_url(std::string_view raw) {
    while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.front()))) raw.remove_prefix(1);
    while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.back()))) raw.remove_suffix(1);
    if (raw.empty()) return std::nullopt;

    const auto sep = raw.find("://");
    if (sep == std::string_view::npos) return std::nullopt;
    std::string scheme(raw.substr(0, sep));
    if (!valid_scheme(scheme)) return std::nullopt;
    std::transform(scheme.begin(), scheme.end(), scheme.begin(), lower);

    std::string_view rest = raw.substr(sep + 3);
    if (const auto hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);

    const auto auth_end = rest.find_first_of("/?");
    std::string_view authority = rest.substr(0, auth_end);
    std::string_view tail = auth_end == std::string_view::npos ? std::string_view{} : rest.substr(auth_end);

    std::string userinfo;
    if (const auto at = authority.rfind('@'); at != std::string_view::npos) {
        userinfo = std::string(authority.substr(0, at + 1));
        authority = authority.substr(at + 1);
    }
    std::string_view host_view = authority;
    std::string_view port;
    if (const auto colon = authority.rfind(':'); colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
        host_view = authority.substr(0, colon);
        port = authority.substr(colon + 1);
        if (!std::all_of(port.begin(), port.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            return std::nullopt;
    }
    if (host_view.empty()) return std::nullopt;
    if (std::any_of(host_view.begin(), host_view.end(), [](char c) {
            const auto u = static_cast<unsigned char>(c);
            return u <= 0x20 || u == 0x7f || c == '%' || c == '\\';
        }))
        return std::nullopt;

    std::string host(host_view);
    std::transform(host.begin(), host.end(), host.begin(), lower);

    std::string_view path = tail;
    std::string_view query;
    bool has_query = false;
    if (const auto q = tail.find('?'); q != std::string_view::npos) {
        path = tail.substr(0, q);
        query = tail.substr(q + 1);
        has_query = !query.empty();
    }
    std::string canon_path = canonical_escapes(path);
    while (!canon_path.empty() && canon_path.back() == '/') canon_path.pop_back();

    std::string out = scheme + "://" + userinfo + host;
    if (!port.empty() && port != default_port(scheme)) {
        out += ':';
        out += port;
    }
    out += canon_path;
    if (has_query) {
        out += '?';
        out += query;
    }
    return out;
}

UrlParts split_url(std::string_view normalized) {
    UrlParts parts;
    std::string_view rest = normalized;
    if (const auto sep = rest.find("://"); sep != std::string_view::npos) rest = rest.substr(sep + 3);
    const auto auth_end = rest.find_first_of("/?");
    std::string_view authority = rest.substr(0, auth_end);
    if (const auto at = authority.rfind('@'); at != std::string_view::npos) authority = authority.substr(at + 1);
    parts.host = std::string(authority);
    if (auth_end != std::string_view::npos) {
        std::string_view tail = rest.substr(auth_end);
        parts.path = std::string(tail.substr(0, tail.find('?')));
    }
    return parts;
}

HostPatterns::HostPatterns(std::vector<std::string> patterns) : patterns_(std::move(patterns)) {
    for (const auto& p : patterns_) {
        const auto slash = p.find('/');
        Compiled c;
        c.host_glob = p.substr(0, slash);
        std::transform(c.host_glob.begin(), c.host_glob.end(), c.host_glob.begin(), lower);
        if (slash != std::string::npos) c.segment_globs = split_segments(std::string_view(p).substr(slash));
        compiled_.push_back(std::move(c));
    }
}

HostPatterns HostPatterns::defaults() {
    return HostPatterns({"www.livejournal.com/users/*", "*.livejournal.com/users/*", "www.xanga.com/*"});
}

HostPatterns HostPatterns::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open host pattern file: " + path);
    std::vector<std::string> patterns;
    for (std::string line; std::getline(in, line);) {
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
        std::size_t start = 0;
        while (start < line.size() && std::isspace(static_cast<unsigned char>(line[start]))) ++start;
        line.erase(0, start);
        if (line.empty() || line.front() == '#') continue;
        patterns.push_back(line);
    }
    return HostPatterns(std::move(patterns));
}

std::string HostPatterns::derive_weblog_id(std::string_view permalink) const {
    const UrlParts parts = split_url(permalink);
    const auto segments = split_segments(parts.path);
    for (const auto& c : compiled_) {
        if (c.segment_globs.empty() || c.segment_globs.size() > segments.size()) continue;
        if (!glob_match(c.host_glob, parts.host)) continue;
        bool ok = true;
        for (std::size_t i = 0; i < c.segment_globs.size() && ok; ++i) ok = glob_match(c.segment_globs[i], segments[i]);
        if (!ok) continue;
        std::string id = parts.host;
        for (std::size_t i = 0; i < c.segment_globs.size(); ++i) {
            id += '/';
            id += segments[i];
        }
        return id;
    }
    return parts.host;
}

}  // namespace blogrank
