#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace blogrank {

/// Canonical form of an absolute URL.
///
/// Scheme and host are lowercased, the default port and a trailing slash are
/// removed, the fragment is stripped, the query string is kept verbatim and
/// percent escapes are rewritten with uppercase hex digits. Returns nullopt
/// when the input is not an absolute `scheme://host[...]` URL.
std::optional<std::string> normalize_url(std::string_view raw);

/// Host and path split of an already normalized URL.
struct UrlParts {
    std::string host;   // without port
    std::string path;   // starts with '/' or is empty
};

UrlParts split_url(std::string_view normalized);

/// Table of multi-user hosting patterns.
///
/// Each pattern is `<host-glob>/<segment-glob>/...`; a URL whose host and
/// leading path segments match gets a weblog id made of the host plus as many
/// path segments as the pattern names. `www.livejournal.com/users/*` maps
/// `/users/grahame/123.html` to `www.livejournal.com/users/grahame`.
class HostPatterns {
public:
    HostPatterns() = default;
    explicit HostPatterns(std::vector<std::string> patterns);

    /// Built-in table used when no pattern file is given.
    static HostPatterns defaults();
    /// One glob per line; blank lines and `#` comments ignored.
    static HostPatterns load(const std::string& path);

    const std::vector<std::string>& patterns() const { return patterns_; }

    /// Weblog identity of a normalized permalink. Falls back to the host.
    std::string derive_weblog_id(std::string_view permalink) const;

private:
    struct Compiled {
        std::string host_glob;
        std::vector<std::string> segment_globs;
    };
    std::vector<std::string> patterns_;
    std::vector<Compiled> compiled_;
};

/// Shorthand for `patterns.derive_weblog_id(permalink)`.
inline std::string derive_weblog_id(std::string_view permalink, const HostPatterns& patterns) {
    return patterns.derive_weblog_id(permalink);
}

}  // namespace blogrank
