#pragma once

#include "blogrank/evaluation.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace blogrank {

// Click log: one JSON object per line,
//   {"query_id", "user", "method", "ts", "query"?, "presented"?, "clicks": [{"order", "position", "permalink"}]}
// Several lines may share a query_id; their clicks are merged. A line with an
// empty click array records a query that was shown but not (yet) clicked.

/// Serializes a session header line with no clicks.
std::string session_line(const QuerySession& session);
/// Serializes one click of `session` as its own line.
std::string click_line(const QuerySession& session, const ClickRecord& click);

/// Sessions in first-appearance order, clicks sorted by click order.
/// Throws ParseError on malformed lines or conflicting session metadata.
std::vector<QuerySession> parse_click_log(std::istream& in, const std::string& name = "<click log>");
std::vector<QuerySession> read_click_log(const std::string& path);

/// Writes each session as a single line.
void write_click_log(const std::vector<QuerySession>& sessions, std::ostream& out);

}  // namespace blogrank
