#pragma once

#include "blogrank/ingest.hpp"
#include "blogrank/ranker.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace blogrank {

/// Success Index of one query: positions[t-1] is the list position of the
/// t-th selected post. SI = (1/n) Σ (n − t + 1) / (d_t · n).
/// Throws InvalidArgument for an empty list or a position below 1.
double success_index(std::span<const std::size_t> positions);

struct ClickRecord {
    std::string query_id;
    std::size_t click_order = 0;     // 1-based arrival order
    std::size_t list_position = 0;   // 1-based position in the presented list
    std::string permalink;
    Timestamp ts = kNoTimestamp;
};

struct QuerySession {
    std::string query_id;
    std::string query;
    std::string user;
    Method method = Method::pagerank;
    std::size_t presented = 0;
    Timestamp created_at = kNoTimestamp;
    std::vector<ClickRecord> clicks;  // by click_order

    /// Click positions in click order, repeated positions dropped after their first click.
    std::vector<std::size_t> positions() const;
    bool has_clicks() const { return !clicks.empty(); }
};

struct MethodSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation; 0 when count < 2
};

struct SiReport {
    std::map<Method, MethodSummary> methods;  // only methods with clicked sessions
    std::size_t excluded = 0;                 // sessions without clicks
};

/// Per-method SI values of the sessions that have clicks.
std::map<Method, std::vector<double>> si_by_method(std::span<const QuerySession> sessions);

SiReport aggregate_si(std::span<const QuerySession> sessions);

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p_two_tailed = 1.0;
    double p_one_tailed = 0.5;  // half the two-tailed value
};

/// Welch's unequal-variance t-test. Needs at least two values per group;
/// two constant groups give t = 0 and p = 1 when their means agree.
TTestResult t_test(std::span<const double> a, std::span<const double> b);

}  // namespace blogrank
