#pragma once

#include "blogrank/click_log.hpp"
#include "blogrank/evaluation.hpp"
#include "blogrank/ranker.hpp"
#include "blogrank/search_index.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace httplib {
class Server;
}

namespace blogrank {

/// Per-method SI summary plus pairwise Welch tests, as served by /api/metrics
/// and printed by `blogrank eval si`.
nlohmann::json si_report_json(std::span<const QuerySession> sessions);

/// Append-only line log; every append is flushed to disk before returning.
class AppendLog {
public:
    explicit AppendLog(std::string path);
    ~AppendLog();
    AppendLog(const AppendLog&) = delete;
    AppendLog& operator=(const AppendLog&) = delete;

    void append(const std::string& line);
    const std::string& path() const { return path_; }

private:
    std::string path_;
    int fd_ = -1;
};

struct ServiceConfig {
    std::string log_path;
    std::optional<std::uint64_t> seed;   // unseeded runs draw from std::random_device
    std::size_t result_limit = kDefaultSearchLimit;
    std::string static_dir;              // optional web UI bundle
};

/// Blind evaluation service: each query is ranked by a randomly drawn method
/// that is logged but never returned to the client.
class Service {
public:
    struct Response {
        int status = 200;
        nlohmann::json body;
    };

    /// Replays an existing click log so earlier sessions and clicks survive restarts.
    Service(std::shared_ptr<const TextIndex> index, std::map<Method, RankVector> ranks, ServiceConfig cfg);

    Response search(const std::string& query, const std::string& user);
    Response click(const std::string& query_id, long long position, const std::string& permalink);
    Response click_json(const std::string& body);
    Response metrics() const;

    /// Routes /api/search, /api/click, /api/metrics and the static bundle.
    void mount(httplib::Server& server);

    std::uint64_t seed() const { return seed_; }
    std::vector<QuerySession> sessions() const;

private:
    struct Live {
        QuerySession session;
        std::vector<std::string> presented;  // permalinks by position; empty after replay
    };

    std::shared_ptr<const TextIndex> index_;
    std::map<Method, RankVector> ranks_;
    std::vector<Method> enabled_;
    ServiceConfig cfg_;
    std::uint64_t seed_ = 0;

    mutable std::mutex mutex_;
    std::mt19937_64 method_rng_;
    std::mt19937_64 id_rng_;
    std::uint64_t draws_ = 0;
    std::vector<Live> live_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::set<std::string> pending_;
    std::unique_ptr<AppendLog> log_;
    std::unique_ptr<AppendLog> assignments_;
};

}  // namespace blogrank
