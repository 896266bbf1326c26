#include "blogrank/service.hpp"

#include "blogrank/error.hpp"

#include <httplib.h>

#include <fmt/format.h>

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <chrono>
#include <cstring>
#include <fstream>

namespace blogrank {

using nlohmann::json;

namespace {

Timestamp now_seconds() {
    return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
}

Service::Response error_response(int status, const std::string& message) {
    return Service::Response{status, json{{"error", message}}};
}

constexpr std::pair<Method, Method> kComparisons[] = {
    {Method::pagerank, Method::xrank}, {Method::xrank, Method::blogrank}, {Method::pagerank, Method::blogrank}};

}  // namespace

json si_report_json(std::span<const QuerySession> sessions) {
    const SiReport report = aggregate_si(sessions);
    const auto values = si_by_method(sessions);
    json methods = json::object();
    for (Method m : kAllMethods) {
        const auto it = report.methods.find(m);
        const MethodSummary s = it == report.methods.end() ? MethodSummary{} : it->second;
        methods[std::string(method_name(m))] = {{"count", s.count}, {"mean", s.mean}, {"stddev", s.stddev}};
    }
    json tests = json::array();
    for (const auto& [a, b] : kComparisons) {
        json entry{{"a", std::string(method_name(a))}, {"b", std::string(method_name(b))}};
        const auto ia = values.find(a);
        const auto ib = values.find(b);
        if (ia == values.end() || ib == values.end() || ia->second.size() < 2 || ib->second.size() < 2) {
            entry["error"] = "insufficient data";
        } else {
            const TTestResult r = t_test(ia->second, ib->second);
            auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
            entry["t"] = finite_or_null(r.t);
            entry["df"] = r.df;
            entry["p_two_tailed"] = r.p_two_tailed;
            entry["p_one_tailed"] = r.p_one_tailed;
        }
        tests.push_back(std::move(entry));
    }
    return json{{"sessions", sessions.size()}, {"excluded", report.excluded}, {"methods", methods}, {"ttests", tests}};
}

AppendLog::AppendLog(std::string path) : path_(std::move(path)) {
    fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) throw IoError(fmt::format("cannot open log {}: {}", path_, std::strerror(errno)));
}

AppendLog::~AppendLog() {
    if (fd_ >= 0) ::close(fd_);
}

void AppendLog::append(const std::string& line) {
    const std::string data = line + '\n';
    std::size_t written = 0;
    while (written < data.size()) {
        const auto n = ::write(fd_, data.data() + written, data.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw IoError(fmt::format("append to {} failed: {}", path_, std::strerror(errno)));
        }
        written += static_cast<std::size_t>(n);
    }
    if (::fdatasync(fd_) != 0) throw IoError(fmt::format("sync of {} failed: {}", path_, std::strerror(errno)));
}

Service::Service(std::shared_ptr<const TextIndex> index, std::map<Method, RankVector> ranks, ServiceConfig cfg)
    : index_(std::move(index)), ranks_(std::move(ranks)), cfg_(std::move(cfg)) {
    for (Method m : kAllMethods) {
        if (ranks_.count(m)) enabled_.push_back(m);
    }
    seed_ = cfg_.seed ? *cfg_.seed : (static_cast<std::uint64_t>(std::random_device{}()) << 32) ^ std::random_device{}();
    method_rng_.seed(seed_);
    id_rng_.seed(seed_ ^ 0x9E3779B97F4A7C15ull);

    if (cfg_.log_path.empty()) return;
    {
        std::ifstream existing(cfg_.log_path);
        if (existing) {
            for (auto& s : parse_click_log(existing, cfg_.log_path)) {
                by_id_.emplace(s.query_id, live_.size());
                live_.push_back(Live{std::move(s), {}});
            }
        }
    }
    log_ = std::make_unique<AppendLog>(cfg_.log_path);
    assignments_ = std::make_unique<AppendLog>(cfg_.log_path + ".assignments");
}

Service::Response Service::search(const std::string& query, const std::string& user) {
    if (tokenize(query).empty()) return error_response(400, "empty query");
    if (!index_ || enabled_.empty()) return error_response(503, "index or rankings unavailable");

    Method method;
    std::uint64_t draw = 0;
    std::string query_id;
    {
        std::lock_guard lock(mutex_);
        std::uniform_int_distribution<std::size_t> pick(0, enabled_.size() - 1);
        method = enabled_[pick(method_rng_)];
        draw = draws_++;
        do {
            query_id = fmt::format("{:016x}", id_rng_());
        } while (by_id_.count(query_id) || pending_.count(query_id));
        pending_.insert(query_id);
    }

    // Ranking state is immutable, so the search itself runs unlocked.
    std::vector<SearchResult> results;
    try {
        results = blogrank::search(*index_, query, ranks_.at(method), cfg_.result_limit);
    } catch (...) {
        std::lock_guard lock(mutex_);
        pending_.erase(query_id);
        throw;
    }

    Live live;
    live.session.query_id = query_id;
    live.session.query = query;
    live.session.user = user;
    live.session.method = method;
    live.session.presented = results.size();
    live.session.created_at = now_seconds();
    for (const auto& r : results) live.presented.push_back(r.permalink);

    std::lock_guard lock(mutex_);
    pending_.erase(query_id);

    if (assignments_) {
        assignments_->append(json{{"query_id", query_id},
                                  {"method", std::string(method_name(method))},
                                  {"seed", seed_},
                                  {"draw", draw},
                                  {"ts", format_timestamp(live.session.created_at)}}
                                 .dump());
    }
    if (log_) log_->append(session_line(live.session));
    by_id_.emplace(query_id, live_.size());
    live_.push_back(std::move(live));

    json items = json::array();
    for (const auto& r : results) {
        items.push_back({{"position", r.position},
                         {"permalink", r.permalink},
                         {"weblog", r.weblog_id},
                         {"snippet", r.snippet},
                         {"ts", format_timestamp(r.published_at)}});
    }
    return Response{200, json{{"query_id", query_id}, {"results", std::move(items)}}};
}

Service::Response Service::click(const std::string& query_id, long long position, const std::string& permalink) {
    std::lock_guard lock(mutex_);
    const auto it = by_id_.find(query_id);
    if (it == by_id_.end()) return error_response(404, "unknown query_id");
    Live& live = live_[it->second];
    QuerySession& s = live.session;
    if (position < 1 || static_cast<std::size_t>(position) > s.presented)
        return error_response(400, fmt::format("position {} outside 1..{}", position, s.presented));
    const auto pos = static_cast<std::size_t>(position);

    std::string target = permalink;
    if (!live.presented.empty()) {
        const std::string& shown = live.presented[pos - 1];
        if (!target.empty() && target != shown) return error_response(400, "permalink does not match position");
        target = shown;
    }
    for (const auto& c : s.clicks) {
        if (c.list_position == pos) return Response{200, json{{"ok", true}, {"duplicate", true}, {"order", c.click_order}}};
    }
    ClickRecord rec;
    rec.query_id = query_id;
    rec.click_order = s.clicks.size() + 1;
    rec.list_position = pos;
    rec.permalink = target;
    rec.ts = now_seconds();
    if (log_) log_->append(click_line(s, rec));
    s.clicks.push_back(rec);
    return Response{200, json{{"ok", true}, {"duplicate", false}, {"order", rec.click_order}}};
}

Service::Response Service::click_json(const std::string& body) {
    json obj;
    try {
        obj = json::parse(body);
    } catch (const json::exception&) {
        return error_response(400, "body is not JSON");
    }
    if (!obj.is_object() || !obj.contains("query_id") || !obj["query_id"].is_string() || !obj.contains("position") ||
        !obj["position"].is_number_integer())
        return error_response(400, "expected {query_id, position, permalink}");
    std::string permalink;
    if (obj.contains("permalink") && obj["permalink"].is_string()) permalink = obj["permalink"].get<std::string>();
    return click(obj["query_id"].get<std::string>(), obj["position"].get<long long>(), permalink);
}

std::vector<QuerySession> Service::sessions() const {
    std::lock_guard lock(mutex_);
    std::vector<QuerySession> out;
    out.reserve(live_.size());
    for (const auto& l : live_) out.push_back(l.session);
    return out;
}

Service::Response Service::metrics() const {
    const auto all = sessions();
    return Response{200, si_report_json(all)};
}

void Service::mount(httplib::Server& server) {
    auto reply = [](httplib::Response& res, const Response& r) {
        res.status = r.status;
        res.set_content(r.body.dump(-1, ' ', false, json::error_handler_t::replace), "application/json");
    };
    server.Get("/api/search", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, search(req.get_param_value("q"), req.get_param_value("user")));
    });
    server.Post("/api/click", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, click_json(req.body));
    });
    server.Get("/api/metrics", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, metrics()); });
    if (!cfg_.static_dir.empty() && !server.set_mount_point("/", cfg_.static_dir))
        throw IoError("static directory not found: " + cfg_.static_dir);
}

}  // namespace blogrank
