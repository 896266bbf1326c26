#include "blogrank/click_log.hpp"

#include "blogrank/error.hpp"

#include <json.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

namespace blogrank {

using nlohmann::json;

namespace {

json header_json(const QuerySession& s) {
    json obj{{"query_id", s.query_id}, {"user", s.user}, {"method", std::string(method_name(s.method))},
             {"ts", format_timestamp(s.created_at)}};
    if (!s.query.empty()) obj["query"] = s.query;
    if (s.presented > 0) obj["presented"] = s.presented;
    return obj;
}

json click_json(const ClickRecord& c) {
    return json{{"order", c.click_order}, {"position", c.list_position}, {"permalink", c.permalink}};
}

}  // namespace

std::string session_line(const QuerySession& session) {
    json obj = header_json(session);
    obj["clicks"] = json::array();
    return obj.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string click_line(const QuerySession& session, const ClickRecord& click) {
    json obj = header_json(session);
    if (click.ts != kNoTimestamp) obj["ts"] = format_timestamp(click.ts);
    obj["clicks"] = json::array({click_json(click)});
    return obj.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::vector<QuerySession> parse_click_log(std::istream& in, const std::string& name) {
    std::vector<QuerySession> sessions;
    std::unordered_map<std::string, std::size_t> index;
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fail = [&](const std::string& why) { return ParseError(fmt::format("{}:{}: {}", name, line_no, why)); };
        try {
            const json obj = json::parse(line);
            const auto query_id = obj.at("query_id").get<std::string>();
            const auto method = parse_method(obj.at("method").get<std::string>());
            if (!method) throw fail("unknown method '" + obj.at("method").get<std::string>() + "'");
            const auto user = obj.value("user", std::string{});
            Timestamp ts = kNoTimestamp;
            if (const auto it = obj.find("ts"); it != obj.end() && it->is_string() && !it->get<std::string>().empty()) {
                const auto parsed = parse_timestamp(it->get<std::string>());
                if (!parsed) throw fail("bad timestamp");
                ts = *parsed;
            }

            auto [it, inserted] = index.try_emplace(query_id, sessions.size());
            if (inserted) {
                QuerySession s;
                s.query_id = query_id;
                s.user = user;
                s.method = *method;
                s.created_at = ts;
                sessions.push_back(std::move(s));
            }
            QuerySession& s = sessions[it->second];
            if (s.method != *method) throw fail("method changed within session " + query_id);
            if (s.user != user) throw fail("user changed within session " + query_id);
            if (obj.contains("query")) s.query = obj.at("query").get<std::string>();
            if (obj.contains("presented")) s.presented = obj.at("presented").get<std::size_t>();
            for (const auto& c : obj.value("clicks", json::array())) {
                ClickRecord rec;
                rec.query_id = query_id;
                rec.click_order = c.at("order").get<std::size_t>();
                rec.list_position = c.at("position").get<std::size_t>();
                rec.permalink = c.value("permalink", std::string{});
                rec.ts = ts;
                if (rec.click_order < 1 || rec.list_position < 1) throw fail("click order and position are 1-based");
                s.clicks.push_back(std::move(rec));
            }
        } catch (const json::exception& e) {
            throw fail(e.what());
        }
    }
    for (auto& s : sessions) {
        std::stable_sort(s.clicks.begin(), s.clicks.end(),
                         [](const ClickRecord& a, const ClickRecord& b) { return a.click_order < b.click_order; });
    }
    return sessions;
}

std::vector<QuerySession> read_click_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open click log: " + path);
    return parse_click_log(in, path);
}

void write_click_log(const std::vector<QuerySession>& sessions, std::ostream& out) {
    for (const auto& s : sessions) {
        json obj = header_json(s);
        obj["clicks"] = json::array();
        for (const auto& c : s.clicks) obj["clicks"].push_back(click_json(c));
        out << obj.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    }
}

}  // namespace blogrank
