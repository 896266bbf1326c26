#include "blogrank/evaluation.hpp"

#include "blogrank/error.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace blogrank {

double success_index(std::span<const std::size_t> positions) {
    if (positions.empty()) throw InvalidArgument("success index of an empty click list is undefined");
    const auto n = static_cast<double>(positions.size());
    double sum = 0.0;
    for (std::size_t t = 1; t <= positions.size(); ++t) {
        const std::size_t d = positions[t - 1];
        if (d < 1) throw InvalidArgument("click positions are 1-based");
        sum += (n - static_cast<double>(t) + 1.0) / (static_cast<double>(d) * n);
    }
    return sum / n;
}

std::vector<std::size_t> QuerySession::positions() const {
    std::vector<std::size_t> out;
    std::set<std::size_t> seen;
    for (const auto& c : clicks) {
        if (seen.insert(c.list_position).second) out.push_back(c.list_position);
    }
    return out;
}

std::map<Method, std::vector<double>> si_by_method(std::span<const QuerySession> sessions) {
    std::map<Method, std::vector<double>> out;
    for (const auto& s : sessions) {
        if (!s.has_clicks()) continue;
        const auto pos = s.positions();
        out[s.method].push_back(success_index(pos));
    }
    return out;
}

SiReport aggregate_si(std::span<const QuerySession> sessions) {
    SiReport report;
    for (const auto& s : sessions) report.excluded += s.has_clicks() ? 0 : 1;
    for (const auto& [method, values] : si_by_method(sessions)) {
        MethodSummary m;
        m.count = values.size();
        m.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(m.count);
        if (m.count > 1) {
            double ss = 0.0;
            for (double v : values) ss += (v - m.mean) * (v - m.mean);
            m.stddev = std::sqrt(ss / static_cast<double>(m.count - 1));
        }
        report.methods.emplace(method, m);
    }
    return report;
}

TTestResult t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw InvalidArgument("t-test needs at least two values per group");
    auto moments = [](std::span<const double> v) {
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return std::pair{mean, ss / static_cast<double>(v.size() - 1)};
    };
    const auto [mean_a, var_a] = moments(a);
    const auto [mean_b, var_b] = moments(b);
    const auto na = static_cast<double>(a.size());
    const auto nb = static_cast<double>(b.size());
    const double se_a = var_a / na;
    const double se_b = var_b / nb;

    TTestResult r;
    if (se_a + se_b == 0.0) {
        r.df = na + nb - 2.0;
        if (mean_a == mean_b) {
            r.t = 0.0;
            r.p_two_tailed = 1.0;
        } else {
            r.t = mean_a > mean_b ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
            r.p_two_tailed = 0.0;
        }
        r.p_one_tailed = r.p_two_tailed / 2.0;
        return r;
    }
    r.t = (mean_a - mean_b) / std::sqrt(se_a + se_b);
    r.df = (se_a + se_b) * (se_a + se_b) / (se_a * se_a / (na - 1.0) + se_b * se_b / (nb - 1.0));
    const boost::math::students_t dist(r.df);
    r.p_two_tailed = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t))));
    r.p_one_tailed = r.p_two_tailed / 2.0;
    return r;
}

}  // namespace blogrank
