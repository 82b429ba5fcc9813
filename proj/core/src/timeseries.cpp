#include "sentipred/timeseries.hpp"

#include <cmath>
#include <stdexcept>

#include "sentipred/stats.hpp"

namespace sentipred {

namespace {

bool is_constant(const std::vector<double>& x) {
    for (double v : x)
        if (v != x.front()) return false;
    return true;
}

CorrelationPoint correlate_at(const std::vector<double>& x, const std::vector<double>& y,
                              int lag) {
    // Pairs (x[t + lag], y[t]) over the overlap.
    const int n = static_cast<int>(y.size());
    std::vector<double> xs, ys;
    xs.reserve(n);
    ys.reserve(n);
    for (int t = 0; t < n; ++t) {
        const int s = t + lag;
        if (s < 0 || s >= static_cast<int>(x.size())) continue;
        xs.push_back(x[s]);
        ys.push_back(y[t]);
    }
    CorrelationPoint p;
    p.lag = lag;
    if (xs.size() < 2) return p;
    p.r = stats::pearson(xs, ys);
    p.band = 1.96 / std::sqrt(static_cast<double>(xs.size()));
    p.significant = std::fabs(p.r) > p.band;
    return p;
}

}  // namespace

void validate_series(const Series& s) {
    if (s.dates.size() != s.values.size())
        throw std::runtime_error("series '" + s.name + "': dates and values lengths differ");
    for (std::size_t i = 1; i < s.dates.size(); ++i)
        if (!(s.dates[i - 1] < s.dates[i]))
            throw std::runtime_error("series '" + s.name + "': dates not strictly increasing");
}

Series daily_return(const Series& close) {
    if (close.size() < 2)
        throw std::runtime_error("daily_return: need at least two closes");
    Series out;
    out.name = close.name.empty() ? "return" : close.name + "_return";
    out.dates.assign(close.dates.begin() + 1, close.dates.end());
    out.values.reserve(close.size() - 1);
    for (std::size_t i = 1; i < close.size(); ++i) {
        if (!(close.values[i - 1] > 0.0))
            throw std::runtime_error("daily_return: non-positive close at index " +
                                     std::to_string(i - 1));
        out.values.push_back((close.values[i] - close.values[i - 1]) / close.values[i - 1]);
    }
    return out;
}

std::vector<CorrelationPoint> acf(const std::vector<double>& x, int max_lag) {
    if (max_lag < 1) throw std::runtime_error("acf: max_lag must be at least 1");
    if (static_cast<int>(x.size()) <= max_lag + 2)
        throw std::runtime_error("acf: series too short for max_lag " + std::to_string(max_lag));
    if (is_constant(x)) throw std::runtime_error("acf: series is constant (zero variance)");
    std::vector<CorrelationPoint> out;
    out.reserve(max_lag);
    for (int lag = 1; lag <= max_lag; ++lag) out.push_back(correlate_at(x, x, lag));
    return out;
}

std::vector<CorrelationPoint> ccf(const std::vector<double>& x, const std::vector<double>& y,
                                  int max_lag) {
    if (max_lag < 0) throw std::runtime_error("ccf: max_lag must be non-negative");
    if (x.size() != y.size()) throw std::runtime_error("ccf: series lengths differ");
    if (static_cast<int>(x.size()) <= max_lag + 2)
        throw std::runtime_error("ccf: series too short for max_lag " + std::to_string(max_lag));
    if (is_constant(x) || is_constant(y))
        throw std::runtime_error("ccf: a series is constant (zero variance)");
    std::vector<CorrelationPoint> out;
    out.reserve(2 * max_lag + 1);
    for (int lag = -max_lag; lag <= max_lag; ++lag) out.push_back(correlate_at(x, y, lag));
    return out;
}

}  // namespace sentipred
