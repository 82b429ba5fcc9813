#pragma once

#include <string>
#include <vector>

#include "sentipred/calendar.hpp"

namespace sentipred {

/// A named series aligned to an ordered trading calendar.
struct Series {
    std::string name;
    std::vector<Date> dates;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

/// Validates name/date/value consistency (equal lengths, dates ascending).
void validate_series(const Series& s);

/// Return(i) = (Close(i) - Close(i-1)) / Close(i-1); one element shorter
/// than the input. Requires at least two positive closes.
Series daily_return(const Series& close);

struct CorrelationPoint {
    int lag = 0;
    double r = 0.0;
    double band = 0.0;  // 1.96 / sqrt(pairs)
    bool significant = false;
};

/// Sample autocorrelations at lags 1..max_lag: Pearson correlation of the
/// lag-aligned pairs, with the 95% white-noise band 1.96/sqrt(n_pairs).
/// Throws on constant series or length <= max_lag + 2.
std::vector<CorrelationPoint> acf(const std::vector<double>& x, int max_lag);

/// Cross-correlations at lags -max_lag..max_lag: correlation of x shifted by
/// k against y, so negative k means x leads y. ccf(x, y, k) = ccf(y, x, -k).
/// Throws when either series is constant or lengths differ.
std::vector<CorrelationPoint> ccf(const std::vector<double>& x, const std::vector<double>& y,
                                  int max_lag);

}  // namespace sentipred
