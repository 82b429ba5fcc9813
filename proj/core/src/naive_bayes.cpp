#include <cmath>

#include "sentipred/classifier.hpp"

namespace sentipred::detail {

NaiveBayesModel train_naive_bayes(const std::vector<std::vector<double>>& rows,
                                  const std::vector<Label>& labels) {
    const std::size_t n = rows.size();
    const std::size_t d = rows.empty() ? 0 : rows[0].size();

    NaiveBayesModel m;
    m.mean_bullish.assign(d, 0.0);
    m.mean_bearish.assign(d, 0.0);
    m.var_bullish.assign(d, 0.0);
    m.var_bearish.assign(d, 0.0);

    std::size_t n_bull = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool bull = labels[i] == Label::bullish;
        if (bull) ++n_bull;
        auto& mean = bull ? m.mean_bullish : m.mean_bearish;
        for (std::size_t f = 0; f < d; ++f) mean[f] += rows[i][f];
    }
    const std::size_t n_bear = n - n_bull;
    for (std::size_t f = 0; f < d; ++f) {
        m.mean_bullish[f] /= static_cast<double>(n_bull);
        m.mean_bearish[f] /= static_cast<double>(n_bear);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const bool bull = labels[i] == Label::bullish;
        const auto& mean = bull ? m.mean_bullish : m.mean_bearish;
        auto& var = bull ? m.var_bullish : m.var_bearish;
        for (std::size_t f = 0; f < d; ++f) {
            const double dev = rows[i][f] - mean[f];
            var[f] += dev * dev;
        }
    }

    // Variance floor keyed to the largest overall feature variance so that
    // constant features do not produce degenerate likelihoods.
    std::vector<double> overall_mean(d, 0.0), overall_var(d, 0.0);
    for (const auto& row : rows)
        for (std::size_t f = 0; f < d; ++f) overall_mean[f] += row[f];
    for (std::size_t f = 0; f < d; ++f) overall_mean[f] /= static_cast<double>(n);
    for (const auto& row : rows)
        for (std::size_t f = 0; f < d; ++f) {
            const double dev = row[f] - overall_mean[f];
            overall_var[f] += dev * dev;
        }
    double max_var = 0.0;
    for (std::size_t f = 0; f < d; ++f) {
        overall_var[f] /= static_cast<double>(n);
        max_var = std::max(max_var, overall_var[f]);
    }
    const double epsilon = std::max(1e-9 * max_var, 1e-12);

    for (std::size_t f = 0; f < d; ++f) {
        m.var_bullish[f] = m.var_bullish[f] / static_cast<double>(n_bull) + epsilon;
        m.var_bearish[f] = m.var_bearish[f] / static_cast<double>(n_bear) + epsilon;
    }
    m.log_prior_bullish = std::log(static_cast<double>(n_bull) / static_cast<double>(n));
    m.log_prior_bearish = std::log(static_cast<double>(n_bear) / static_cast<double>(n));
    return m;
}

Label predict_naive_bayes(const NaiveBayesModel& m, const std::vector<double>& row) {
    double log_bull = m.log_prior_bullish;
    double log_bear = m.log_prior_bearish;
    constexpr double kLog2Pi = 1.8378770664093453;
    for (std::size_t f = 0; f < row.size(); ++f) {
        const double db = row[f] - m.mean_bullish[f];
        const double dr = row[f] - m.mean_bearish[f];
        log_bull -= 0.5 * (kLog2Pi + std::log(m.var_bullish[f]) + db * db / m.var_bullish[f]);
        log_bear -= 0.5 * (kLog2Pi + std::log(m.var_bearish[f]) + dr * dr / m.var_bearish[f]);
    }
    return log_bull >= log_bear ? Label::bullish : Label::bearish;
}

}  // namespace sentipred::detail
