#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sentipred/timeseries.hpp"

namespace sentipred {

struct OlsResult {
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    std::vector<double> t_values;
    std::vector<double> p_values;  // two-sided
    std::vector<double> residuals;
    double residual_sd = 0.0;
    double ssr = 0.0;
    int df = 0;
};

/// Least squares via column-pivoted Householder QR, with classical t-based
/// inference. Requires more rows than columns and full column rank; a rank
/// deficiency names the collinear columns (by `col_names` when provided).
OlsResult fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  const std::vector<std::string>& col_names = {});

struct ModelTerm {
    std::string series;
    int lag = 1;  // strictly predictive: lag >= 1
    double coefficient = 0.0;
    double std_error = 0.0;
    double p_value = 1.0;
};

/// A fitted predictive model: optional intercept plus lagged terms, with
/// residual diagnostics and the flags raised by the fitting procedures.
struct RegressionModel {
    std::string target;
    bool has_intercept = false;
    double intercept = 0.0;
    double intercept_std_error = 0.0;
    double intercept_p_value = 1.0;
    std::vector<ModelTerm> terms;
    double residual_sd = 0.0;
    bool residuals_white = false;
    bool intercept_only_warning = false;  // fit_m0 found no significant lag
    bool fallback_to_m0 = false;          // build_m1 kept the baseline
    std::string note;

    int max_lag() const;
};

/// Autoregressive baseline: candidate lags are the ACF-significant ones;
/// backward elimination (drop the least significant term with p >= alpha,
/// refit) runs until every remaining term is significant. With no usable
/// lag the model degrades to intercept-only and sets the warning flag.
/// Residual whiteness = all residual ACF lags 1..10 inside the 95% band.
RegressionModel fit_m0(const Series& target, int max_lag, double alpha = 0.05);

struct GrangerResult {
    bool causal = false;
    double f_statistic = 0.0;
    double p_value = 1.0;
    int df1 = 0;
    int df2 = 0;
};

/// F-test of the restricted model (y on its own lags 1..max(lags)) against
/// the augmented model adding x at the candidate lags; causal iff p < alpha.
GrangerResult granger_test(const Series& x, const Series& y, const std::vector<int>& lags,
                           double alpha = 0.05);

/// Builds the augmented model from the baseline: candidate lags are screened
/// where the candidate leads the target, using a familywise (Bonferroni)
/// corrected CCF band over candidates x lags so pure-noise candidates rarely
/// slip through; survivors must also be Granger-causal. Candidates enter in
/// descending order of their strongest |CCF|; after each insertion the whole
/// model is backward-eliminated at `alpha`, the insertion is undone if a
/// previously accepted candidate loses a term, and baseline terms may drop
/// out like any other insignificant term. When nothing survives, the
/// baseline is returned with `fallback_to_m0` set and a reason in `note`.
RegressionModel build_m1(const RegressionModel& m0, const Series& target,
                         const std::vector<Series>& candidates, int max_lag,
                         double alpha = 0.05);

/// Linear one-step prediction: intercept + sum of coefficient x value at the
/// referenced lag, reading history back from each vector's end. Throws
/// naming (series, lag) when a required point is missing.
double predict_one_step(const RegressionModel& model,
                        const std::map<std::string, std::vector<double>>& history);

struct EvalPoint {
    Date date;
    double actual = 0.0;
    double predicted = 0.0;
};

struct EvalReport {
    double mape = 0.0;  // percent
    double direction_accuracy = 0.0;
    int n_test = 0;
    int mape_skipped_zero = 0;
    std::vector<EvalPoint> points;
};

/// Mean absolute percentage error (percent). Points with a true value of
/// exactly zero are skipped and counted into *skipped_zero.
double mape(const std::vector<double>& predicted, const std::vector<double>& actual,
            int* skipped_zero = nullptr);

/// Fraction of consecutive pairs whose predicted and real changes share a
/// sign; a flat change on either side counts as incorrect.
double direction_accuracy(const std::vector<double>& predicted,
                          const std::vector<double>& actual);

/// Number of leading observations used for model building under a
/// chronological split.
std::size_t train_length(std::size_t n, double train_fraction);

/// Rolling one-step predictions over the held-out tail of a chronological
/// split (the model should have been fitted on the leading train_fraction).
/// Throws when the test segment has fewer than two points.
EvalReport evaluate(const RegressionModel& model, const Series& target,
                    const std::vector<Series>& candidates, double train_fraction = 0.9);

nlohmann::json model_to_json(const RegressionModel& model);
RegressionModel model_from_json(const nlohmann::json& j);
void save_model(const RegressionModel& model, const std::string& path,
                const std::string& provenance = "");
RegressionModel load_model(const std::string& path);

}  // namespace sentipred
