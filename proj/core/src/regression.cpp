#include "sentipred/regression.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sentipred/stats.hpp"

namespace sentipred {

namespace {

struct TermRef {
    std::string series;
    int lag = 1;

    bool operator==(const TermRef&) const = default;
};

struct FitSpec {
    bool intercept = false;
    std::vector<TermRef> terms;

    int max_lag() const {
        int m = 0;
        for (const TermRef& t : terms) m = std::max(m, t.lag);
        return m;
    }
    bool empty() const { return !intercept && terms.empty(); }
};

using Frame = std::map<std::string, const std::vector<double>*>;

const std::vector<double>& frame_series(const Frame& frame, const std::string& name) {
    auto it = frame.find(name);
    if (it == frame.end())
        throw std::runtime_error("regression: unknown series '" + name + "'");
    return *it->second;
}

struct FittedSpec {
    FitSpec spec;
    OlsResult ols;
};

/// Fits target[t] on the spec's lagged regressors over rows
/// t = max_lag .. n-1. An empty term list fits the intercept alone.
FittedSpec fit_spec(const Frame& frame, const std::string& target, const FitSpec& spec) {
    const std::vector<double>& y_full = frame_series(frame, target);
    const int n = static_cast<int>(y_full.size());
    const int start = std::max(spec.max_lag(), spec.terms.empty() ? 0 : 1);
    const int rows = n - start;
    const int cols = static_cast<int>(spec.terms.size()) + (spec.intercept ? 1 : 0);
    if (cols == 0) throw std::runtime_error("regression: empty model specification");
    if (rows <= cols)
        throw std::runtime_error("regression: " + std::to_string(rows) +
                                 " usable rows cannot support " + std::to_string(cols) +
                                 " coefficients");

    Eigen::MatrixXd X(rows, cols);
    Eigen::VectorXd y(rows);
    std::vector<std::string> names;
    int c = 0;
    if (spec.intercept) {
        X.col(c).setOnes();
        names.push_back("(intercept)");
        ++c;
    }
    for (const TermRef& term : spec.terms) {
        const std::vector<double>& x_full = frame_series(frame, term.series);
        for (int t = start; t < n; ++t) X(t - start, c) = x_full[t - term.lag];
        names.push_back(term.series + "[t-" + std::to_string(term.lag) + "]");
        ++c;
    }
    for (int t = start; t < n; ++t) y(t - start) = y_full[t];

    return FittedSpec{spec, fit_ols(X, y, names)};
}

/// Drops the least significant term with p >= alpha and refits, until every
/// remaining term is significant. `droppable` limits which terms may go.
FittedSpec backward_eliminate(const Frame& frame, const std::string& target, FitSpec spec,
                              double alpha) {
    FittedSpec fit = fit_spec(frame, target, spec);
    for (;;) {
        const int offset = fit.spec.intercept ? 1 : 0;
        int worst = -1;  // -1 none, 0 intercept, 1.. term index+1
        double worst_p = alpha;
        if (fit.spec.intercept && fit.ols.p_values[0] >= worst_p) {
            worst = 0;
            worst_p = fit.ols.p_values[0];
        }
        for (std::size_t i = 0; i < fit.spec.terms.size(); ++i) {
            if (fit.ols.p_values[offset + i] >= worst_p) {
                worst = static_cast<int>(i) + 1;
                worst_p = fit.ols.p_values[offset + i];
            }
        }
        if (worst < 0) return fit;
        FitSpec reduced = fit.spec;
        if (worst == 0) reduced.intercept = false;
        else reduced.terms.erase(reduced.terms.begin() + (worst - 1));
        if (reduced.empty()) {
            fit.spec = reduced;
            return fit;  // caller decides the fallback
        }
        fit = fit_spec(frame, target, reduced);
    }
}

bool residuals_are_white(const std::vector<double>& residuals) {
    const int usable = static_cast<int>(residuals.size());
    const int lags = std::min(10, usable - 3);
    if (lags < 1) return true;
    if (stats::variance(residuals) < 1e-28) return true;  // e.g. an exact fit
    for (const CorrelationPoint& p : acf(residuals, lags))
        if (p.significant) return false;
    return true;
}

RegressionModel model_from_fit(const std::string& target, const FittedSpec& fit) {
    RegressionModel model;
    model.target = target;
    model.has_intercept = fit.spec.intercept;
    const int offset = fit.spec.intercept ? 1 : 0;
    if (fit.spec.intercept) {
        model.intercept = fit.ols.coefficients[0];
        model.intercept_std_error = fit.ols.std_errors[0];
        model.intercept_p_value = fit.ols.p_values[0];
    }
    for (std::size_t i = 0; i < fit.spec.terms.size(); ++i) {
        model.terms.push_back(ModelTerm{fit.spec.terms[i].series, fit.spec.terms[i].lag,
                                        fit.ols.coefficients[offset + i],
                                        fit.ols.std_errors[offset + i],
                                        fit.ols.p_values[offset + i]});
    }
    model.residual_sd = fit.ols.residual_sd;
    model.residuals_white = residuals_are_white(fit.ols.residuals);
    return model;
}

RegressionModel intercept_only_model(const Frame& frame, const std::string& target,
                                     const std::string& note) {
    FittedSpec fit = fit_spec(frame, target, FitSpec{true, {}});
    RegressionModel model = model_from_fit(target, fit);
    model.intercept_only_warning = true;
    model.note = note;
    return model;
}

FitSpec spec_from_model(const RegressionModel& model) {
    FitSpec spec;
    spec.intercept = model.has_intercept;
    for (const ModelTerm& t : model.terms) spec.terms.push_back(TermRef{t.series, t.lag});
    return spec;
}

std::vector<TermRef> terms_of(const FitSpec& spec, const std::string& series) {
    std::vector<TermRef> out;
    for (const TermRef& t : spec.terms)
        if (t.series == series) out.push_back(t);
    return out;
}

void check_aligned(const Series& target, const std::vector<Series>& candidates) {
    validate_series(target);
    for (const Series& c : candidates) {
        validate_series(c);
        if (c.dates != target.dates)
            throw std::runtime_error("series '" + c.name + "' is not aligned with target '" +
                                     target.name + "'");
        if (c.name == target.name)
            throw std::runtime_error("candidate series shares the target's name '" + c.name +
                                     "'");
    }
}

}  // namespace

OlsResult fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                  const std::vector<std::string>& col_names) {
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    if (y.size() != n) throw std::runtime_error("fit_ols: target length mismatch");
    if (n <= p)
        throw std::runtime_error("fit_ols: need more rows (" + std::to_string(n) +
                                 ") than columns (" + std::to_string(p) + ")");

    auto name_of = [&](int j) {
        return j < static_cast<int>(col_names.size()) ? col_names[j]
                                                      : "column " + std::to_string(j);
    };

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    const int rank = static_cast<int>(qr.rank());
    if (rank < p) {
        std::string msg = "fit_ols: design is rank deficient; collinear:";
        const auto& perm = qr.colsPermutation().indices();
        for (int j = rank; j < p; ++j) msg += " " + name_of(perm[j]);
        throw std::runtime_error(msg);
    }

    OlsResult out;
    const Eigen::VectorXd coef = qr.solve(y);
    const Eigen::VectorXd resid = y - X * coef;
    out.ssr = resid.squaredNorm();
    out.df = n - p;
    const double sigma2 = out.ssr / out.df;
    out.residual_sd = std::sqrt(sigma2);

    const Eigen::MatrixXd R =
        qr.matrixR().topLeftCorner(p, p).template triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        R.template triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    Eigen::MatrixXd xtx_inv = r_inv * r_inv.transpose();
    xtx_inv = qr.colsPermutation() * xtx_inv * qr.colsPermutation().transpose();

    out.coefficients.resize(p);
    out.std_errors.resize(p);
    out.t_values.resize(p);
    out.p_values.resize(p);
    for (int j = 0; j < p; ++j) {
        out.coefficients[j] = coef(j);
        const double se = std::sqrt(std::max(sigma2 * xtx_inv(j, j), 0.0));
        out.std_errors[j] = se;
        const double t = se > 0.0 ? coef(j) / se
                                  : (coef(j) == 0.0 ? 0.0
                                                    : std::numeric_limits<double>::infinity());
        out.t_values[j] = t;
        out.p_values[j] = stats::t_pvalue_two_sided(t, out.df);
    }
    out.residuals.assign(resid.data(), resid.data() + n);
    return out;
}

int RegressionModel::max_lag() const {
    int m = 0;
    for (const ModelTerm& t : terms) m = std::max(m, t.lag);
    return m;
}

RegressionModel fit_m0(const Series& target, int max_lag, double alpha) {
    validate_series(target);
    if (max_lag < 1) throw std::runtime_error("fit_m0: max_lag must be at least 1");
    Frame frame{{target.name, &target.values}};

    std::vector<int> candidate_lags;
    for (const CorrelationPoint& p : acf(target.values, max_lag))
        if (p.significant) candidate_lags.push_back(p.lag);
    if (candidate_lags.empty())
        return intercept_only_model(frame, target.name, "no significant autocorrelation lag");

    FitSpec spec;
    spec.intercept = true;
    for (int lag : candidate_lags) spec.terms.push_back(TermRef{target.name, lag});
    FittedSpec fit = backward_eliminate(frame, target.name, spec, alpha);
    if (fit.spec.terms.empty())
        return intercept_only_model(frame, target.name,
                                    "no autoregressive lag survived elimination");
    return model_from_fit(target.name, fit);
}

GrangerResult granger_test(const Series& x, const Series& y, const std::vector<int>& lags,
                           double alpha) {
    if (lags.empty()) throw std::runtime_error("granger_test: no candidate lags given");
    for (int l : lags)
        if (l < 1) throw std::runtime_error("granger_test: lags must be >= 1");
    check_aligned(y, {x});

    std::vector<int> sorted_lags = lags;
    std::sort(sorted_lags.begin(), sorted_lags.end());
    sorted_lags.erase(std::unique(sorted_lags.begin(), sorted_lags.end()), sorted_lags.end());
    const int own_order = sorted_lags.back();

    Frame frame{{y.name, &y.values}, {x.name, &x.values}};
    FitSpec restricted;
    restricted.intercept = true;
    for (int l = 1; l <= own_order; ++l) restricted.terms.push_back(TermRef{y.name, l});
    FitSpec augmented = restricted;
    for (int l : sorted_lags) augmented.terms.push_back(TermRef{x.name, l});

    const FittedSpec fit_r = fit_spec(frame, y.name, restricted);
    const FittedSpec fit_u = fit_spec(frame, y.name, augmented);

    GrangerResult out;
    out.df1 = static_cast<int>(sorted_lags.size());
    out.df2 = fit_u.ols.df;
    if (fit_u.ols.ssr <= 1e-290) {
        // The augmented model is an exact fit; the restricted one either is
        // too (no improvement) or the candidate is a perfect predictor.
        const bool improves = fit_r.ols.ssr > 1e-12;
        out.f_statistic = improves ? std::numeric_limits<double>::infinity() : 0.0;
        out.p_value = improves ? 0.0 : 1.0;
        out.causal = improves;
        return out;
    }
    out.f_statistic = ((fit_r.ols.ssr - fit_u.ols.ssr) / out.df1) / (fit_u.ols.ssr / out.df2);
    if (out.f_statistic < 0.0) out.f_statistic = 0.0;
    out.p_value = stats::f_sf(out.f_statistic, out.df1, out.df2);
    out.causal = out.p_value < alpha;
    return out;
}

RegressionModel build_m1(const RegressionModel& m0, const Series& target,
                         const std::vector<Series>& candidates, int max_lag, double alpha) {
    check_aligned(target, candidates);
    if (max_lag < 1) throw std::runtime_error("build_m1: max_lag must be at least 1");
    if (m0.target != target.name)
        throw std::runtime_error("build_m1: baseline was fitted for '" + m0.target +
                                 "', not '" + target.name + "'");

    Frame frame{{target.name, &target.values}};
    for (const Series& c : candidates) frame[c.name] = &c.values;

    auto keep_baseline = [&](const std::string& reason) {
        RegressionModel out = m0;
        out.fallback_to_m0 = true;
        out.note = reason;
        return out;
    };
    if (candidates.empty()) return keep_baseline("no candidate series were provided");

    // Screen where the candidate leads the target. The per-lag band is
    // Bonferroni-corrected across candidates x lags; an uncorrected 5% band
    // over that many looks would admit noise candidates far too often.
    struct Screened {
        const Series* series;
        std::vector<int> lags;
        double strength = 0.0;
    };
    const double tests = static_cast<double>(candidates.size()) * max_lag;
    const double z_screen = stats::normal_quantile(1.0 - alpha / (2.0 * tests));
    std::vector<Screened> screened;
    for (const Series& c : candidates) {
        // A constant candidate carries no information and cannot correlate.
        if (std::all_of(c.values.begin(), c.values.end(),
                        [&](double v) { return v == c.values.front(); }))
            continue;
        Screened s{&c, {}, 0.0};
        for (const CorrelationPoint& p : ccf(c.values, target.values, max_lag)) {
            if (p.lag >= 0) continue;  // only lags where the candidate leads
            const double n_pairs = static_cast<double>(c.size()) - std::abs(p.lag);
            if (std::fabs(p.r) > z_screen / std::sqrt(n_pairs)) {
                s.lags.push_back(-p.lag);
                s.strength = std::max(s.strength, std::fabs(p.r));
            }
        }
        if (!s.lags.empty()) screened.push_back(std::move(s));
    }
    if (screened.empty()) return keep_baseline("no candidate passed cross-correlation screening");

    std::vector<Screened> causal;
    for (Screened& s : screened) {
        if (granger_test(*s.series, target, s.lags, alpha).causal) causal.push_back(std::move(s));
    }
    if (causal.empty()) return keep_baseline("no screened candidate is Granger-causal");

    std::sort(causal.begin(), causal.end(), [](const Screened& a, const Screened& b) {
        if (a.strength != b.strength) return a.strength > b.strength;
        return a.series->name < b.series->name;
    });

    FitSpec current = spec_from_model(m0);
    if (m0.intercept_only_warning) current.terms.clear();  // the lone intercept stays droppable
    std::vector<std::string> accepted;

    for (const Screened& s : causal) {
        FitSpec tentative = current;
        if (!tentative.intercept && terms_of(tentative, target.name).empty() &&
            tentative.terms.empty())
            tentative.intercept = true;  // give a bare baseline an intercept to eliminate against
        std::vector<int> lags = s.lags;
        std::sort(lags.begin(), lags.end());
        for (int lag : lags) tentative.terms.push_back(TermRef{s.series->name, lag});

        FittedSpec fit = backward_eliminate(frame, target.name, tentative, alpha);
        if (terms_of(fit.spec, s.series->name).empty()) continue;  // vacuous insertion

        bool harmed_previous = false;
        for (const std::string& prev : accepted) {
            if (terms_of(fit.spec, prev) != terms_of(current, prev)) {
                harmed_previous = true;
                break;
            }
        }
        if (harmed_previous) continue;  // undo this insertion

        current = fit.spec;
        accepted.push_back(s.series->name);
    }

    if (accepted.empty())
        return keep_baseline("every causal candidate was eliminated during fitting");

    RegressionModel model = model_from_fit(target.name, fit_spec(frame, target.name, current));
    return model;
}

double predict_one_step(const RegressionModel& model,
                        const std::map<std::string, std::vector<double>>& history) {
    double yhat = model.has_intercept ? model.intercept : 0.0;
    for (const ModelTerm& term : model.terms) {
        auto it = history.find(term.series);
        if (it == history.end())
            throw std::runtime_error("predict_one_step: missing history for series '" +
                                     term.series + "'");
        const std::vector<double>& h = it->second;
        if (static_cast<int>(h.size()) < term.lag)
            throw std::runtime_error("predict_one_step: history for ('" + term.series +
                                     "', lag " + std::to_string(term.lag) + ") is missing");
        yhat += term.coefficient * h[h.size() - term.lag];
    }
    return yhat;
}

double mape(const std::vector<double>& predicted, const std::vector<double>& actual,
            int* skipped_zero) {
    if (predicted.size() != actual.size())
        throw std::runtime_error("mape: prediction and truth lengths differ");
    if (predicted.empty()) throw std::runtime_error("mape: no points");
    double acc = 0.0;
    int used = 0, skipped = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0) {
            ++skipped;
            continue;
        }
        acc += std::fabs((actual[i] - predicted[i]) / actual[i]);
        ++used;
    }
    if (skipped_zero) *skipped_zero = skipped;
    if (used == 0) throw std::runtime_error("mape: every true value is zero");
    return acc / used * 100.0;
}

double direction_accuracy(const std::vector<double>& predicted,
                          const std::vector<double>& actual) {
    if (predicted.size() != actual.size())
        throw std::runtime_error("direction_accuracy: prediction and truth lengths differ");
    if (predicted.size() < 2)
        throw std::runtime_error("direction_accuracy: need at least two points");
    int correct = 0;
    const int pairs = static_cast<int>(predicted.size()) - 1;
    for (int i = 0; i < pairs; ++i) {
        const double dp = predicted[i + 1] - predicted[i];
        const double da = actual[i + 1] - actual[i];
        if (dp * da > 0.0) ++correct;
    }
    return static_cast<double>(correct) / pairs;
}

std::size_t train_length(std::size_t n, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::runtime_error("train_fraction must lie in (0, 1)");
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction));
}

EvalReport evaluate(const RegressionModel& model, const Series& target,
                    const std::vector<Series>& candidates, double train_fraction) {
    check_aligned(target, candidates);
    const std::size_t n = target.size();
    const std::size_t n_train = train_length(n, train_fraction);
    if (n - n_train < 2)
        throw std::runtime_error("evaluate: test segment shorter than 2 points");
    if (n_train < static_cast<std::size_t>(model.max_lag()))
        throw std::runtime_error("evaluate: train segment shorter than the model's max lag");

    Frame frame{{target.name, &target.values}};
    for (const Series& c : candidates) frame[c.name] = &c.values;

    EvalReport report;
    std::vector<double> predicted, actual;
    for (std::size_t t = n_train; t < n; ++t) {
        double yhat = model.has_intercept ? model.intercept : 0.0;
        for (const ModelTerm& term : model.terms) {
            const std::vector<double>& h = frame_series(frame, term.series);
            if (t < static_cast<std::size_t>(term.lag))
                throw std::runtime_error("evaluate: history for ('" + term.series + "', lag " +
                                         std::to_string(term.lag) + ") is missing");
            yhat += term.coefficient * h[t - term.lag];
        }
        predicted.push_back(yhat);
        actual.push_back(target.values[t]);
        report.points.push_back(EvalPoint{target.dates[t], target.values[t], yhat});
    }
    report.n_test = static_cast<int>(predicted.size());
    report.mape = mape(predicted, actual, &report.mape_skipped_zero);
    report.direction_accuracy = direction_accuracy(predicted, actual);
    return report;
}

nlohmann::json model_to_json(const RegressionModel& model) {
    nlohmann::json terms = nlohmann::json::array();
    for (const ModelTerm& t : model.terms) {
        terms.push_back({{"series", t.series},
                         {"lag", t.lag},
                         {"coefficient", t.coefficient},
                         {"std_error", t.std_error},
                         {"p_value", t.p_value}});
    }
    return nlohmann::json{{"version", 1},
                          {"target", model.target},
                          {"intercept",
                           {{"present", model.has_intercept},
                            {"value", model.intercept},
                            {"std_error", model.intercept_std_error},
                            {"p_value", model.intercept_p_value}}},
                          {"terms", terms},
                          {"residual_sd", model.residual_sd},
                          {"residuals_white", model.residuals_white},
                          {"intercept_only_warning", model.intercept_only_warning},
                          {"fallback_to_m0", model.fallback_to_m0},
                          {"note", model.note}};
}

RegressionModel model_from_json(const nlohmann::json& j) {
    if (!j.contains("version") || j.at("version").get<int>() != 1)
        throw std::runtime_error("unsupported model version");
    RegressionModel model;
    model.target = j.at("target").get<std::string>();
    const auto& icpt = j.at("intercept");
    model.has_intercept = icpt.at("present").get<bool>();
    model.intercept = icpt.at("value").get<double>();
    model.intercept_std_error = icpt.at("std_error").get<double>();
    model.intercept_p_value = icpt.at("p_value").get<double>();
    for (const auto& t : j.at("terms")) {
        model.terms.push_back(ModelTerm{t.at("series").get<std::string>(), t.at("lag").get<int>(),
                                        t.at("coefficient").get<double>(),
                                        t.at("std_error").get<double>(),
                                        t.at("p_value").get<double>()});
    }
    model.residual_sd = j.at("residual_sd").get<double>();
    model.residuals_white = j.at("residuals_white").get<bool>();
    model.intercept_only_warning = j.at("intercept_only_warning").get<bool>();
    model.fallback_to_m0 = j.at("fallback_to_m0").get<bool>();
    model.note = j.at("note").get<std::string>();
    return model;
}

void save_model(const RegressionModel& model, const std::string& path,
                const std::string& provenance) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    nlohmann::json j = model_to_json(model);
    if (!provenance.empty()) j["_provenance"] = provenance;
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

RegressionModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": malformed model file: " + std::string(e.what()));
    }
    return model_from_json(j);
}

}  // namespace sentipred
