#include "sentipred/classifier.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace sentipred {

namespace {

constexpr int kModelFileVersion = 1;

void check_labeled(const std::vector<FeatureVector>& vectors) {
    int bull = 0, bear = 0;
    for (const FeatureVector& v : vectors) {
        if (!v.label || *v.label == Label::unlabeled)
            throw std::runtime_error("training vector without a class label");
        (*v.label == Label::bullish ? bull : bear) += 1;
    }
    if (vectors.empty() || bull == 0 || bear == 0)
        throw std::runtime_error("training set must contain both classes");
}

nlohmann::json tree_to_json(const DecisionTreeModel& m) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const TreeNode& n : m.nodes) {
        nodes.push_back({{"f", n.feature},
                         {"t", n.threshold},
                         {"l", n.left},
                         {"r", n.right},
                         {"c", to_string(n.label)}});
    }
    return nodes;
}

DecisionTreeModel tree_from_json(const nlohmann::json& j) {
    DecisionTreeModel m;
    for (const auto& n : j) {
        m.nodes.push_back(TreeNode{n.at("f").get<int>(), n.at("t").get<double>(),
                                   n.at("l").get<int>(), n.at("r").get<int>(),
                                   label_from_string(n.at("c").get<std::string>())});
    }
    if (m.nodes.empty()) throw std::runtime_error("model file holds an empty tree");
    return m;
}

}  // namespace

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::naive_bayes: return "naive_bayes";
        case Algorithm::decision_tree: return "decision_tree";
        case Algorithm::bagging: return "bagging";
    }
    throw std::runtime_error("invalid algorithm value");
}

Algorithm algorithm_from_string(const std::string& s) {
    if (s == "naive_bayes") return Algorithm::naive_bayes;
    if (s == "decision_tree") return Algorithm::decision_tree;
    if (s == "bagging") return Algorithm::bagging;
    throw std::runtime_error("unknown algorithm '" + s +
                             "' (expected naive_bayes, decision_tree, or bagging)");
}

FeatureSchema schema_from_lexicon(const SentimentLexicon& lexicon, bool include_score) {
    FeatureSchema schema;
    schema.include_score = include_score;
    schema.terms.reserve(lexicon.size());
    for (const auto& [term, entry] : lexicon.entries()) schema.terms.push_back(term);
    return schema;
}

std::vector<double> densify(const FeatureVector& vec, const FeatureSchema& schema) {
    if (vec.comment_score.has_value() != schema.include_score)
        throw std::runtime_error(
            "schema mismatch: score feature presence does not match the model schema");
    std::vector<double> row(schema.size(), 0.0);
    auto term_it = vec.term_features.begin();
    // schema.terms is sorted, as is the sparse map: single merge pass.
    std::size_t s = 0;
    while (term_it != vec.term_features.end()) {
        while (s < schema.terms.size() && schema.terms[s] < term_it->first) ++s;
        if (s == schema.terms.size() || schema.terms[s] != term_it->first)
            throw std::runtime_error("schema mismatch: unknown feature term '" + term_it->first +
                                     "'");
        row[s] = term_it->second;
        ++term_it;
    }
    if (schema.include_score) row.back() = *vec.comment_score;
    return row;
}

namespace detail {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 over (seed, index); every training unit draws its own stream.
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

const NaiveBayesModel& TrainedClassifier::naive_bayes() const {
    return std::get<NaiveBayesModel>(model_);
}
const DecisionTreeModel& TrainedClassifier::tree() const {
    return std::get<DecisionTreeModel>(model_);
}
const BaggingModel& TrainedClassifier::bagging() const { return std::get<BaggingModel>(model_); }

Label TrainedClassifier::predict(const FeatureVector& vec) const {
    return predict_dense(densify(vec, schema_));
}

Label TrainedClassifier::predict_dense(const std::vector<double>& row) const {
    if (row.size() != schema_.size())
        throw std::runtime_error("schema mismatch: dense row width " + std::to_string(row.size()) +
                                 " does not match schema width " + std::to_string(schema_.size()));
    switch (algorithm_) {
        case Algorithm::naive_bayes:
            return detail::predict_naive_bayes(std::get<NaiveBayesModel>(model_), row);
        case Algorithm::decision_tree:
            return detail::predict_tree(std::get<DecisionTreeModel>(model_), row);
        case Algorithm::bagging: {
            int bull = 0, bear = 0;
            for (const DecisionTreeModel& t : std::get<BaggingModel>(model_).trees)
                (detail::predict_tree(t, row) == Label::bullish ? bull : bear) += 1;
            return bull >= bear ? Label::bullish : Label::bearish;
        }
    }
    throw std::runtime_error("invalid algorithm value");
}

TrainedClassifier train(const std::vector<FeatureVector>& vectors, const FeatureSchema& schema,
                        Algorithm algorithm, const TrainParams& params, std::uint64_t seed) {
    check_labeled(vectors);

    std::vector<std::vector<double>> rows;
    std::vector<Label> labels;
    rows.reserve(vectors.size());
    labels.reserve(vectors.size());
    for (const FeatureVector& v : vectors) {
        rows.push_back(densify(v, schema));
        labels.push_back(*v.label);
    }

    TrainedClassifier clf;
    clf.algorithm_ = algorithm;
    clf.schema_ = schema;
    clf.params_ = params;
    clf.seed_ = seed;

    switch (algorithm) {
        case Algorithm::naive_bayes:
            clf.model_ = detail::train_naive_bayes(rows, labels);
            break;
        case Algorithm::decision_tree:
            clf.model_ = detail::train_decision_tree(rows, labels, params);
            break;
        case Algorithm::bagging: {
            if (params.bagging_size < 1)
                throw std::runtime_error("bagging_size must be at least 1");
            BaggingModel model;
            model.trees.reserve(params.bagging_size);
            const std::size_t n = rows.size();
            for (int b = 0; b < params.bagging_size; ++b) {
                std::mt19937_64 rng(detail::mix_seed(seed, static_cast<std::uint64_t>(b)));
                std::uniform_int_distribution<std::size_t> pick(0, n - 1);
                std::vector<std::vector<double>> boot_rows;
                std::vector<Label> boot_labels;
                boot_rows.reserve(n);
                boot_labels.reserve(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const std::size_t j = pick(rng);
                    boot_rows.push_back(rows[j]);
                    boot_labels.push_back(labels[j]);
                }
                model.trees.push_back(detail::train_decision_tree(boot_rows, boot_labels, params));
            }
            clf.model_ = std::move(model);
            break;
        }
    }
    return clf;
}

EvalMetrics cross_validate(const std::vector<FeatureVector>& vectors,
                           const FeatureSchema& schema, Algorithm algorithm,
                           const TrainParams& params, int k, std::uint64_t seed) {
    check_labeled(vectors);
    if (k < 2) throw std::runtime_error("cross_validate: k must be at least 2");
    if (static_cast<int>(vectors.size()) < k)
        throw std::runtime_error("cross_validate: fewer examples (" +
                                 std::to_string(vectors.size()) + ") than folds (" +
                                 std::to_string(k) + ")");

    // Stratified fold assignment: shuffle each class, deal round-robin.
    std::vector<int> fold(vectors.size(), 0);
    for (Label cls : {Label::bullish, Label::bearish}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < vectors.size(); ++i)
            if (*vectors[i].label == cls) members.push_back(i);
        std::mt19937_64 rng(detail::mix_seed(seed, cls == Label::bullish ? 1 : 2));
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t j = 0; j < members.size(); ++j)
            fold[members[j]] = static_cast<int>(j % k);
    }

    // Pool predictions over all held-out folds into one confusion matrix.
    int tp_bull = 0, fn_bull = 0, tp_bear = 0, fn_bear = 0;
    for (int f = 0; f < k; ++f) {
        std::vector<FeatureVector> train_set;
        std::vector<std::size_t> test_idx;
        for (std::size_t i = 0; i < vectors.size(); ++i) {
            if (fold[i] == f) test_idx.push_back(i);
            else train_set.push_back(vectors[i]);
        }
        if (test_idx.empty()) continue;
        const TrainedClassifier clf =
            train(train_set, schema, algorithm, params, detail::mix_seed(seed, 100 + f));
        for (std::size_t i : test_idx) {
            const Label predicted = clf.predict(vectors[i]);
            if (*vectors[i].label == Label::bullish)
                (predicted == Label::bullish ? tp_bull : fn_bull) += 1;
            else
                (predicted == Label::bearish ? tp_bear : fn_bear) += 1;
        }
    }

    auto class_metrics = [](int tp, int fn, int fp) {
        ClassMetrics m;
        m.support = tp + fn;
        m.recall = m.support > 0 ? static_cast<double>(tp) / m.support : 0.0;
        m.precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
        m.f1 = m.precision + m.recall > 0.0
                   ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                   : 0.0;
        return m;
    };

    EvalMetrics metrics;
    metrics.bullish = class_metrics(tp_bull, fn_bull, /*fp=*/fn_bear);
    metrics.bearish = class_metrics(tp_bear, fn_bear, /*fp=*/fn_bull);
    const int n = tp_bull + fn_bull + tp_bear + fn_bear;
    metrics.accuracy = n > 0 ? static_cast<double>(tp_bull + tp_bear) / n : 0.0;
    metrics.recall_macro = (metrics.bullish.recall + metrics.bearish.recall) / 2.0;
    metrics.f_macro = (metrics.bullish.f1 + metrics.bearish.f1) / 2.0;
    return metrics;
}

void TrainedClassifier::save(const std::string& path, const std::string& provenance) const {
    nlohmann::json j;
    if (!provenance.empty()) j["_provenance"] = provenance;
    j["version"] = kModelFileVersion;
    j["algorithm"] = to_string(algorithm_);
    j["seed"] = seed_;
    j["schema"] = {{"terms", schema_.terms}, {"include_score", schema_.include_score}};
    j["params"] = {{"bagging_size", params_.bagging_size},
                   {"pruning_confidence", params_.pruning_confidence},
                   {"max_depth", params_.max_depth},
                   {"min_leaf", params_.min_leaf}};
    switch (algorithm_) {
        case Algorithm::naive_bayes: {
            const auto& m = std::get<NaiveBayesModel>(model_);
            j["model"] = {{"log_prior_bullish", m.log_prior_bullish},
                          {"log_prior_bearish", m.log_prior_bearish},
                          {"mean_bullish", m.mean_bullish},
                          {"var_bullish", m.var_bullish},
                          {"mean_bearish", m.mean_bearish},
                          {"var_bearish", m.var_bearish}};
            break;
        }
        case Algorithm::decision_tree:
            j["model"] = {{"nodes", tree_to_json(std::get<DecisionTreeModel>(model_))}};
            break;
        case Algorithm::bagging: {
            nlohmann::json trees = nlohmann::json::array();
            for (const DecisionTreeModel& t : std::get<BaggingModel>(model_).trees)
                trees.push_back(tree_to_json(t));
            j["model"] = {{"trees", trees}};
            break;
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

TrainedClassifier TrainedClassifier::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": malformed model file: " + std::string(e.what()));
    }
    if (!j.contains("version") || j["version"].get<int>() != kModelFileVersion)
        throw std::runtime_error(path + ": unsupported model file version");

    TrainedClassifier clf;
    clf.algorithm_ = algorithm_from_string(j.at("algorithm").get<std::string>());
    clf.seed_ = j.at("seed").get<std::uint64_t>();
    clf.schema_.terms = j.at("schema").at("terms").get<std::vector<std::string>>();
    clf.schema_.include_score = j.at("schema").at("include_score").get<bool>();
    const auto& p = j.at("params");
    clf.params_.bagging_size = p.at("bagging_size").get<int>();
    clf.params_.pruning_confidence = p.at("pruning_confidence").get<double>();
    clf.params_.max_depth = p.at("max_depth").get<int>();
    clf.params_.min_leaf = p.at("min_leaf").get<int>();

    const auto& m = j.at("model");
    switch (clf.algorithm_) {
        case Algorithm::naive_bayes: {
            NaiveBayesModel nb;
            nb.log_prior_bullish = m.at("log_prior_bullish").get<double>();
            nb.log_prior_bearish = m.at("log_prior_bearish").get<double>();
            nb.mean_bullish = m.at("mean_bullish").get<std::vector<double>>();
            nb.var_bullish = m.at("var_bullish").get<std::vector<double>>();
            nb.mean_bearish = m.at("mean_bearish").get<std::vector<double>>();
            nb.var_bearish = m.at("var_bearish").get<std::vector<double>>();
            clf.model_ = std::move(nb);
            break;
        }
        case Algorithm::decision_tree:
            clf.model_ = tree_from_json(m.at("nodes"));
            break;
        case Algorithm::bagging: {
            BaggingModel bag;
            for (const auto& t : m.at("trees")) bag.trees.push_back(tree_from_json(t));
            clf.model_ = std::move(bag);
            break;
        }
    }
    return clf;
}

}  // namespace sentipred
