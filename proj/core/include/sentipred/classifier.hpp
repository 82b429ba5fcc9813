#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "sentipred/features.hpp"

namespace sentipred {

enum class Algorithm { naive_bayes, decision_tree, bagging };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

/// Ordered term list plus the score-feature flag. Fixed at training time;
/// the dense projection appends comment_score as the last column.
struct FeatureSchema {
    std::vector<std::string> terms;  // sorted, unique
    bool include_score = false;

    std::size_t size() const { return terms.size() + (include_score ? 1 : 0); }
};

FeatureSchema schema_from_lexicon(const SentimentLexicon& lexicon, bool include_score);

/// Projects a sparse vector onto the schema. Throws on schema mismatch
/// (unknown term key, or score-feature presence not matching the schema).
std::vector<double> densify(const FeatureVector& vec, const FeatureSchema& schema);

struct TrainParams {
    int bagging_size = 25;           // number of bootstrap trees
    double pruning_confidence = 0.25;  // C4.5-style confidence; <= 0 disables pruning
    int max_depth = 30;
    int min_leaf = 2;
};

/// Gaussian class-conditional model over the dense projection.
/// Per class: log prior ln(n_c / n); per feature: mean and population
/// variance, plus a shared variance floor of 1e-9 x the largest overall
/// feature variance (1e-12 absolute minimum).
struct NaiveBayesModel {
    double log_prior_bullish = 0.0;
    double log_prior_bearish = 0.0;
    std::vector<double> mean_bullish, var_bullish;
    std::vector<double> mean_bearish, var_bearish;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;  // value <= threshold goes left
    Label label = Label::bullish;
};

/// Binary tree with information-gain-ratio splits and pessimistic
/// (confidence-bound) pruning. Node 0 is the root.
struct DecisionTreeModel {
    std::vector<TreeNode> nodes;
};

struct BaggingModel {
    std::vector<DecisionTreeModel> trees;
};

class TrainedClassifier {
public:
    Algorithm algorithm() const { return algorithm_; }
    const FeatureSchema& schema() const { return schema_; }
    std::uint64_t seed() const { return seed_; }
    const TrainParams& params() const { return params_; }

    const NaiveBayesModel& naive_bayes() const;
    const DecisionTreeModel& tree() const;
    const BaggingModel& bagging() const;

    /// Deterministic prediction; ties break toward bullish.
    Label predict(const FeatureVector& vec) const;
    Label predict_dense(const std::vector<double>& row) const;

    void save(const std::string& path, const std::string& provenance = "") const;
    static TrainedClassifier load(const std::string& path);

private:
    friend TrainedClassifier train(const std::vector<FeatureVector>&, const FeatureSchema&,
                                   Algorithm, const TrainParams&, std::uint64_t);
    Algorithm algorithm_ = Algorithm::naive_bayes;
    FeatureSchema schema_;
    TrainParams params_;
    std::uint64_t seed_ = 0;
    std::variant<NaiveBayesModel, DecisionTreeModel, BaggingModel> model_;
};

/// Trains a classifier; reproducible from (data, algorithm, seed).
/// Throws if the training set is empty or single-class.
TrainedClassifier train(const std::vector<FeatureVector>& vectors, const FeatureSchema& schema,
                        Algorithm algorithm, const TrainParams& params, std::uint64_t seed);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int support = 0;
};

struct EvalMetrics {
    double accuracy = 0.0;
    double recall_macro = 0.0;
    double f_macro = 0.0;
    ClassMetrics bullish;
    ClassMetrics bearish;
};

/// Stratified k-fold cross-validation; metrics are pooled over all held-out
/// predictions. Deterministic under (data, algorithm, seed).
EvalMetrics cross_validate(const std::vector<FeatureVector>& vectors,
                           const FeatureSchema& schema, Algorithm algorithm,
                           const TrainParams& params, int k, std::uint64_t seed);

// Internal helpers shared by the learner translation units.
namespace detail {
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);
NaiveBayesModel train_naive_bayes(const std::vector<std::vector<double>>& rows,
                                  const std::vector<Label>& labels);
Label predict_naive_bayes(const NaiveBayesModel& m, const std::vector<double>& row);
DecisionTreeModel train_decision_tree(const std::vector<std::vector<double>>& rows,
                                      const std::vector<Label>& labels,
                                      const TrainParams& params);
Label predict_tree(const DecisionTreeModel& m, const std::vector<double>& row);
}  // namespace detail

}  // namespace sentipred
