#include <algorithm>
#include <cmath>

#include "sentipred/classifier.hpp"
#include "sentipred/stats.hpp"

namespace sentipred::detail {

namespace {

struct BuildNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    Label label = Label::bullish;
    int n = 0;       // training rows reaching the node
    int errors = 0;  // rows not matching the majority label
};

double entropy(int bull, int bear) {
    const int n = bull + bear;
    if (n == 0 || bull == 0 || bear == 0) return 0.0;
    const double pb = static_cast<double>(bull) / n;
    const double pr = static_cast<double>(bear) / n;
    return -pb * std::log(pb) - pr * std::log(pr);
}

// Pessimistic error estimate added on top of the observed errors: upper
// confidence bound of the binomial error rate (C4.5 / J48 style, with
// continuity correction).
double add_errs(double n, double e, double cf) {
    if (e < 1.0) {
        const double base = n * (1.0 - std::pow(cf, 1.0 / n));
        return base;
    }
    if (e + 0.5 >= n) return std::max(n - e, 0.0);
    const double z = stats::normal_quantile(1.0 - cf);
    const double f = (e + 0.5) / n;
    const double r = (f + z * z / (2.0 * n) +
                      z * std::sqrt(f / n - f * f / n + z * z / (4.0 * n * n))) /
                     (1.0 + z * z / n);
    return r * n - e;
}

class TreeBuilder {
public:
    TreeBuilder(const std::vector<std::vector<double>>& rows, const std::vector<Label>& labels,
                const TrainParams& params)
        : rows_(rows), labels_(labels), params_(params) {}

    DecisionTreeModel build() {
        std::vector<int> all(rows_.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
        const int root = grow(all, 0);
        if (params_.pruning_confidence > 0.0) prune(root);
        return flatten(root);
    }

private:
    int grow(const std::vector<int>& idx, int depth) {
        int bull = 0;
        for (int i : idx)
            if (labels_[i] == Label::bullish) ++bull;
        const int bear = static_cast<int>(idx.size()) - bull;

        BuildNode node;
        node.n = static_cast<int>(idx.size());
        node.label = bull >= bear ? Label::bullish : Label::bearish;
        node.errors = std::min(bull, bear);

        const bool stop = bull == 0 || bear == 0 || depth >= params_.max_depth ||
                          static_cast<int>(idx.size()) < 2 * params_.min_leaf;
        if (!stop) {
            if (auto split = best_split(idx, bull, bear)) {
                std::vector<int> left, right;
                for (int i : idx) {
                    (rows_[i][split->feature] <= split->threshold ? left : right).push_back(i);
                }
                node.feature = split->feature;
                node.threshold = split->threshold;
                nodes_.push_back(node);
                const int self = static_cast<int>(nodes_.size()) - 1;
                const int l = grow(left, depth + 1);
                const int r = grow(right, depth + 1);
                nodes_[self].left = l;
                nodes_[self].right = r;
                return self;
            }
        }
        nodes_.push_back(node);
        return static_cast<int>(nodes_.size()) - 1;
    }

    struct Split {
        int feature;
        double threshold;
    };

    std::optional<Split> best_split(const std::vector<int>& idx, int bull, int bear) {
        const int n = static_cast<int>(idx.size());
        const double parent_entropy = entropy(bull, bear);
        double best_ratio = 0.0;
        std::optional<Split> best;

        std::vector<std::pair<double, Label>> col(n);
        const std::size_t n_features = rows_.empty() ? 0 : rows_[0].size();
        for (std::size_t f = 0; f < n_features; ++f) {
            for (int i = 0; i < n; ++i) col[i] = {rows_[idx[i]][f], labels_[idx[i]]};
            std::sort(col.begin(), col.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            int left_bull = 0, left_n = 0;
            for (int i = 0; i + 1 < n; ++i) {
                if (col[i].second == Label::bullish) ++left_bull;
                ++left_n;
                if (col[i].first == col[i + 1].first) continue;
                if (left_n < params_.min_leaf || n - left_n < params_.min_leaf) continue;

                const int left_bear = left_n - left_bull;
                const int right_bull = bull - left_bull;
                const int right_bear = bear - left_bear;
                const double pl = static_cast<double>(left_n) / n;
                const double pr = 1.0 - pl;
                const double gain = parent_entropy - pl * entropy(left_bull, left_bear) -
                                    pr * entropy(right_bull, right_bear);
                if (gain <= 1e-12) continue;
                const double split_info = -pl * std::log(pl) - pr * std::log(pr);
                if (split_info <= 1e-12) continue;
                const double ratio = gain / split_info;
                if (ratio > best_ratio + 1e-12) {
                    best_ratio = ratio;
                    best = Split{static_cast<int>(f),
                                 col[i].first + (col[i + 1].first - col[i].first) / 2.0};
                }
            }
        }
        return best;
    }

    // Bottom-up pessimistic pruning: collapse a subtree whenever its
    // estimated error as a single leaf does not exceed the summed leaf
    // estimates (plus the customary 0.1 slack).
    double prune(int id) {
        BuildNode& node = nodes_[id];
        if (node.feature < 0)
            return node.errors + add_errs(node.n, node.errors, params_.pruning_confidence);
        const double subtree_err = prune(node.left) + prune(node.right);
        const double leaf_err =
            node.errors + add_errs(node.n, node.errors, params_.pruning_confidence);
        if (leaf_err <= subtree_err + 0.1) {
            node.feature = -1;
            node.left = node.right = -1;
            return leaf_err;
        }
        return subtree_err;
    }

    DecisionTreeModel flatten(int root) {
        DecisionTreeModel model;
        append(model, root);
        return model;
    }

    int append(DecisionTreeModel& model, int id) {
        const BuildNode& src = nodes_[id];
        const int out = static_cast<int>(model.nodes.size());
        model.nodes.push_back(TreeNode{src.feature, src.threshold, -1, -1, src.label});
        if (src.feature >= 0) {
            const int l = append(model, src.left);
            const int r = append(model, src.right);
            model.nodes[out].left = l;
            model.nodes[out].right = r;
        }
        return out;
    }

    const std::vector<std::vector<double>>& rows_;
    const std::vector<Label>& labels_;
    const TrainParams& params_;
    std::vector<BuildNode> nodes_;
};

}  // namespace

DecisionTreeModel train_decision_tree(const std::vector<std::vector<double>>& rows,
                                      const std::vector<Label>& labels,
                                      const TrainParams& params) {
    return TreeBuilder(rows, labels, params).build();
}

Label predict_tree(const DecisionTreeModel& m, const std::vector<double>& row) {
    int id = 0;
    for (;;) {
        const TreeNode& node = m.nodes[id];
        if (node.feature < 0) return node.label;
        id = row[node.feature] <= node.threshold ? node.left : node.right;
    }
}

}  // namespace sentipred::detail
