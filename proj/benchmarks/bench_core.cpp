#include <benchmark/benchmark.h>

#include <random>

#include "sentipred/classifier.hpp"
#include "sentipred/features.hpp"
#include "sentipred/lexicon.hpp"
#include "sentipred/regression.hpp"
#include "sentipred/text.hpp"
#include "sentipred/timeseries.hpp"

using namespace sentipred;

namespace {

std::vector<TokenizedDoc> planted_docs(int n_comments, int vocab_side, int tokens_per_comment) {
    std::mt19937_64 rng(1);
    std::bernoulli_distribution own(0.75);
    std::uniform_int_distribution<int> pick(0, vocab_side - 1);
    std::vector<TokenizedDoc> docs;
    for (int i = 0; i < n_comments; ++i) {
        TokenizedDoc d;
        d.label = (i % 2 == 0) ? Label::bullish : Label::bearish;
        for (int t = 0; t < tokens_per_comment; ++t) {
            const bool bull = (d.label == Label::bullish) == own(rng);
            d.unigrams.push_back((bull ? "p" : "n") + std::to_string(pick(rng)));
        }
        for (std::size_t w = 0; w + 1 < d.unigrams.size(); ++w)
            d.bigrams.push_back(d.unigrams[w] + " " + d.unigrams[w + 1]);
        docs.push_back(std::move(d));
    }
    return docs;
}

std::vector<double> ar1_series(int n, double phi) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> x(n);
    double prev = 0.0;
    for (int i = 0; i < n; ++i) {
        prev = phi * prev + noise(rng);
        x[i] = prev;
    }
    return x;
}

Series as_series(const std::string& name, std::vector<double> values) {
    Series s;
    s.name = name;
    s.values = std::move(values);
    for (std::size_t i = 0; i < s.values.size(); ++i)
        s.dates.push_back(Date{static_cast<std::int32_t>(i)});
    return s;
}

void BM_Normalize(benchmark::State& state) {
    const std::string text = "این سهم میره بالا +++ عاااالی بود @ali #بورس می رود";
    for (auto _ : state) benchmark::DoNotOptimize(normalize(text));
}
BENCHMARK(BM_Normalize);

void BM_BuildLexicon(benchmark::State& state) {
    const auto docs = planted_docs(static_cast<int>(state.range(0)), 100, 10);
    for (auto _ : state) benchmark::DoNotOptimize(build_lexicon(docs, 3, 0.5));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildLexicon)->Range(256, 4096)->Complexity();

void BM_Featurize(benchmark::State& state) {
    const auto docs = planted_docs(2000, 100, 10);
    const auto lexicon = build_lexicon(docs, 3, 0.5);
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& d = docs[i++ % docs.size()];
        benchmark::DoNotOptimize(featurize(NgramSet{d.unigrams, d.bigrams}, lexicon, true));
    }
}
BENCHMARK(BM_Featurize);

void BM_TrainTree(benchmark::State& state) {
    const auto docs = planted_docs(static_cast<int>(state.range(0)), 60, 8);
    const auto lexicon = build_lexicon(docs, 3, 0.5);
    std::vector<FeatureVector> vectors;
    for (const auto& d : docs) {
        FeatureVector v = featurize(NgramSet{d.unigrams, d.bigrams}, lexicon, true);
        v.label = d.label;
        vectors.push_back(std::move(v));
    }
    const auto schema = schema_from_lexicon(lexicon, true);
    for (auto _ : state)
        benchmark::DoNotOptimize(train(vectors, schema, Algorithm::decision_tree, {}, 1));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TrainTree)->Range(256, 2048)->Complexity();

void BM_Acf(benchmark::State& state) {
    const auto x = ar1_series(static_cast<int>(state.range(0)), 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(acf(x, 10));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Acf)->Range(512, 8192)->Complexity();

void BM_FitOls(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise(0.0, 1.0);
    Eigen::MatrixXd X(n, 6);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < 6; ++j) X(i, j) = noise(rng);
        y(i) = noise(rng);
    }
    for (auto _ : state) benchmark::DoNotOptimize(fit_ols(X, y));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FitOls)->Range(128, 4096)->Complexity();

void BM_FitM0(benchmark::State& state) {
    const Series target = as_series("y", ar1_series(500, 0.8));
    for (auto _ : state) benchmark::DoNotOptimize(fit_m0(target, 5, 0.05));
}
BENCHMARK(BM_FitM0);

void BM_BuildM1(benchmark::State& state) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> noise(0.0, 0.5);
    const auto x = ar1_series(400, 0.5);
    std::vector<double> y(x.size(), 0.0);
    for (std::size_t t = 1; t < y.size(); ++t) y[t] = 0.3 * y[t - 1] + 0.8 * x[t - 1] + noise(rng);
    const Series target = as_series("y", y);
    const std::vector<Series> candidates = {as_series("x", x),
                                            as_series("z", ar1_series(400, 0.4))};
    const RegressionModel m0 = fit_m0(target, 5, 0.05);
    for (auto _ : state) benchmark::DoNotOptimize(build_m1(m0, target, candidates, 5, 0.05));
}
BENCHMARK(BM_BuildM1);

}  // namespace

BENCHMARK_MAIN();
