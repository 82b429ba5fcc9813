#include <doctest.h>

#include <random>

#include "sentipred/features.hpp"

using namespace sentipred;

namespace {

SentimentLexicon toy_lexicon() {
    SentimentLexicon lexicon(0, 0.5);
    lexicon.insert({"a", TermKind::unigram, 0.5, 4, false});
    lexicon.insert({"b", TermKind::unigram, -0.25, 4, false});
    lexicon.insert({"a b", TermKind::bigram, 2.0, 4, false});
    lexicon.insert({"c", TermKind::unigram, 1.0, 4, false});
    return lexicon;
}

NgramSet ngrams_of(const std::vector<std::string>& stems) {
    NgramSet n;
    n.unigrams = stems;
    for (std::size_t i = 0; i + 1 < stems.size(); ++i)
        n.bigrams.push_back(stems[i] + " " + stems[i + 1]);
    return n;
}

}  // namespace

TEST_CASE("bigram matches consume their unigram occurrences") {
    const auto lexicon = toy_lexicon();
    const FeatureVector vec = featurize(ngrams_of({"a", "b"}), lexicon, true);
    REQUIRE(vec.term_features.size() == 1);
    CHECK(vec.term_features.at("a b") == doctest::Approx(2.0));
    CHECK(vec.comment_score == doctest::Approx(2.0 / 2.0));
}

TEST_CASE("hand-enumerated span oracle") {
    // tokens: c a b c  -> bigram "a b" claims positions 1,2; unigram c twice.
    const auto lexicon = toy_lexicon();
    const FeatureVector vec = featurize(ngrams_of({"c", "a", "b", "c"}), lexicon, true);
    CHECK(vec.term_features.at("a b") == doctest::Approx(2.0));
    CHECK(vec.term_features.at("c") == doctest::Approx(2.0 * 1.0));
    CHECK(vec.term_features.count("a") == 0);
    CHECK(vec.comment_score == doctest::Approx((2.0 + 1.0 + 1.0) / 4.0));
}

TEST_CASE("no matches yields an empty vector with zero score") {
    const auto lexicon = toy_lexicon();
    const FeatureVector vec = featurize(ngrams_of({"x", "y"}), lexicon, true);
    CHECK(vec.term_features.empty());
    CHECK(vec.comment_score == 0.0);
}

TEST_CASE("empty comment scores zero by convention") {
    const FeatureVector vec = featurize(ngrams_of({}), toy_lexicon(), true);
    CHECK(vec.comment_score == 0.0);
    CHECK(vec.term_features.empty());
}

TEST_CASE("doubling the text doubles counts but not the score") {
    const auto lexicon = toy_lexicon();
    const FeatureVector once = featurize(ngrams_of({"c", "a"}), lexicon, true);
    const FeatureVector twice = featurize(ngrams_of({"c", "a", "c", "a"}), lexicon, true);
    CHECK(twice.term_features.at("c") == doctest::Approx(2.0 * once.term_features.at("c")));
    CHECK(twice.term_features.at("a") == doctest::Approx(2.0 * once.term_features.at("a")));
    CHECK(*twice.comment_score == doctest::Approx(*once.comment_score));
}

TEST_CASE("include_score=false omits the score") {
    const FeatureVector vec = featurize(ngrams_of({"a"}), toy_lexicon(), false);
    CHECK_FALSE(vec.comment_score.has_value());
}

TEST_CASE("feature consumption never exceeds the token count") {
    std::mt19937_64 rng(5);
    const auto lexicon = toy_lexicon();
    const std::vector<std::string> vocab = {"a", "b", "c", "x"};
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<std::string> stems;
        std::uniform_int_distribution<int> len(0, 12);
        std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
        for (int i = 0, k = len(rng); i < k; ++i) stems.push_back(vocab[pick(rng)]);
        const FeatureVector vec = featurize(ngrams_of(stems), lexicon, true);

        double unigram_count = 0.0, bigram_count = 0.0;
        for (const auto& [term, value] : vec.term_features) {
            const LexiconEntry* e = lexicon.find(term);
            REQUIRE(e != nullptr);
            const double count = value / e->score;
            if (e->kind == TermKind::bigram) bigram_count += count;
            else unigram_count += count;
        }
        CHECK(unigram_count + 2.0 * bigram_count <= static_cast<double>(stems.size()) + 1e-9);
    }
}
