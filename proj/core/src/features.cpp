#include "sentipred/features.hpp"

namespace sentipred {

FeatureVector featurize(const NgramSet& ngrams, const SentimentLexicon& lexicon,
                        bool include_score) {
    const std::size_t n = ngrams.unigrams.size();
    FeatureVector vec;
    std::map<std::string, int> counts;
    double score_sum = 0.0;

    std::vector<bool> consumed(n, false);
    for (std::size_t i = 0; i < ngrams.bigrams.size() && i + 1 < n; ++i) {
        if (consumed[i] || consumed[i + 1]) continue;
        const LexiconEntry* e = lexicon.find(ngrams.bigrams[i]);
        if (!e || e->kind != TermKind::bigram) continue;
        counts[e->term] += 1;
        score_sum += e->score;
        consumed[i] = consumed[i + 1] = true;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (consumed[i]) continue;
        const LexiconEntry* e = lexicon.find(ngrams.unigrams[i]);
        if (!e || e->kind != TermKind::unigram) continue;
        counts[e->term] += 1;
        score_sum += e->score;
    }

    for (const auto& [term, count] : counts)
        vec.term_features[term] = count * lexicon.find(term)->score;
    if (include_score)
        vec.comment_score = n > 0 ? score_sum / static_cast<double>(n) : 0.0;
    return vec;
}

}  // namespace sentipred
