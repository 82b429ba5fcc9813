#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sentipred/lexicon.hpp"
#include "sentipred/text.hpp"

namespace sentipred {

/// Sparse feature vector for one comment. Term feature values are
/// occurrence count x lexicon score; comment_score is the length-normalized
/// aggregate polarity (absent when the score feature is disabled).
struct FeatureVector {
    std::map<std::string, double> term_features;
    std::optional<double> comment_score;
    std::optional<Label> label;
};

/// Matches lexicon items against the comment's n-grams. Bigram matches are
/// claimed greedily left to right and consume their tokens, so those token
/// positions are not counted again as unigrams. comment_score is the sum of
/// matched scores (with multiplicity) divided by the token count; an empty
/// comment scores 0 by convention.
FeatureVector featurize(const NgramSet& ngrams, const SentimentLexicon& lexicon,
                        bool include_score);

}  // namespace sentipred
