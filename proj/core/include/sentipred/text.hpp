#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace sentipred {

/// A stemmed token. If no stem is known the surface form stands in for it.
/// Negative verb stems carry a leading '!' marker so they stay distinct
/// lexicon items from their affirmative roots.
struct Token {
    std::string surface;
    std::string stem;
    bool is_negative_verb = false;
};

struct StemInfo {
    std::string stem;
    bool is_negative_verb = false;
    std::string category;  // e.g. "verb", "noun"; free-form
};

/// Morphological lookup interface. Implementations receive a formal word
/// (or whole phrase) and report its stem when known.
class Stemmer {
public:
    virtual ~Stemmer() = default;
    virtual std::optional<StemInfo> lookup(const std::string& word) const = 0;
};

/// Flat-file stemmer backed by a TSV dictionary:
/// surface<TAB>stem<TAB>neg{0,1}<TAB>category, one entry per line,
/// '#' comment lines allowed. Surfaces are expected in normalized form.
class DictionaryStemmer : public Stemmer {
public:
    DictionaryStemmer() = default;
    static DictionaryStemmer from_file(const std::string& path);

    void add(const std::string& surface, StemInfo info);
    std::optional<StemInfo> lookup(const std::string& word) const override;
    std::size_t size() const { return entries_.size(); }

private:
    std::unordered_map<std::string, StemInfo> entries_;
};

/// Normalizes raw comment text: unifies Arabic character variants and digits,
/// drops @mentions and #tags, rewrites '+'/'-' runs to the Persian words for
/// positive/negative, collapses runs of 3+ identical characters to 2, and
/// unifies the verb prefixes "می"/"نمی" to the half-space (ZWNJ) form.
/// Total and idempotent.
std::string normalize(std::string_view text);

/// Splits normalized text into tokens on whitespace and punctuation.
/// Punctuation is dropped; the half-space (U+200C) stays inside tokens.
std::vector<std::string> tokenize(std::string_view text);

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const std::unordered_set<std::string>& stoplist);

std::unordered_set<std::string> load_stopwords(const std::string& path);

/// Applies the colloquial-to-formal rewrite rules in their fixed order
/// (colloquial plural 'ا', object marker 'و', possessive مون/تون/شون,
/// verb-ending substitutions) and returns every successful rewrite followed
/// by the input word as the last-resort candidate.
std::vector<std::string> colloquial_to_formal(const std::string& word);

/// Stems one word: tries the word itself, then each colloquial_to_formal
/// candidate; the first stemmer hit wins. On total failure the word is its
/// own stem and a negation-prefix heuristic decides is_negative_verb.
Token stem(const std::string& word, const Stemmer& stemmer);

/// Unigram stems and adjacent-pair bigram keys (stems joined by a single
/// space). When a stemmer is given, each bigram is first looked up as a
/// whole phrase; on failure the constituents' stems are joined.
struct NgramSet {
    std::vector<std::string> unigrams;
    std::vector<std::string> bigrams;
};
NgramSet extract_ngrams(const std::vector<Token>& tokens, const Stemmer* stemmer = nullptr);

/// normalize + tokenize + stopword filter + stem, in that order.
std::vector<Token> preprocess(const std::string& text, const Stemmer& stemmer,
                              const std::unordered_set<std::string>& stoplist);

}  // namespace sentipred
