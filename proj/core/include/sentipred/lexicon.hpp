#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sentipred/ingest.hpp"

namespace sentipred {

/// One preprocessed, labeled document: unigram stems and bigram keys.
struct TokenizedDoc {
    std::vector<std::string> unigrams;
    std::vector<std::string> bigrams;
    Label label = Label::unlabeled;
};

/// Per-class document frequencies (presence counts) for every term.
struct ContingencyCounts {
    struct Df {
        int bullish = 0;
        int bearish = 0;
        bool is_bigram = false;
        int total() const { return bullish + bearish; }
    };
    int n_bullish_docs = 0;
    int n_bearish_docs = 0;
    std::unordered_map<std::string, Df> df;

    const Df* find(const std::string& term) const {
        auto it = df.find(term);
        return it == df.end() ? nullptr : &it->second;
    }
};

/// Counts document frequencies separately per class; a term is counted once
/// per document regardless of multiplicity. Throws on unlabeled documents or
/// an empty corpus.
ContingencyCounts count_contingency(const std::vector<TokenizedDoc>& docs);

/// Pointwise mutual information of a term with a class, natural log, with
/// `smoothing` added to every cell of the 2x2 term/class contingency table.
double pmi(const std::string& term, Label cls, const ContingencyCounts& counts,
           double smoothing);

/// Sentiment score: pmi(term, bullish) - pmi(term, bearish).
/// Positive means bullish-leaning.
double spmi_score(const std::string& term, const ContingencyCounts& counts, double smoothing);

enum class TermKind { unigram, bigram };

struct LexiconEntry {
    std::string term;
    TermKind kind = TermKind::unigram;
    double score = 0.0;
    int df = 0;
    bool is_negative_verb = false;
};

/// Domain sentiment lexicon with the parameters that produced it.
class SentimentLexicon {
public:
    SentimentLexicon() = default;
    SentimentLexicon(int df_threshold, double smoothing)
        : df_threshold_(df_threshold), smoothing_(smoothing) {}

    void insert(LexiconEntry entry);
    const LexiconEntry* find(const std::string& term) const;
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    /// Entries ordered by term, byte-lexicographic.
    const std::map<std::string, LexiconEntry>& entries() const { return entries_; }

    int df_threshold() const { return df_threshold_; }
    double smoothing() const { return smoothing_; }
    /// Base of the logarithm used for the scores (always e here; recorded so
    /// files are self-describing).
    double log_base() const { return 2.718281828459045235; }

private:
    std::map<std::string, LexiconEntry> entries_;
    int df_threshold_ = 3;
    double smoothing_ = 0.5;
};

/// Builds the lexicon: unigrams whose combined document frequency exceeds
/// `df_threshold`, plus DF-qualified bigrams whose score strictly exceeds
/// the sum of their admitted constituents' scores (absent constituent = 0).
/// Throws if either class has zero documents.
SentimentLexicon build_lexicon(const std::vector<TokenizedDoc>& docs, int df_threshold,
                               double smoothing);

/// JSON Lines: a header line {version, count, df_threshold, smoothing,
/// log_base} followed by one {term, kind, score, df, neg} object per entry,
/// ordered by term. Round-trips losslessly.
void save_lexicon(const SentimentLexicon& lexicon, const std::string& path,
                  const std::string& provenance = "");
SentimentLexicon load_lexicon(const std::string& path);

}  // namespace sentipred
