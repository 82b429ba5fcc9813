#include "sentipred/lexicon.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace sentipred {

namespace {

constexpr int kLexiconFileVersion = 1;

std::pair<std::string, std::string> split_bigram(const std::string& key) {
    const auto sp = key.find(' ');
    if (sp == std::string::npos) return {key, ""};
    return {key.substr(0, sp), key.substr(sp + 1)};
}

}  // namespace

ContingencyCounts count_contingency(const std::vector<TokenizedDoc>& docs) {
    if (docs.empty()) throw std::runtime_error("count_contingency: no documents");
    ContingencyCounts counts;
    for (const TokenizedDoc& doc : docs) {
        if (doc.label == Label::unlabeled)
            throw std::runtime_error("count_contingency: unlabeled document");
        const bool bull = doc.label == Label::bullish;
        (bull ? counts.n_bullish_docs : counts.n_bearish_docs) += 1;

        std::set<std::string> seen;
        for (const std::string& t : doc.unigrams) {
            if (!seen.insert(t).second) continue;
            auto& e = counts.df[t];
            (bull ? e.bullish : e.bearish) += 1;
        }
        for (const std::string& t : doc.bigrams) {
            if (!seen.insert(t).second) continue;
            auto& e = counts.df[t];
            e.is_bigram = true;
            (bull ? e.bullish : e.bearish) += 1;
        }
    }
    return counts;
}

double pmi(const std::string& term, Label cls, const ContingencyCounts& counts,
           double smoothing) {
    if (cls == Label::unlabeled) throw std::runtime_error("pmi: class must be bullish or bearish");
    const auto* e = counts.find(term);
    const int df_bull = e ? e->bullish : 0;
    const int df_bear = e ? e->bearish : 0;
    const bool bull = cls == Label::bullish;

    // 2x2 contingency cells with add-smoothing: rows = term present/absent,
    // columns = class / other class.
    const double in_cls = (bull ? df_bull : df_bear) + smoothing;
    const double in_other = (bull ? df_bear : df_bull) + smoothing;
    const double out_cls = (bull ? counts.n_bullish_docs - df_bull
                                 : counts.n_bearish_docs - df_bear) + smoothing;
    const double out_other = (bull ? counts.n_bearish_docs - df_bear
                                   : counts.n_bullish_docs - df_bull) + smoothing;
    const double total = in_cls + in_other + out_cls + out_other;

    const double p_joint = in_cls / total;
    const double p_term = (in_cls + in_other) / total;
    const double p_cls = (in_cls + out_cls) / total;
    return std::log(p_joint / (p_term * p_cls));
}

double spmi_score(const std::string& term, const ContingencyCounts& counts, double smoothing) {
    return pmi(term, Label::bullish, counts, smoothing) -
           pmi(term, Label::bearish, counts, smoothing);
}

void SentimentLexicon::insert(LexiconEntry entry) {
    auto [it, inserted] = entries_.emplace(entry.term, entry);
    if (!inserted) throw std::runtime_error("duplicate lexicon term '" + entry.term + "'");
}

const LexiconEntry* SentimentLexicon::find(const std::string& term) const {
    auto it = entries_.find(term);
    return it == entries_.end() ? nullptr : &it->second;
}

SentimentLexicon build_lexicon(const std::vector<TokenizedDoc>& docs, int df_threshold,
                               double smoothing) {
    if (!(smoothing > 0.0)) throw std::runtime_error("build_lexicon: smoothing must be positive");
    const ContingencyCounts counts = count_contingency(docs);
    if (counts.n_bullish_docs == 0 || counts.n_bearish_docs == 0)
        throw std::runtime_error("build_lexicon: a class has zero documents");

    SentimentLexicon lexicon(df_threshold, smoothing);
    for (const auto& [term, df] : counts.df) {
        if (df.is_bigram || df.total() <= df_threshold) continue;
        LexiconEntry entry;
        entry.term = term;
        entry.kind = TermKind::unigram;
        entry.score = spmi_score(term, counts, smoothing);
        entry.df = df.total();
        entry.is_negative_verb = !term.empty() && term[0] == '!';
        lexicon.insert(std::move(entry));
    }
    for (const auto& [term, df] : counts.df) {
        if (!df.is_bigram || df.total() <= df_threshold) continue;
        const double score = spmi_score(term, counts, smoothing);
        const auto [left, right] = split_bigram(term);
        const LexiconEntry* le = lexicon.find(left);
        const LexiconEntry* re = lexicon.find(right);
        const double constituent_sum = (le ? le->score : 0.0) + (re ? re->score : 0.0);
        if (!(score > constituent_sum)) continue;
        LexiconEntry entry;
        entry.term = term;
        entry.kind = TermKind::bigram;
        entry.score = score;
        entry.df = df.total();
        entry.is_negative_verb =
            (!left.empty() && left[0] == '!') || (!right.empty() && right[0] == '!');
        lexicon.insert(std::move(entry));
    }
    return lexicon;
}

void save_lexicon(const SentimentLexicon& lexicon, const std::string& path,
                  const std::string& provenance) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    nlohmann::json header = {{"version", kLexiconFileVersion},
                             {"count", lexicon.size()},
                             {"df_threshold", lexicon.df_threshold()},
                             {"smoothing", lexicon.smoothing()},
                             {"log_base", lexicon.log_base()}};
    if (!provenance.empty()) header["provenance"] = provenance;
    out << header.dump() << '\n';
    for (const auto& [term, e] : lexicon.entries()) {
        nlohmann::json j = {{"term", e.term},
                            {"kind", e.kind == TermKind::unigram ? "unigram" : "bigram"},
                            {"score", e.score},
                            {"df", e.df},
                            {"neg", e.is_negative_verb}};
        out << j.dump() << '\n';
    }
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

SentimentLexicon load_lexicon(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open lexicon file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty lexicon file");

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": malformed header: " + e.what());
    }
    if (!header.contains("version") || header["version"].get<int>() != kLexiconFileVersion)
        throw std::runtime_error(path + ": unsupported lexicon file version");
    const auto expected = header.at("count").get<std::size_t>();

    SentimentLexicon lexicon(header.at("df_threshold").get<int>(),
                             header.at("smoothing").get<double>());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": malformed entry: " + e.what());
        }
        LexiconEntry e;
        try {
            e.term = j.at("term").get<std::string>();
            const auto kind = j.at("kind").get<std::string>();
            if (kind == "unigram") e.kind = TermKind::unigram;
            else if (kind == "bigram") e.kind = TermKind::bigram;
            else throw std::runtime_error("unknown kind '" + kind + "'");
            e.score = j.at("score").get<double>();
            e.df = j.at("df").get<int>();
            e.is_negative_verb = j.at("neg").get<bool>();
        } catch (const std::exception& ex) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + ex.what());
        }
        lexicon.insert(std::move(e));
    }
    if (lexicon.size() != expected)
        throw std::runtime_error(path + ": truncated lexicon file: header declares " +
                                 std::to_string(expected) + " entries, found " +
                                 std::to_string(lexicon.size()));
    return lexicon;
}

}  // namespace sentipred
