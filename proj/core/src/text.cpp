#include "sentipred/text.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "sentipred/utf8.hpp"

namespace sentipred {

namespace {

using U32 = std::u32string;

constexpr char32_t kZwnj = U'\u200C';  // half-space (ZWNJ)

const U32 kWordPositive = U"مثبت";
const U32 kWordNegative = U"منفی";
const U32 kPrefixMi = U"می";
const U32 kPrefixNemi = U"نمی";

constexpr char32_t kAlef = U'ا';
constexpr char32_t kWaw = U'و';
constexpr char32_t kNoon = U'ن';
constexpr char32_t kDal = U'د';
constexpr char32_t kHeh = U'ه';
constexpr char32_t kYeh = U'ی';
constexpr char32_t kMeem = U'م';
constexpr char32_t kTeh = U'ت';
constexpr char32_t kSheen = U'ش';

char32_t unify_char(char32_t cp) {
    if (cp == U'ي' || cp == U'ى') return kYeh;   // Arabic yeh forms
    if (cp == U'ك') return U'ک';                 // Arabic kaf
    if (cp >= U'٠' && cp <= U'٩') return U'0' + (cp - U'٠');
    if (cp >= U'۰' && cp <= U'۹') return U'0' + (cp - U'۰');
    if (cp == U'\u00A0') return U' ';  // no-break space
    return cp;
}

bool is_space(char32_t cp) {
    return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' ||
           cp == U'\v' || cp == U'\u2028' || cp == U'\u2029' || cp == U'\u200B';
}

bool is_punct(char32_t cp) {
    if (cp < 128) {
        const bool alnum = (cp >= U'0' && cp <= U'9') || (cp >= U'a' && cp <= U'z') ||
                           (cp >= U'A' && cp <= U'Z');
        return !alnum && !is_space(cp);
    }
    switch (cp) {
        case U'،':
        case U'؛':
        case U'؟':
        case U'٪':
        case U'«':
        case U'»':
        case U'…':
        case U'‘':
        case U'’':
        case U'“':
        case U'”':
        case U'–':
        case U'—':
            return true;
        default:
            return false;
    }
}

std::vector<U32> split_words(const U32& s) {
    std::vector<U32> words;
    U32 cur;
    for (char32_t cp : s) {
        if (is_space(cp)) {
            if (!cur.empty()) words.push_back(std::move(cur)), cur.clear();
        } else {
            cur.push_back(cp);
        }
    }
    if (!cur.empty()) words.push_back(std::move(cur));
    return words;
}

bool starts_with(const U32& s, const U32& prefix) {
    return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

U32 strip_zwnj_edges(U32 w) {
    std::size_t a = 0, b = w.size();
    while (a < b && w[a] == kZwnj) ++a;
    while (b > a && w[b - 1] == kZwnj) --b;
    return w.substr(a, b - a);
}

// Inserts the half-space after a leading می/نمی joined straight onto the
// verb body, mirroring the unified writing form. The remainder must be at
// least two characters so short nouns like میز stay untouched.
U32 unify_verb_prefix(U32 w) {
    for (const U32* prefix : {&kPrefixNemi, &kPrefixMi}) {
        if (starts_with(w, *prefix) && w.size() >= prefix->size() + 2 &&
            w[prefix->size()] != kZwnj) {
            U32 out = *prefix;
            out.push_back(kZwnj);
            out.append(w.substr(prefix->size()));
            return out;
        }
        if (starts_with(w, *prefix)) return w;  // already half-spaced or too short
    }
    return w;
}

std::string to_utf8(const U32& s) {
    std::string out;
    for (char32_t cp : s) utf8::append(out, cp);
    return out;
}

U32 to_u32(std::string_view s) {
    const auto cps = utf8::decode(s);
    return U32(cps.begin(), cps.end());
}

std::optional<StemInfo> lookup_with_candidates(const std::string& word, const Stemmer& stemmer) {
    if (auto hit = stemmer.lookup(word)) return hit;
    for (const std::string& cand : colloquial_to_formal(word)) {
        if (cand == word) continue;
        if (auto hit = stemmer.lookup(cand)) return hit;
    }
    return std::nullopt;
}

std::string marked_stem(const StemInfo& info) {
    return info.is_negative_verb ? "!" + info.stem : info.stem;
}

}  // namespace

DictionaryStemmer DictionaryStemmer::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open stemmer dictionary '" + path + "'");
    DictionaryStemmer dict;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cols;
        std::size_t start = 0;
        for (;;) {
            const auto tab = line.find('\t', start);
            cols.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (cols.size() != 4 || cols[0].empty() || cols[1].empty() ||
            (cols[2] != "0" && cols[2] != "1"))
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected surface<TAB>stem<TAB>neg{0,1}<TAB>category");
        dict.add(cols[0], StemInfo{cols[1], cols[2] == "1", cols[3]});
    }
    return dict;
}

void DictionaryStemmer::add(const std::string& surface, StemInfo info) {
    entries_[surface] = std::move(info);
}

std::optional<StemInfo> DictionaryStemmer::lookup(const std::string& word) const {
    auto it = entries_.find(word);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::string normalize(std::string_view text) {
    U32 unified = to_u32(text);
    for (char32_t& cp : unified) cp = unify_char(cp);

    std::vector<U32> words;
    for (U32& w : split_words(unified)) {
        // '+'/'-' runs become sentiment words; other characters pass through.
        // Mentions and tags are dropped after the split so a '#'/'@' exposed
        // by a removed sign run is still treated as the start of a word.
        U32 rebuilt;
        std::size_t i = 0;
        auto flush_word = [&]() {
            if (!rebuilt.empty() && rebuilt[0] != U'@' && rebuilt[0] != U'#')
                words.push_back(rebuilt);
            rebuilt.clear();
        };
        while (i < w.size()) {
            if (w[i] == U'+' || w[i] == U'-') {
                const char32_t sign = w[i];
                while (i < w.size() && w[i] == sign) ++i;
                flush_word();
                words.push_back(sign == U'+' ? kWordPositive : kWordNegative);
            } else {
                rebuilt.push_back(w[i]);
                ++i;
            }
        }
        flush_word();
    }

    for (U32& w : words) {
        // Collapse runs of 3+ identical characters to 2.
        U32 collapsed;
        for (char32_t cp : w) {
            const auto n = collapsed.size();
            if (n >= 2 && collapsed[n - 1] == cp && collapsed[n - 2] == cp) continue;
            collapsed.push_back(cp);
        }
        w = unify_verb_prefix(std::move(collapsed));
    }

    // Merge a standalone می/نمی with the following word via half-space.
    std::vector<U32> merged;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if ((words[i] == kPrefixMi || words[i] == kPrefixNemi) && i + 1 < words.size()) {
            U32 joined = words[i];
            joined.push_back(kZwnj);
            joined.append(words[i + 1]);
            merged.push_back(std::move(joined));
            ++i;
        } else {
            merged.push_back(words[i]);
        }
    }

    U32 out;
    for (const U32& w : merged) {
        if (!out.empty()) out.push_back(U' ');
        out.append(w);
    }
    return to_utf8(out);
}

std::vector<std::string> tokenize(std::string_view text) {
    const U32 s = to_u32(text);
    std::vector<std::string> tokens;
    U32 cur;
    auto flush = [&]() {
        cur = strip_zwnj_edges(std::move(cur));
        if (!cur.empty()) tokens.push_back(to_utf8(cur));
        cur.clear();
    };
    for (char32_t cp : s) {
        if (is_space(cp) || is_punct(cp)) {
            flush();
        } else {
            cur.push_back(cp);
        }
    }
    flush();
    return tokens;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const std::unordered_set<std::string>& stoplist) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const std::string& t : tokens)
        if (!stoplist.count(t)) out.push_back(t);
    return out;
}

std::unordered_set<std::string> load_stopwords(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open stopword file '" + path + "'");
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto a = line.find_first_not_of(" \t");
        if (a == std::string::npos) continue;
        const auto b = line.find_last_not_of(" \t");
        line = line.substr(a, b - a + 1);
        if (line.empty() || line[0] == '#') continue;
        words.insert(line);
    }
    return words;
}

std::vector<std::string> colloquial_to_formal(const std::string& word) {
    const U32 w = to_u32(word);
    std::vector<U32> candidates;
    auto push = [&](U32 cand) {
        if (cand.empty()) return;
        if (std::find(candidates.begin(), candidates.end(), cand) == candidates.end())
            candidates.push_back(std::move(cand));
    };

    // Rule 1: colloquial plural 'ا' dropped.
    if (w.size() > 1 && w.back() == kAlef) push(w.substr(0, w.size() - 1));
    // Rule 2: attached object marker 'و' dropped.
    if (w.size() > 1 && w.back() == kWaw) push(w.substr(0, w.size() - 1));
    // Rule 3: possessive مون/تون/شون back to مان/تان/شان.
    if (w.size() > 3 && w[w.size() - 1] == kNoon && w[w.size() - 2] == kWaw &&
        (w[w.size() - 3] == kMeem || w[w.size() - 3] == kTeh || w[w.size() - 3] == kSheen)) {
        U32 cand = w;
        cand[cand.size() - 2] = kAlef;
        push(std::move(cand));
    }
    // Rule 4: colloquial verb endings back to formal:
    // ین -> ید, final ن -> ند, final ه -> د.
    if (w.size() > 2 && w[w.size() - 2] == kYeh && w.back() == kNoon) {
        U32 cand = w;
        cand.back() = kDal;
        push(std::move(cand));
    }
    if (w.size() > 1 && w.back() == kNoon) {
        U32 cand = w;
        cand.push_back(kDal);
        push(std::move(cand));
    }
    if (w.size() > 1 && w.back() == kHeh) {
        U32 cand = w;
        cand.back() = kDal;
        push(std::move(cand));
    }

    std::vector<std::string> out;
    out.reserve(candidates.size() + 1);
    for (const U32& c : candidates) out.push_back(to_utf8(c));
    out.push_back(word);
    return out;
}

Token stem(const std::string& word, const Stemmer& stemmer) {
    if (auto hit = lookup_with_candidates(word, stemmer))
        return Token{word, marked_stem(*hit), hit->is_negative_verb};

    // Negation-prefix fallback for words the stemmer does not know.
    const U32 w = to_u32(word);
    if (starts_with(w, kPrefixNemi)) {
        U32 rest = strip_zwnj_edges(w.substr(kPrefixNemi.size()));
        if (!rest.empty()) {
            U32 affirmative = kPrefixMi;
            affirmative.push_back(kZwnj);
            affirmative.append(rest);
            for (const std::string& cand : {to_utf8(affirmative), to_utf8(rest)}) {
                if (auto hit = lookup_with_candidates(cand, stemmer))
                    return Token{word, "!" + hit->stem, true};
            }
            return Token{word, "!" + to_utf8(rest), true};
        }
    }
    if (w.size() >= 3 && w.front() == kNoon) {
        const std::string rest = to_utf8(strip_zwnj_edges(w.substr(1)));
        if (auto hit = lookup_with_candidates(rest, stemmer); hit && hit->category == "verb")
            return Token{word, "!" + hit->stem, true};
    }
    return Token{word, word, false};
}

NgramSet extract_ngrams(const std::vector<Token>& tokens, const Stemmer* stemmer) {
    NgramSet out;
    out.unigrams.reserve(tokens.size());
    for (const Token& t : tokens) out.unigrams.push_back(t.stem);
    if (tokens.size() < 2) return out;
    out.bigrams.reserve(tokens.size() - 1);
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        if (stemmer) {
            const std::string phrase = tokens[i].surface + " " + tokens[i + 1].surface;
            if (auto hit = stemmer->lookup(phrase)) {
                out.bigrams.push_back(marked_stem(*hit));
                continue;
            }
        }
        out.bigrams.push_back(tokens[i].stem + " " + tokens[i + 1].stem);
    }
    return out;
}

std::vector<Token> preprocess(const std::string& text, const Stemmer& stemmer,
                              const std::unordered_set<std::string>& stoplist) {
    const auto tokens = remove_stopwords(tokenize(normalize(text)), stoplist);
    std::vector<Token> out;
    out.reserve(tokens.size());
    for (const std::string& t : tokens) out.push_back(stem(t, stemmer));
    return out;
}

}  // namespace sentipred
